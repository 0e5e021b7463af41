#pragma once

// Per-step data-parallel work of the settling solver. Each routine has a
// plain serial reference and an OpenMP version; both must agree bitwise.
// Kernels never throw: callers guarantee 0 <= X <= X_max on wet cells.

#include <cstddef>
#include <span>
#include <vector>

#include "sbr/constitutive.hpp"
#include "sbr/effluent.hpp"
#include "sbr/reactions.hpp"

namespace sbr::kernels {

struct StepInputs {
    const SettlingModel* settling = nullptr;
    const ReactionModel* reactions = nullptr;
    std::size_t cells = 0;
    std::size_t k_C = 0;
    std::size_t k_S = 0;
    std::size_t top = 0;  // topmost wet cell
    double dz = 0.0;
    double Q_f = 0.0;
    double Q_u = 0.0;
    double Q_e = 0.0;
    double surface_area = 0.0;  // A(zbar)
    double top_volume_floor = 0.0;  // lower bound of the top cell volume over the step
    std::span<const double> face_area;  // cells + 1
    std::span<const double> volume;     // wet volume per cell
    std::span<const double> C;          // cells * k_C
    std::span<const double> S;          // cells * k_S
    std::span<const double> C_f;
    std::span<const double> S_f;
};

/// Face f sits between cell f-1 (above) and cell f (below). Solids flux of
/// component k through f, positive downward, is a[f] C_{f-1,k} - b[f] C_{f,k};
/// substrates likewise with as/bs. All coefficients are >= 0 (m^3/s).
struct FaceCoefficients {
    std::vector<double> a, b, as, bs;
    ExtractionRates extraction;

    void resize(std::size_t faces) {
        a.assign(faces, 0.0);
        b.assign(faces, 0.0);
        as.assign(faces, 0.0);
        bs.assign(faces, 0.0);
        extraction = {};
    }
};

struct StepOutputs {
    std::vector<double> mass_C;   // cells * k_C, new masses of wet cells
    std::vector<double> mass_S;   // cells * k_S
    std::vector<double> reacted;  // cells * (k_C + k_S), dt * w * R
    std::vector<unsigned char> negative_factor;  // per cell: CFL-violating retention factor

    void resize(std::size_t cells, std::size_t kc, std::size_t ks) {
        mass_C.assign(cells * kc, 0.0);
        mass_S.assign(cells * ks, 0.0);
        reacted.assign(cells * (kc + ks), 0.0);
        negative_factor.assign(cells, 0);
    }
};

void face_coefficients_serial(const StepInputs& in, FaceCoefficients& out);
void face_coefficients_omp(const StepInputs& in, FaceCoefficients& out);

/// Per-cell stability rate (1/s); dt * rate <= 1 keeps every cell's
/// retention factor nonnegative and the solids update monotone.
void stability_rates_serial(const StepInputs& in, const FaceCoefficients& fc, std::span<double> rate);
void stability_rates_omp(const StepInputs& in, const FaceCoefficients& fc, std::span<double> rate);

void update_masses_serial(const StepInputs& in, const FaceCoefficients& fc, double dt, StepOutputs& out);
void update_masses_omp(const StepInputs& in, const FaceCoefficients& fc, double dt, StepOutputs& out);

}  // namespace sbr::kernels
