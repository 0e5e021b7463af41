#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sbr/constitutive.hpp"

namespace sbr {

/// Mass flux through the surface during extraction, relative to the moving
/// surface and positive downward (kg/s per component):
///   Phi_C,e = (A(zbar) (v_hs(X) - dD/dz) - Q_e) C   at zbar+.
/// Throws DomainError for Q_e <= 0 (no effluent outside extraction).
std::vector<double> coupling_flux_solids(const SettlingModel& settling, std::span<const double> C, double X,
                                         double dDdz, double area, double Q_e);

/// Phi_S,e = -(A(zbar) X (v_hs(X) - dD/dz) / (rho_X - X) + Q_e) S   at zbar+.
std::vector<double> coupling_flux_substrates(const SettlingModel& settling, std::span<const double> S, double X,
                                             double dDdz, double area, double Q_e);

/// Pipe boundary value C~(0+) = -Phi / Q_e.
std::vector<double> pipe_boundary_value(std::span<const double> phi, double Q_e);

/// Specific extraction rates (m^3/s) used by the discrete scheme: solids
/// leave the top cell at `solids * C`, substrates at `substrates * S`.
///
/// The solids rate is the coupling bracket upwinded on the solids velocity
/// relative to the surface: if solids settle away from a descending surface
/// faster than it moves, none cross. The liquid takes the rest of Q_e, so
/// exactly Q_e m^3/s of mixture leaves. Coincides with the coupling fluxes
/// whenever the bracket is nonnegative.
struct ExtractionRates {
    double solids = 0.0;
    double substrates = 0.0;
};
ExtractionRates surface_extraction(const SettlingModel& settling, double X, double dDdz, double area,
                                   double Q_e) noexcept;

/// Append-only record of pipe boundary values C~(0+, t), S~(0+, t), one
/// entry per extraction step. Values are constant over [t, t + dt).
class EffluentHistory {
public:
    struct Entry {
        double t;
        double dt;
        double Q_e;
        std::vector<double> C;
        std::vector<double> S;
    };

    void append(Entry e) { entries_.push_back(std::move(e)); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

    /// Integral of Q_e C_e dt (solids) and Q_e S_e dt over [t0, t1]; entries
    /// are counted when they start inside the window.
    std::vector<double> extracted_solids(double t0, double t1) const;
    std::vector<double> extracted_substrates(double t0, double t1) const;

private:
    std::vector<Entry> entries_;
};

/// Effluent pipe x >= 0 attached to the surface. Pure advection, so the
/// profile is the delayed boundary history: a parcel at x entered when the
/// extracted volume since then equals A_e x.
class PipeModel {
public:
    PipeModel(double pipe_area_m2, const EffluentHistory& history) : area_(pipe_area_m2), history_(&history) {}

    double area() const noexcept { return area_; }
    /// Solids in the pipe at (x, t); zero where the pipe holds water from
    /// before the recorded history.
    std::vector<double> solids_at(double x, double t, std::size_t k_C) const;
    std::vector<double> substrates_at(double x, double t, std::size_t k_S) const;

private:
    const EffluentHistory::Entry* entry_at(double x, double t) const;
    double area_;
    const EffluentHistory* history_;
};

}  // namespace sbr
