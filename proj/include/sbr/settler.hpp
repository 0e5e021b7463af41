#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "sbr/constitutive.hpp"
#include "sbr/effluent.hpp"
#include "sbr/geometry.hpp"
#include "sbr/ledger.hpp"
#include "sbr/reactions.hpp"
#include "sbr/settler_kernels.hpp"

namespace sbr {

/// Uniform grid of N cells on [0, B], z pointing down. Face f is at f * dz.
class Grid {
public:
    Grid(const TankGeometry& geometry, std::size_t cells);

    std::size_t cells() const noexcept { return N_; }
    double dz() const noexcept { return dz_; }
    double depth() const noexcept { return depth_; }
    double face_z(std::size_t f) const noexcept { return f == N_ ? depth_ : dz_ * static_cast<double>(f); }
    double center_z(std::size_t j) const noexcept { return dz_ * (static_cast<double>(j) + 0.5); }
    const std::vector<double>& face_area() const noexcept { return face_area_; }
    /// Tank volume below face f.
    double volume_below(std::size_t f) const noexcept { return volume_below_[f]; }
    double cell_volume(std::size_t j) const noexcept { return volume_below_[j] - volume_below_[j + 1]; }
    /// Topmost wet cell for a surface at zbar: the first cell whose center
    /// lies strictly below zbar, clamped to the bottom cell.
    std::size_t top_cell(double zbar) const noexcept;

private:
    std::size_t N_;
    double depth_;
    double dz_;
    std::vector<double> face_area_;
    std::vector<double> volume_below_;
};

/// Cell-averaged state. Cells above `top` are dry and hold zeros; the top
/// cell holds the mixture between zbar and its lower face, so the wet
/// volumes add up to the mixture volume.
struct MixtureState {
    double t = 0.0;
    double zbar = 0.0;
    std::size_t top = 0;
    std::size_t k_C = 0;
    std::size_t k_S = 0;
    std::vector<double> volume;
    std::vector<double> C;  // cells * k_C
    std::vector<double> S;  // cells * k_S

    std::size_t cells() const noexcept { return volume.size(); }
    std::span<const double> C_at(std::size_t j) const { return {C.data() + j * k_C, k_C}; }
    std::span<const double> S_at(std::size_t j) const { return {S.data() + j * k_S, k_S}; }
    double X(std::size_t j) const noexcept;
    /// Water concentration rho_L (1 - X / rho_X) - sum S in wet cells.
    double W(std::size_t j, const MaterialParams& p) const noexcept;
    /// Total mass per component, solids then solubles.
    std::vector<double> total_mass() const;
};

/// Piecewise-constant initial profile: layers [from, to) in depth.
struct ProfileLayer {
    double from = 0.0;
    double to = 0.0;
    std::vector<double> C;
    std::vector<double> S;
};

struct SolverOptions {
    double cfl_safety = 0.9;
    /// Fraction of the top-cell volume the surface may sweep per step.
    double surface_motion = 0.25;
    /// Grids at least this large use the OpenMP kernels.
    std::size_t parallel_threshold = 4096;
};

/// Explicit finite-volume solver for the settling stages. Owns copies of
/// the models it uses.
class SettlerSolver {
public:
    using Observer = std::function<void(const MixtureState&)>;

    SettlerSolver(const TankGeometry& geometry, const SettlingModel& settling, const ReactionModel& reactions,
                  const StageSchedule& schedule, const SurfaceTrajectory& trajectory, std::size_t cells,
                  SolverOptions options = {});

    const Grid& grid() const noexcept { return grid_; }
    const SettlingModel& settling() const noexcept { return settling_; }
    const ReactionModel& reactions() const noexcept { return reactions_; }
    const SurfaceTrajectory& trajectory() const noexcept { return trajectory_; }
    const SolverOptions& options() const noexcept { return options_; }

    MixtureState state_from_profile(double t, const std::vector<ProfileLayer>& layers) const;
    MixtureState uniform_state(double t, std::span<const double> C, std::span<const double> S) const;

    /// Largest stable step from the current state (s).
    double cfl_dt(const MixtureState& state) const;

    /// One explicit step. Throws StepSizeError if dt exceeds cfl_dt and
    /// SchemeError if the result leaves the invariant region.
    void step(MixtureState& state, double dt, MassLedger* ledger = nullptr,
              EffluentHistory* history = nullptr) const;
    /// Step to exactly t_new.
    void advance_to(MixtureState& state, double t_new, MassLedger* ledger = nullptr,
                    EffluentHistory* history = nullptr) const;

    /// Advance through a PDE stage, calling `observe` at each sample time in
    /// [state.t, stage.t_end).
    void run_stage(MixtureState& state, const Stage& stage, SampleClock& clock, const Observer& observe,
                   MassLedger& ledger, EffluentHistory& history) const;

    /// Throws SchemeError unless C, S >= 0, X <= X_max, W >= 0 and dry cells
    /// are empty.
    void check_invariants(const MixtureState& state) const;

    /// Underflow concentrations: the bottom cell.
    std::vector<double> underflow_solids(const MixtureState& state) const;
    std::vector<double> underflow_substrates(const MixtureState& state) const;
    /// Effluent pipe boundary values at the current state; zero unless Q_e > 0.
    std::vector<double> effluent_solids(const MixtureState& state, double Q_e) const;
    std::vector<double> effluent_substrates(const MixtureState& state, double Q_e) const;

    /// Kernel inputs for the state under `stage` (exposed for the benchmark).
    kernels::StepInputs kernel_inputs(const MixtureState& state, const Stage& stage) const;

private:
    ExtractionRates extraction(const MixtureState& state, double Q_e) const;
    double top_volume(double mixture_volume, std::size_t top) const noexcept {
        return mixture_volume - grid_.volume_below(top + 1);
    }
    bool parallel() const noexcept { return grid_.cells() >= options_.parallel_threshold; }

    TankGeometry geometry_;
    SettlingModel settling_;
    ReactionModel reactions_;
    StageSchedule schedule_;
    SurfaceTrajectory trajectory_;
    Grid grid_;
    SolverOptions options_;
};

}  // namespace sbr
