#pragma once

#include <functional>
#include <span>
#include <vector>

#include "sbr/constitutive.hpp"
#include "sbr/effluent.hpp"
#include "sbr/geometry.hpp"
#include "sbr/ledger.hpp"
#include "sbr/reactions.hpp"

namespace sbr {

/// Homogeneous concentrations below the surface.
struct MixedState {
    double t = 0.0;
    double V = 0.0;  // mixture volume, m^3
    std::vector<double> C;
    std::vector<double> S;
};

struct MixedDerivatives {
    std::vector<double> dC;
    std::vector<double> dS;
    double dV = 0.0;
};

/// V dC/dt = Q_f (C_f - C) + V R_C, likewise for S; dV/dt = Qbar - Q_u.
/// Throws ScheduleError for an empty mixture.
MixedDerivatives ode_rhs(const MixedState& state, const Stage& stage, const ReactionModel& reactions);

struct MixedOptions {
    double dt_max = 1.0;   // s
    double dt_min = 1e-3;  // smallest step the positivity guard may try
};

/// Classical RK4 on the component masses m = V C with the exact (linear)
/// volume from the surface trajectory.
class MixedOdeIntegrator {
public:
    using Observer = std::function<void(const MixedState&)>;

    MixedOdeIntegrator(const ReactionModel& reactions, const SurfaceTrajectory& trajectory,
                       const MaterialParams& material, MixedOptions options = {});

    const MixedOptions& options() const noexcept { return options_; }

    /// One RK4 step of exactly dt (no halving). Returns false, leaving the
    /// state untouched, if the result would be negative.
    bool try_step(MixedState& state, const Stage& stage, double dt, MassLedger* ledger = nullptr,
                  EffluentHistory* history = nullptr) const;

    /// Advance to t_end with steps <= dt_max, halving on positivity failure.
    /// Throws KineticsError if a step below dt_min still fails.
    void advance(MixedState& state, const Stage& stage, double t_end, MassLedger* ledger = nullptr,
                 EffluentHistory* history = nullptr) const;

    /// Advance through an ODE stage, calling `observe` at each sample time in
    /// [state.t, stage.t_end).
    void run_stage(MixedState& state, const Stage& stage, SampleClock& clock, const Observer& observe,
                   MassLedger& ledger, EffluentHistory& history) const;

private:
    bool step_to(MixedState& state, const Stage& stage, double t1, MassLedger* ledger,
                 EffluentHistory* history) const;

    ReactionModel reactions_;
    SurfaceTrajectory trajectory_;
    MaterialParams material_;
    MixedOptions options_;
};

}  // namespace sbr
