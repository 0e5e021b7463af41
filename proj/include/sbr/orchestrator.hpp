#pragma once

#include <string>
#include <vector>

#include "sbr/effluent.hpp"
#include "sbr/ledger.hpp"
#include "sbr/mixed_ode.hpp"
#include "sbr/scenario.hpp"
#include "sbr/settler.hpp"

namespace sbr {

struct OutletSample {
    double t = 0.0;
    double zbar = 0.0;
    std::vector<double> C_u, S_u, C_e, S_e;
};

/// Cell values at a sample time; zeros above the surface.
struct FieldSample {
    double t = 0.0;
    double zbar = 0.0;
    std::vector<double> C;  // cells * k_C
    std::vector<double> S;  // cells * k_S
    std::vector<double> X;
    std::vector<double> W;
};

struct ClosureLine {
    std::string name;
    double initial = 0.0, final = 0.0;
    double inflow = 0.0, underflow = 0.0, effluent = 0.0, reacted = 0.0;
    double residual = 0.0;  // final - initial - (inflow - underflow - effluent + reacted)
    double relative = 0.0;  // residual over the largest term
};

/// Tank-side extracted mass against the integral of Q_e C_e from the pipe
/// boundary history.
struct HandshakeLine {
    std::string name;
    double tank = 0.0;
    double pipe = 0.0;
    double relative = 0.0;
};

struct RunResult {
    std::vector<std::string> solid_names, soluble_names;
    std::vector<double> cell_centers;
    std::vector<OutletSample> outlets;
    std::vector<FieldSample> fields;
    MassLedger ledger;
    /// Cumulative ledger at the end of each stage.
    std::vector<MassLedger> stage_ledgers;
    EffluentHistory history;
    std::vector<double> initial_mass, final_mass;
    double final_volume = 0.0;
    MixtureState final_state;
    std::vector<ClosureLine> closure;
    std::vector<HandshakeLine> handshake;
    double tolerance = 1e-8;
    double wall_seconds = 0.0;

    double worst_closure() const;
    double worst_handshake() const;
    bool closed() const { return worst_closure() <= tolerance && worst_handshake() <= tolerance; }
};

/// Run all stages in order. Stage failures are rethrown as StageError.
RunResult run(const Scenario& scenario);

/// Volume-weighted average over the wet cells; V from the trajectory.
MixedState pde_to_ode(const MixtureState& state, double mixture_volume);
/// Uniform concentrations in the wet cells of the solver's grid.
MixtureState ode_to_pde(const MixedState& state, const SettlerSolver& solver);

/// W = rho_L (1 - X / rho_X) - sum S.
double water_concentration(double X, std::span<const double> S, const MaterialParams& p = {});

/// Closure lines from a ledger and the end-point masses.
std::vector<ClosureLine> ledger_closure(const MassLedger& ledger, const std::vector<double>& initial,
                                        const std::vector<double>& final, const std::vector<std::string>& names);

}  // namespace sbr
