#include "sbr/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "sbr/error.hpp"

namespace sbr {

double RunResult::worst_closure() const {
    double worst = 0.0;
    for (const auto& c : closure) worst = std::max(worst, c.relative);
    return worst;
}

double RunResult::worst_handshake() const {
    double worst = 0.0;
    for (const auto& h : handshake) worst = std::max(worst, h.relative);
    return worst;
}

double water_concentration(double X, std::span<const double> S, const MaterialParams& p) {
    double s = 0.0;
    for (double v : S) s += v;
    return p.rho_L * (1.0 - X / p.rho_X) - s;
}

MixedState pde_to_ode(const MixtureState& state, double mixture_volume) {
    if (!(mixture_volume > 0.0)) throw ScheduleError("empty mixture at model switch", state.t);
    MixedState m;
    m.t = state.t;
    m.V = mixture_volume;
    m.C.assign(state.k_C, 0.0);
    m.S.assign(state.k_S, 0.0);
    for (std::size_t j = state.top; j < state.cells(); ++j) {
        for (std::size_t k = 0; k < state.k_C; ++k) m.C[k] += state.volume[j] * state.C[j * state.k_C + k];
        for (std::size_t k = 0; k < state.k_S; ++k) m.S[k] += state.volume[j] * state.S[j * state.k_S + k];
    }
    for (auto& c : m.C) c /= mixture_volume;
    for (auto& s : m.S) s /= mixture_volume;
    return m;
}

MixtureState ode_to_pde(const MixedState& state, const SettlerSolver& solver) {
    if (!(state.V > 0.0)) throw ScheduleError("empty mixture at model switch", state.t);
    return solver.uniform_state(state.t, state.C, state.S);
}

std::vector<ClosureLine> ledger_closure(const MassLedger& ledger, const std::vector<double>& initial,
                                        const std::vector<double>& final, const std::vector<std::string>& names) {
    std::vector<ClosureLine> out;
    for (std::size_t i = 0; i < ledger.size(); ++i) {
        ClosureLine c;
        c.name = names[i];
        c.initial = initial[i];
        c.final = final[i];
        c.inflow = ledger.inflow[i];
        c.underflow = ledger.underflow[i];
        c.effluent = ledger.effluent[i];
        c.reacted = ledger.reacted[i];
        c.residual = (c.final - c.initial) - (c.inflow - c.underflow - c.effluent + c.reacted);
        const double scale = std::max({std::fabs(c.initial), std::fabs(c.final), std::fabs(c.inflow),
                                       std::fabs(c.underflow), std::fabs(c.effluent), std::fabs(c.reacted)});
        c.relative = scale > 0.0 ? std::fabs(c.residual) / scale : 0.0;
        out.push_back(c);
    }
    return out;
}

namespace {

FieldSample field_from(const MixtureState& s, const MaterialParams& p) {
    FieldSample f;
    f.t = s.t;
    f.zbar = s.zbar;
    f.C = s.C;
    f.S = s.S;
    f.X.assign(s.cells(), 0.0);
    f.W.assign(s.cells(), 0.0);
    for (std::size_t j = s.top; j < s.cells(); ++j) {
        f.X[j] = s.X(j);
        f.W[j] = s.W(j, p);
    }
    return f;
}

std::vector<double> mixed_mass(const MixedState& m) {
    std::vector<double> out;
    for (double c : m.C) out.push_back(m.V * c);
    for (double s : m.S) out.push_back(m.V * s);
    return out;
}

}  // namespace

RunResult run(const Scenario& sc) {
    const auto wall_start = std::chrono::steady_clock::now();
    sc.material.validate();
    const TankGeometry geometry = sc.geometry.build();
    const SettlingModel settling(sc.material);
    const ReactionModel reactions = sc.reactions.build();
    const std::size_t kc = reactions.k_C(), ks = reactions.k_S();
    const StageSchedule schedule(sc.stages, kc, ks);
    const SurfaceTrajectory trajectory(geometry, schedule, sc.zbar0);
    SolverOptions solver_options;
    solver_options.cfl_safety = sc.cfl_safety;
    const SettlerSolver solver(geometry, settling, reactions, schedule, trajectory, sc.cells, solver_options);
    MixedOptions mixed_options;
    mixed_options.dt_max = sc.ode_dt_max;
    const MixedOdeIntegrator mixed(reactions, trajectory, sc.material, mixed_options);

    RunResult r;
    r.solid_names = reactions.solid_names();
    r.soluble_names = reactions.soluble_names();
    for (std::size_t j = 0; j < sc.cells; ++j) r.cell_centers.push_back(solver.grid().center_z(j));
    r.tolerance = sc.ledger_tolerance;
    r.ledger = MassLedger(kc, ks);

    MixtureState pde = solver.state_from_profile(0.0, sc.initial);
    MixedState ode;
    bool in_pde = true;
    r.initial_mass = pde.total_mass();

    SampleClock clock{sc.output_interval, 0};
    const auto field_every =
        static_cast<std::size_t>(std::max(1.0, std::round(sc.field_interval / sc.output_interval)));
    const Stage* current = nullptr;

    auto record_pde = [&](const MixtureState& s) {
        OutletSample o;
        o.t = s.t;
        o.zbar = s.zbar;
        o.C_u = solver.underflow_solids(s);
        o.S_u = solver.underflow_substrates(s);
        o.C_e = solver.effluent_solids(s, current->Q_e);
        o.S_e = solver.effluent_substrates(s, current->Q_e);
        r.outlets.push_back(std::move(o));
        if (clock.next % field_every == 0) r.fields.push_back(field_from(s, sc.material));
    };
    auto record_ode = [&](const MixedState& m) {
        OutletSample o;
        o.t = m.t;
        o.zbar = trajectory.zbar(m.t);
        o.C_u = m.C;
        o.S_u = m.S;
        const bool extracting = current->Q_e > 0.0;
        o.C_e.assign(kc, 0.0);
        o.S_e.assign(ks, 0.0);
        if (extracting) {
            o.C_e = m.C;
            o.S_e = m.S;
        }
        r.outlets.push_back(std::move(o));
        if (clock.next % field_every == 0) r.fields.push_back(field_from(ode_to_pde(m, solver), sc.material));
    };

    const auto& stages = schedule.stages();
    for (std::size_t i = 0; i < stages.size(); ++i) {
        const Stage& stage = stages[i];
        current = &stage;
        try {
            if (stage.model == ModelKind::PDE) {
                if (!in_pde) {
                    pde = ode_to_pde(ode, solver);
                    in_pde = true;
                }
                solver.run_stage(pde, stage, clock, record_pde, r.ledger, r.history);
            } else {
                if (in_pde) {
                    ode = pde_to_ode(pde, trajectory.volume(pde.t));
                    in_pde = false;
                }
                mixed.run_stage(ode, stage, clock, record_ode, r.ledger, r.history);
            }
        } catch (const std::exception& e) {
            throw StageError(i, in_pde ? pde.t : ode.t, e.what());
        }
        r.stage_ledgers.push_back(r.ledger);
    }

    if (!stages.empty()) {
        // Final sample at T, in the last stage.
        clock.next = static_cast<std::size_t>(std::llround(schedule.end_time() / sc.output_interval));
        if (in_pde)
            record_pde(pde);
        else
            record_ode(ode);
    }

    r.final_state = in_pde ? pde : ode_to_pde(ode, solver);
    r.final_mass = in_pde ? pde.total_mass() : mixed_mass(ode);
    r.final_volume = trajectory.volume(schedule.end_time());

    std::vector<std::string> names = r.solid_names;
    names.insert(names.end(), r.soluble_names.begin(), r.soluble_names.end());
    r.closure = ledger_closure(r.ledger, r.initial_mass, r.final_mass, names);
    const double inf = std::numeric_limits<double>::infinity();
    auto pipe_C = r.history.extracted_solids(-inf, inf);
    auto pipe_S = r.history.extracted_substrates(-inf, inf);
    pipe_C.resize(kc, 0.0);
    pipe_S.resize(ks, 0.0);
    for (std::size_t i = 0; i < kc + ks; ++i) {
        HandshakeLine h;
        h.name = names[i];
        h.tank = r.ledger.effluent[i];
        h.pipe = i < kc ? pipe_C[i] : pipe_S[i - kc];
        const double scale = std::max(std::fabs(h.tank), std::fabs(h.pipe));
        h.relative = scale > 0.0 ? std::fabs(h.tank - h.pipe) / scale : 0.0;
        r.handshake.push_back(h);
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return r;
}

}  // namespace sbr
