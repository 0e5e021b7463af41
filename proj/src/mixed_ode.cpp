#include "sbr/mixed_ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "sbr/error.hpp"

namespace sbr {

MixedDerivatives ode_rhs(const MixedState& state, const Stage& stage, const ReactionModel& reactions) {
    if (!(state.V > 0.0)) throw ScheduleError("empty mixture in the mixed model", state.t);
    const std::size_t kc = reactions.k_C(), ks = reactions.k_S();
    MixedDerivatives d;
    d.dC.assign(kc, 0.0);
    d.dS.assign(ks, 0.0);
    reactions.reaction_terms(state.C, state.S, d.dC, d.dS);
    for (std::size_t k = 0; k < kc; ++k) d.dC[k] += stage.Q_f * (stage.C_f[k] - state.C[k]) / state.V;
    for (std::size_t k = 0; k < ks; ++k) d.dS[k] += stage.Q_f * (stage.S_f[k] - state.S[k]) / state.V;
    d.dV = stage.volume_rate();
    return d;
}

MixedOdeIntegrator::MixedOdeIntegrator(const ReactionModel& reactions, const SurfaceTrajectory& trajectory,
                                       const MaterialParams& material, MixedOptions options)
    : reactions_(reactions), trajectory_(trajectory), material_(material), options_(options) {
    if (!(options_.dt_max > 0.0) || !(options_.dt_min > 0.0) || options_.dt_min > options_.dt_max)
        throw DomainError("mixed model needs 0 < dt_min <= dt_max");
}

namespace {

// Mass-form right-hand side split into its ledger terms.
struct MassTerms {
    std::array<double, 2 * kMaxComponents> inflow{}, underflow{}, effluent{}, reacted{};
};

MassTerms mass_terms(const ReactionModel& reactions, const Stage& stage, std::span<const double> m, double V) {
    const std::size_t kc = reactions.k_C(), ks = reactions.k_S(), n = kc + ks;
    std::array<double, 2 * kMaxComponents> conc{};
    for (std::size_t i = 0; i < n; ++i) conc[i] = m[i] / V;
    std::array<double, kMaxComponents> R_C{}, R_S{};
    reactions.reaction_terms({conc.data(), kc}, {conc.data() + kc, ks}, {R_C.data(), kc}, {R_S.data(), ks});
    MassTerms t;
    for (std::size_t i = 0; i < n; ++i) {
        const double feed = i < kc ? stage.C_f[i] : stage.S_f[i - kc];
        t.inflow[i] = stage.Q_f * feed;
        t.underflow[i] = stage.Q_u * conc[i];
        t.effluent[i] = stage.Q_e * conc[i];
        t.reacted[i] = V * (i < kc ? R_C[i] : R_S[i - kc]);
    }
    return t;
}

}  // namespace

bool MixedOdeIntegrator::try_step(MixedState& state, const Stage& stage, double dt, MassLedger* ledger,
                                  EffluentHistory* history) const {
    return step_to(state, stage, state.t + dt, ledger, history);
}

bool MixedOdeIntegrator::step_to(MixedState& state, const Stage& stage, double t1, MassLedger* ledger,
                                 EffluentHistory* history) const {
    const std::size_t kc = reactions_.k_C(), ks = reactions_.k_S(), n = kc + ks;
    const double t0 = state.t, dt = t1 - t0, th = t0 + 0.5 * dt;
    const double V0 = trajectory_.volume(t0), Vh = trajectory_.volume(th), V1 = trajectory_.volume(t1);
    if (!(V0 > 0.0 && Vh > 0.0 && V1 > 0.0)) throw ScheduleError("empty mixture in the mixed model", t0);

    std::array<double, 2 * kMaxComponents> m0{}, m{};
    for (std::size_t k = 0; k < kc; ++k) m0[k] = V0 * state.C[k];
    for (std::size_t k = 0; k < ks; ++k) m0[kc + k] = V0 * state.S[k];

    const double weight[4] = {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};
    const double offset[4] = {0.0, 0.5, 0.5, 1.0};
    const double volume[4] = {V0, Vh, Vh, V1};
    MassTerms sum{};
    std::array<double, 2 * kMaxComponents> slope{};
    for (int s = 0; s < 4; ++s) {
        for (std::size_t i = 0; i < n; ++i) m[i] = m0[i] + offset[s] * dt * slope[i];
        const MassTerms t = mass_terms(reactions_, stage, {m.data(), n}, volume[s]);
        for (std::size_t i = 0; i < n; ++i) {
            slope[i] = t.inflow[i] - t.underflow[i] - t.effluent[i] + t.reacted[i];
            sum.inflow[i] += weight[s] * t.inflow[i];
            sum.underflow[i] += weight[s] * t.underflow[i];
            sum.effluent[i] += weight[s] * t.effluent[i];
            sum.reacted[i] += weight[s] * t.reacted[i];
        }
    }
    std::array<double, 2 * kMaxComponents> m1{};
    for (std::size_t i = 0; i < n; ++i) {
        m1[i] = m0[i] + dt * (sum.inflow[i] - sum.underflow[i] - sum.effluent[i] + sum.reacted[i]);
        if (!(m1[i] >= 0.0)) return false;
    }

    state.t = t1;
    state.V = V1;
    for (std::size_t k = 0; k < kc; ++k) state.C[k] = m1[k] / V1;
    for (std::size_t k = 0; k < ks; ++k) state.S[k] = m1[kc + k] / V1;

    double X = 0.0, Ssum = 0.0;
    for (double c : state.C) X += c;
    for (double s : state.S) Ssum += s;
    const double W = material_.rho_L * (1.0 - X / material_.rho_X) - Ssum;
    if (X > material_.X_max || W < 0.0) {
        std::ostringstream msg;
        msg << "mixed state left the invariant region at t = " << t1 << " s (X = " << X << ", W = " << W << ")";
        throw SchemeError(msg.str());
    }

    if (ledger) {
        for (std::size_t i = 0; i < n; ++i) {
            ledger->inflow[i] += dt * sum.inflow[i];
            ledger->underflow[i] += dt * sum.underflow[i];
            ledger->effluent[i] += dt * sum.effluent[i];
            ledger->reacted[i] += dt * sum.reacted[i];
        }
        InvariantStats& st = ledger->invariants;
        ++st.steps;
        for (double c : state.C) st.min_C = std::min(st.min_C, c);
        for (double s : state.S) st.min_S = std::min(st.min_S, s);
        st.max_X = std::max(st.max_X, X);
        st.min_W = std::min(st.min_W, W);
    }
    if (history && stage.Q_e > 0.0) {
        // Step-averaged outlet concentration, so the history integrates to
        // the extracted mass exactly.
        EffluentHistory::Entry e{t0, dt, stage.Q_e, std::vector<double>(kc), std::vector<double>(ks)};
        for (std::size_t k = 0; k < kc; ++k) e.C[k] = sum.effluent[k] / stage.Q_e;
        for (std::size_t k = 0; k < ks; ++k) e.S[k] = sum.effluent[kc + k] / stage.Q_e;
        history->append(std::move(e));
    }
    return true;
}

void MixedOdeIntegrator::advance(MixedState& state, const Stage& stage, double t_end, MassLedger* ledger,
                                 EffluentHistory* history) const {
    while (state.t < t_end) {
        double dt = std::min(options_.dt_max, t_end - state.t);
        // Avoid a sliver step at the end.
        if (t_end - state.t - dt < 1e-9 * options_.dt_max) dt = t_end - state.t;
        for (;;) {
            const double t1 = state.t + dt >= t_end ? t_end : state.t + dt;
            if (step_to(state, stage, t1, ledger, history)) break;
            dt *= 0.5;
            if (dt < options_.dt_min) {
                std::ostringstream msg;
                msg << "positivity could not be kept at t = " << state.t << " s even with dt < " << options_.dt_min
                    << " s";
                throw KineticsError(msg.str());
            }
        }
    }
}

void MixedOdeIntegrator::run_stage(MixedState& state, const Stage& stage, SampleClock& clock,
                                   const Observer& observe, MassLedger& ledger, EffluentHistory& history) const {
    if (stage.model != ModelKind::ODE) throw DomainError("mixed model run on a PDE stage");
    const double eps = 1e-9 * std::max(1.0, stage.t_end);
    for (;;) {
        while (clock.time() < stage.t_end - eps && clock.time() <= state.t + eps) {
            if (observe) observe(state);
            ++clock.next;
        }
        if (state.t >= stage.t_end - eps) break;
        advance(state, stage, std::min(stage.t_end, clock.time()), &ledger, &history);
    }
}

}  // namespace sbr
