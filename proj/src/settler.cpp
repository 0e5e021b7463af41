#include "sbr/settler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sbr/error.hpp"

namespace sbr {

Grid::Grid(const TankGeometry& geometry, std::size_t cells)
    : N_(cells), depth_(geometry.depth()), dz_(geometry.depth() / static_cast<double>(cells)) {
    if (cells < 10) throw DomainError("grid needs at least 10 cells");
    face_area_.resize(N_ + 1);
    volume_below_.resize(N_ + 1);
    for (std::size_t f = 0; f <= N_; ++f) {
        const double z = face_z(f);
        face_area_[f] = geometry.area(z);
        volume_below_[f] = geometry.volume_at(z);
    }
    volume_below_[N_] = 0.0;
}

std::size_t Grid::top_cell(double zbar) const noexcept {
    const double u = std::floor(zbar / dz_ - 0.5) + 1.0;
    if (u <= 0.0) return 0;
    const auto j = static_cast<std::size_t>(u);
    return std::min(j, N_ - 1);
}

double MixtureState::X(std::size_t j) const noexcept {
    double x = 0.0;
    for (std::size_t k = 0; k < k_C; ++k) x += C[j * k_C + k];
    return x;
}

double MixtureState::W(std::size_t j, const MaterialParams& p) const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < k_S; ++k) s += S[j * k_S + k];
    return p.rho_L * (1.0 - X(j) / p.rho_X) - s;
}

std::vector<double> MixtureState::total_mass() const {
    std::vector<double> m(k_C + k_S, 0.0);
    for (std::size_t j = top; j < cells(); ++j) {
        for (std::size_t k = 0; k < k_C; ++k) m[k] += volume[j] * C[j * k_C + k];
        for (std::size_t k = 0; k < k_S; ++k) m[k_C + k] += volume[j] * S[j * k_S + k];
    }
    return m;
}

SettlerSolver::SettlerSolver(const TankGeometry& geometry, const SettlingModel& settling,
                             const ReactionModel& reactions, const StageSchedule& schedule,
                             const SurfaceTrajectory& trajectory, std::size_t cells, SolverOptions options)
    : geometry_(geometry), settling_(settling), reactions_(reactions), schedule_(schedule),
      trajectory_(trajectory), grid_(geometry, cells), options_(options) {
    if (reactions_.k_C() > kMaxComponents || reactions_.k_S() > kMaxComponents)
        throw DomainError("too many components");
    if (!(options_.cfl_safety > 0.0 && options_.cfl_safety <= 1.0))
        throw DomainError("cfl_safety must lie in (0, 1]");
    if (!(options_.surface_motion > 0.0 && options_.surface_motion <= 0.5))
        throw DomainError("surface_motion must lie in (0, 0.5]");
}

namespace {

MixtureState empty_state(const Grid& grid, std::size_t kc, std::size_t ks) {
    MixtureState s;
    s.k_C = kc;
    s.k_S = ks;
    s.volume.assign(grid.cells(), 0.0);
    s.C.assign(grid.cells() * kc, 0.0);
    s.S.assign(grid.cells() * ks, 0.0);
    return s;
}

}  // namespace

MixtureState SettlerSolver::state_from_profile(double t, const std::vector<ProfileLayer>& layers) const {
    const std::size_t kc = reactions_.k_C(), ks = reactions_.k_S();
    for (const auto& layer : layers)
        if (layer.C.size() != kc || layer.S.size() != ks)
            throw DomainError("profile layer has the wrong number of components");
    MixtureState s = empty_state(grid_, kc, ks);
    s.t = t;
    s.zbar = trajectory_.zbar(t);
    s.top = grid_.top_cell(s.zbar);
    const double V = trajectory_.volume(t);
    for (std::size_t j = s.top; j < grid_.cells(); ++j) {
        const double lo = j == s.top ? s.zbar : grid_.face_z(j);
        const double hi = grid_.face_z(j + 1);
        s.volume[j] = j == s.top ? top_volume(V, j) : grid_.cell_volume(j);
        if (!(s.volume[j] > 0.0)) continue;
        for (const auto& layer : layers) {
            const double a = std::max(lo, layer.from), b = std::min(hi, layer.to);
            if (!(b > a)) continue;
            const double v = geometry_.volume_between(a, b);
            for (std::size_t k = 0; k < kc; ++k) s.C[j * kc + k] += v * layer.C[k] / s.volume[j];
            for (std::size_t k = 0; k < ks; ++k) s.S[j * ks + k] += v * layer.S[k] / s.volume[j];
        }
    }
    check_invariants(s);
    return s;
}

MixtureState SettlerSolver::uniform_state(double t, std::span<const double> C, std::span<const double> S) const {
    const std::size_t kc = reactions_.k_C(), ks = reactions_.k_S();
    if (C.size() != kc || S.size() != ks) throw DomainError("uniform_state: wrong number of components");
    MixtureState s = empty_state(grid_, kc, ks);
    s.t = t;
    s.zbar = trajectory_.zbar(t);
    s.top = grid_.top_cell(s.zbar);
    const double V = trajectory_.volume(t);
    for (std::size_t j = s.top; j < grid_.cells(); ++j) {
        s.volume[j] = j == s.top ? top_volume(V, j) : grid_.cell_volume(j);
        std::copy(C.begin(), C.end(), s.C.begin() + static_cast<std::ptrdiff_t>(j * kc));
        std::copy(S.begin(), S.end(), s.S.begin() + static_cast<std::ptrdiff_t>(j * ks));
    }
    check_invariants(s);
    return s;
}

kernels::StepInputs SettlerSolver::kernel_inputs(const MixtureState& state, const Stage& stage) const {
    kernels::StepInputs in;
    in.settling = &settling_;
    in.reactions = &reactions_;
    in.cells = grid_.cells();
    in.k_C = state.k_C;
    in.k_S = state.k_S;
    in.top = state.top;
    in.dz = grid_.dz();
    in.Q_f = stage.Q_f;
    in.Q_u = stage.Q_u;
    in.Q_e = stage.Q_e;
    in.surface_area = geometry_.area(state.zbar);
    const double w = state.volume[state.top];
    in.top_volume_floor = w;
    if (stage.volume_rate() < 0.0) {
        const double room = state.top > 0 ? std::min(w, grid_.cell_volume(state.top - 1)) : w;
        in.top_volume_floor = w - options_.surface_motion * room;
    }
    in.face_area = grid_.face_area();
    in.volume = state.volume;
    in.C = state.C;
    in.S = state.S;
    in.C_f = stage.C_f;
    in.S_f = stage.S_f;
    return in;
}

double SettlerSolver::cfl_dt(const MixtureState& state) const {
    const Stage& stage = schedule_.at(state.t);
    const auto in = kernel_inputs(state, stage);
    kernels::FaceCoefficients fc;
    std::vector<double> rate(grid_.cells(), 0.0);
    if (parallel()) {
        kernels::face_coefficients_omp(in, fc);
        kernels::stability_rates_omp(in, fc, rate);
    } else {
        kernels::face_coefficients_serial(in, fc);
        kernels::stability_rates_serial(in, fc, rate);
    }
    const double max_rate = *std::max_element(rate.begin(), rate.end());
    double dt = max_rate > 0.0 ? options_.cfl_safety / max_rate : std::numeric_limits<double>::infinity();
    const double vr = std::fabs(stage.volume_rate());
    if (vr > 0.0) {
        const double w = state.volume[state.top];
        const double room = state.top > 0 ? std::min(w, grid_.cell_volume(state.top - 1)) : w;
        dt = std::min(dt, options_.surface_motion * room / vr);
    }
    return dt;
}

void SettlerSolver::step(MixtureState& state, double dt, MassLedger* ledger, EffluentHistory* history) const {
    advance_to(state, state.t + dt, ledger, history);
}

void SettlerSolver::advance_to(MixtureState& state, double t_new, MassLedger* ledger,
                               EffluentHistory* history) const {
    const double dt = t_new - state.t;
    if (!(dt >= 0.0)) throw StepSizeError("negative time step");
    if (dt == 0.0) return;
    const Stage& stage = schedule_.at(state.t);
    if (t_new > stage.t_end * (1.0 + 1e-14) + 1e-12)
        throw StepSizeError("step crosses the end of stage '" + stage.label + "'");
    const double dt_max = cfl_dt(state);
    // Allow for the rounding of t + dt.
    const double slack = 1e-12 * dt_max + 8.0 * std::numeric_limits<double>::epsilon() * std::fabs(t_new);
    if (dt > dt_max + slack) {
        std::ostringstream msg;
        msg << "dt = " << dt << " s exceeds the stability bound " << dt_max << " s at t = " << state.t;
        throw StepSizeError(msg.str());
    }

    const auto in = kernel_inputs(state, stage);
    kernels::FaceCoefficients fc;
    kernels::StepOutputs out;
    if (parallel()) {
        kernels::face_coefficients_omp(in, fc);
        kernels::update_masses_omp(in, fc, dt, out);
    } else {
        kernels::face_coefficients_serial(in, fc);
        kernels::update_masses_serial(in, fc, dt, out);
    }
    const std::size_t N = grid_.cells(), kc = state.k_C, ks = state.k_S, top = state.top;
    for (std::size_t j = top; j < N; ++j)
        if (out.negative_factor[j]) {
            std::ostringstream msg;
            msg << "negative retention factor in cell " << j << " at t = " << state.t;
            throw SchemeError(msg.str());
        }

    if (ledger) {
        const std::size_t bottom = N - 1;
        for (std::size_t k = 0; k < kc; ++k) {
            ledger->inflow[k] += dt * stage.Q_f * stage.C_f[k];
            ledger->underflow[k] += dt * stage.Q_u * state.C[bottom * kc + k];
            ledger->effluent[k] += dt * fc.extraction.solids * state.C[top * kc + k];
        }
        for (std::size_t k = 0; k < ks; ++k) {
            ledger->inflow[kc + k] += dt * stage.Q_f * stage.S_f[k];
            ledger->underflow[kc + k] += dt * stage.Q_u * state.S[bottom * ks + k];
            ledger->effluent[kc + k] += dt * fc.extraction.substrates * state.S[top * ks + k];
        }
        for (std::size_t j = top; j < N; ++j)
            for (std::size_t k = 0; k < kc + ks; ++k) ledger->reacted[k] += out.reacted[j * (kc + ks) + k];
    }
    if (history && stage.Q_e > 0.0) {
        EffluentHistory::Entry e{state.t, dt, stage.Q_e, std::vector<double>(kc), std::vector<double>(ks)};
        for (std::size_t k = 0; k < kc; ++k) e.C[k] = fc.extraction.solids * state.C[top * kc + k] / stage.Q_e;
        for (std::size_t k = 0; k < ks; ++k)
            e.S[k] = fc.extraction.substrates * state.S[top * ks + k] / stage.Q_e;
        history->append(std::move(e));
    }

    // Move the surface: split the top cell when it rises past cell centers,
    // merge cells when it falls past them.
    const double V = trajectory_.volume(t_new);
    const double zbar = trajectory_.zbar(t_new);
    const std::size_t new_top = grid_.top_cell(zbar);
    std::vector<double>& mC = out.mass_C;
    std::vector<double>& mS = out.mass_S;
    std::vector<double> volume(N, 0.0);
    for (std::size_t j = std::max(top, new_top); j < N; ++j) volume[j] = grid_.cell_volume(j);
    if (new_top < top) {
        const double region = top_volume(V, top);
        // Ascending, so the old top mass is overwritten last.
        for (std::size_t j = new_top; j <= top; ++j) {
            volume[j] = j == new_top ? top_volume(V, j) : grid_.cell_volume(j);
            const double share = volume[j] / region;
            for (std::size_t k = 0; k < kc; ++k) mC[j * kc + k] = mC[top * kc + k] * share;
            for (std::size_t k = 0; k < ks; ++k) mS[j * ks + k] = mS[top * ks + k] * share;
        }
    } else if (new_top > top) {
        for (std::size_t j = top; j < new_top; ++j) {
            for (std::size_t k = 0; k < kc; ++k) {
                mC[new_top * kc + k] += mC[j * kc + k];
                mC[j * kc + k] = 0.0;
            }
            for (std::size_t k = 0; k < ks; ++k) {
                mS[new_top * ks + k] += mS[j * ks + k];
                mS[j * ks + k] = 0.0;
            }
        }
    }
    volume[new_top] = top_volume(V, new_top);

    state.t = t_new;
    state.zbar = zbar;
    state.top = new_top;
    state.volume = std::move(volume);
    std::fill(state.C.begin(), state.C.end(), 0.0);
    std::fill(state.S.begin(), state.S.end(), 0.0);
    for (std::size_t j = new_top; j < N; ++j) {
        const double w = state.volume[j];
        if (!(w > 0.0)) continue;
        for (std::size_t k = 0; k < kc; ++k) state.C[j * kc + k] = mC[j * kc + k] / w;
        for (std::size_t k = 0; k < ks; ++k) state.S[j * ks + k] = mS[j * ks + k] / w;
    }
    check_invariants(state);

    if (ledger) {
        InvariantStats& st = ledger->invariants;
        ++st.steps;
        const auto& p = settling_.params();
        for (std::size_t j = new_top; j < N; ++j) {
            for (std::size_t k = 0; k < kc; ++k) st.min_C = std::min(st.min_C, state.C[j * kc + k]);
            for (std::size_t k = 0; k < ks; ++k) st.min_S = std::min(st.min_S, state.S[j * ks + k]);
            st.max_X = std::max(st.max_X, state.X(j));
            st.min_W = std::min(st.min_W, state.W(j, p));
        }
    }
}

void SettlerSolver::run_stage(MixtureState& state, const Stage& stage, SampleClock& clock, const Observer& observe,
                              MassLedger& ledger, EffluentHistory& history) const {
    if (stage.model != ModelKind::PDE) throw DomainError("run_stage needs a PDE stage");
    const double eps = 1e-9 * std::max(1.0, stage.t_end);
    if (state.t < stage.t_start - eps || state.t > stage.t_end + eps)
        throw DomainError("state time outside the stage");
    for (;;) {
        while (clock.time() < stage.t_end - eps && clock.time() <= state.t + eps) {
            if (observe) observe(state);
            ++clock.next;
        }
        if (state.t >= stage.t_end - eps) break;
        const double target = std::min(stage.t_end, clock.time());
        const double dt = cfl_dt(state);
        if (state.t + dt >= target)
            advance_to(state, target, &ledger, &history);
        else
            advance_to(state, state.t + dt, &ledger, &history);
    }
    state.t = std::max(state.t, stage.t_end);
}

void SettlerSolver::check_invariants(const MixtureState& state) const {
    const auto& p = settling_.params();
    const std::size_t kc = state.k_C, ks = state.k_S;
    auto fail = [&](std::size_t j, const std::string& what) {
        std::ostringstream msg;
        msg << what << " in cell " << j << " at t = " << state.t << " s";
        throw SchemeError(msg.str());
    };
    for (std::size_t j = 0; j < state.cells(); ++j) {
        const bool wet = j >= state.top;
        for (std::size_t k = 0; k < kc; ++k) {
            const double c = state.C[j * kc + k];
            if (!(c >= 0.0)) fail(j, "negative or NaN solids concentration");
            if (!wet && c != 0.0) fail(j, "solids above the surface");
        }
        for (std::size_t k = 0; k < ks; ++k) {
            const double s = state.S[j * ks + k];
            if (!(s >= 0.0)) fail(j, "negative or NaN substrate concentration");
            if (!wet && s != 0.0) fail(j, "substrate above the surface");
        }
        if (!wet) continue;
        if (state.X(j) > p.X_max) fail(j, "X exceeds X_max");
        if (state.W(j, p) < 0.0) fail(j, "negative water concentration");
    }
}

std::vector<double> SettlerSolver::underflow_solids(const MixtureState& state) const {
    const auto c = state.C_at(state.cells() - 1);
    return {c.begin(), c.end()};
}

std::vector<double> SettlerSolver::underflow_substrates(const MixtureState& state) const {
    const auto s = state.S_at(state.cells() - 1);
    return {s.begin(), s.end()};
}

ExtractionRates SettlerSolver::extraction(const MixtureState& state, double Q_e) const {
    if (!(Q_e > 0.0)) return {};
    const double X = state.X(state.top);
    double dDdz = 0.0;
    if (state.top + 1 < state.cells())
        dDdz = (settling_.D(state.X(state.top + 1)) - settling_.D(X)) / grid_.dz();
    return surface_extraction(settling_, X, dDdz, geometry_.area(state.zbar), Q_e);
}

std::vector<double> SettlerSolver::effluent_solids(const MixtureState& state, double Q_e) const {
    std::vector<double> out(state.k_C, 0.0);
    const auto e = extraction(state, Q_e);
    for (std::size_t k = 0; k < state.k_C; ++k) out[k] = Q_e > 0.0 ? e.solids * state.C[state.top * state.k_C + k] / Q_e : 0.0;
    return out;
}

std::vector<double> SettlerSolver::effluent_substrates(const MixtureState& state, double Q_e) const {
    std::vector<double> out(state.k_S, 0.0);
    const auto e = extraction(state, Q_e);
    for (std::size_t k = 0; k < state.k_S; ++k)
        out[k] = Q_e > 0.0 ? e.substrates * state.S[state.top * state.k_S + k] / Q_e : 0.0;
    return out;
}

}  // namespace sbr
