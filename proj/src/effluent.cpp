#include "sbr/effluent.hpp"

#include <algorithm>

#include "sbr/error.hpp"

namespace sbr {

std::vector<double> coupling_flux_solids(const SettlingModel& settling, std::span<const double> C, double X,
                                         double dDdz, double area, double Q_e) {
    if (!(Q_e > 0.0)) throw DomainError("coupling flux is only defined while extracting (Q_e > 0)");
    const double bracket = area * (settling.v_hs(X) - dDdz) - Q_e;
    std::vector<double> phi(C.size());
    for (std::size_t k = 0; k < C.size(); ++k) phi[k] = bracket * C[k];
    return phi;
}

std::vector<double> coupling_flux_substrates(const SettlingModel& settling, std::span<const double> S, double X,
                                             double dDdz, double area, double Q_e) {
    if (!(Q_e > 0.0)) throw DomainError("coupling flux is only defined while extracting (Q_e > 0)");
    const double rho_X = settling.params().rho_X;
    if (X >= rho_X) throw DomainError("coupling_flux_substrates: X >= rho_X");
    const double bracket = -(area * X * (settling.v_hs(X) - dDdz) / (rho_X - X) + Q_e);
    std::vector<double> phi(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) phi[k] = bracket * S[k];
    return phi;
}

std::vector<double> pipe_boundary_value(std::span<const double> phi, double Q_e) {
    if (!(Q_e > 0.0)) throw DomainError("pipe boundary value undefined for Q_e = 0");
    std::vector<double> out(phi.size());
    for (std::size_t k = 0; k < phi.size(); ++k) out[k] = -phi[k] / Q_e;
    return out;
}

ExtractionRates surface_extraction(const SettlingModel& settling, double X, double dDdz, double area,
                                   double Q_e) noexcept {
    if (!(Q_e > 0.0)) return {};
    const double phi = X / settling.params().rho_X;
    double solids = std::max(0.0, Q_e - area * (settling.v_hs_unchecked(X) - dDdz));
    // Cannot remove more solids volume than the extracted volume.
    if (phi > 0.0) solids = std::min(solids, Q_e / phi);
    const double liquid_volume = std::max(0.0, Q_e - solids * phi);
    return {solids, liquid_volume / (1.0 - phi)};
}

namespace {

std::vector<double> integrate(const std::vector<EffluentHistory::Entry>& entries, double t0, double t1,
                              bool solids) {
    std::vector<double> total;
    for (const auto& e : entries) {
        if (e.t < t0 || e.t >= t1) continue;
        const auto& v = solids ? e.C : e.S;
        if (total.empty()) total.assign(v.size(), 0.0);
        for (std::size_t k = 0; k < v.size(); ++k) total[k] += e.dt * e.Q_e * v[k];
    }
    return total;
}

}  // namespace

std::vector<double> EffluentHistory::extracted_solids(double t0, double t1) const {
    return integrate(entries_, t0, t1, true);
}

std::vector<double> EffluentHistory::extracted_substrates(double t0, double t1) const {
    return integrate(entries_, t0, t1, false);
}

const EffluentHistory::Entry* PipeModel::entry_at(double x, double t) const {
    // Walk back from t accumulating extracted volume until it reaches A_e x.
    double remaining = area_ * x;
    const auto& es = history_->entries();
    for (auto it = es.rbegin(); it != es.rend(); ++it) {
        if (it->t >= t) continue;
        const double span = std::min(it->dt, t - it->t);
        const double vol = it->Q_e * span;
        if (remaining <= vol) return &*it;
        remaining -= vol;
    }
    return nullptr;
}

std::vector<double> PipeModel::solids_at(double x, double t, std::size_t k_C) const {
    const auto* e = entry_at(x, t);
    return e ? e->C : std::vector<double>(k_C, 0.0);
}

std::vector<double> PipeModel::substrates_at(double x, double t, std::size_t k_S) const {
    const auto* e = entry_at(x, t);
    return e ? e->S : std::vector<double>(k_S, 0.0);
}

}  // namespace sbr
