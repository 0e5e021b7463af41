#include "sbr/reactions.hpp"

#include <array>

#include "sbr/error.hpp"

namespace sbr {

ReactionModel::ReactionModel(std::vector<std::string> solid_names, std::vector<std::string> soluble_names,
                             std::vector<double> sigma_C, std::vector<double> sigma_S,
                             std::shared_ptr<const RateLaw> law)
    : solid_names_(std::move(solid_names)),
      soluble_names_(std::move(soluble_names)),
      sigma_C_(std::move(sigma_C)),
      sigma_S_(std::move(sigma_S)),
      law_(std::move(law)) {
    if (!law_) throw DomainError("reaction model needs a rate law");
    const std::size_t kr = law_->k_r();
    if (k_C() == 0) throw DomainError("reaction model needs at least one solid component");
    if (k_C() > kMaxComponents || k_S() > kMaxComponents || kr > kMaxComponents)
        throw DomainError("too many components");
    if (sigma_C_.size() != k_C() * kr || sigma_S_.size() != k_S() * kr)
        throw DomainError("stoichiometric matrix dimensions do not match the registry and rate vector");
    for (std::size_t l = 0; l < kr; ++l) {
        for (std::size_t k = 0; k < k_C(); ++k)
            if (this->sigma_C(k, l) < 0.0 && !law_->factorizes(l, {Phase::Solid, k}))
                throw DomainError("rate " + std::to_string(l) + " consumes " + solid_names_[k] +
                                  " but is not proportional to it");
        for (std::size_t k = 0; k < k_S(); ++k)
            if (this->sigma_S(k, l) < 0.0 && !law_->factorizes(l, {Phase::Soluble, k}))
                throw DomainError("rate " + std::to_string(l) + " consumes " + soluble_names_[k] +
                                  " but is not proportional to it");
    }
}

void ReactionModel::rates(std::span<const double> C, std::span<const double> S, std::span<double> r) const {
    law_->rates(C, S, r);
}

void ReactionModel::reaction_terms(std::span<const double> C, std::span<const double> S, std::span<double> R_C,
                                   std::span<double> R_S) const {
    if (C.size() != k_C() || S.size() != k_S() || R_C.size() != k_C() || R_S.size() != k_S())
        throw DomainError("reaction_terms: dimension mismatch");
    std::array<double, kMaxComponents> r{};
    const std::size_t kr = k_r();
    law_->rates(C, S, std::span<double>(r.data(), kr));
    for (std::size_t k = 0; k < k_C(); ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < kr; ++l) acc += sigma_C(k, l) * r[l];
        R_C[k] = acc;
    }
    for (std::size_t k = 0; k < k_S(); ++k) {
        double acc = 0.0;
        for (std::size_t l = 0; l < kr; ++l) acc += sigma_S(k, l) * r[l];
        R_S[k] = acc;
    }
}

ReactionModel::Totals ReactionModel::total_rates(std::span<const double> C, std::span<const double> S) const {
    std::array<double, kMaxComponents> rc{};
    std::array<double, kMaxComponents> rs{};
    reaction_terms(C, S, std::span<double>(rc.data(), k_C()), std::span<double>(rs.data(), k_S()));
    Totals t{0.0, 0.0};
    for (std::size_t k = 0; k < k_C(); ++k) t.solids += rc[k];
    for (std::size_t k = 0; k < k_S(); ++k) t.solubles += rs[k];
    return t;
}

void ReactionModel::split(std::span<const double> C, std::span<const double> S, std::span<double> prod_C,
                          std::span<double> cons_C, std::span<double> prod_S, std::span<double> cons_S) const {
    std::array<double, kMaxComponents> r{};
    const std::size_t kr = k_r();
    law_->rates(C, S, std::span<double>(r.data(), kr));
    for (std::size_t k = 0; k < k_C(); ++k) {
        double p = 0.0, c = 0.0;
        for (std::size_t l = 0; l < kr; ++l) {
            const double s = sigma_C(k, l);
            if (s > 0.0)
                p += s * r[l];
            else if (s < 0.0)
                c -= s * law_->factor(l, {Phase::Solid, k}, C, S);
        }
        prod_C[k] = p;
        cons_C[k] = c;
    }
    for (std::size_t k = 0; k < k_S(); ++k) {
        double p = 0.0, c = 0.0;
        for (std::size_t l = 0; l < kr; ++l) {
            const double s = sigma_S(k, l);
            if (s > 0.0)
                p += s * r[l];
            else if (s < 0.0)
                c -= s * law_->factor(l, {Phase::Soluble, k}, C, S);
        }
        prod_S[k] = p;
        cons_S[k] = c;
    }
}

ReactionModel make_inert_model(std::vector<std::string> solid_names, std::vector<std::string> soluble_names) {
    return ReactionModel(std::move(solid_names), std::move(soluble_names), {}, {},
                         std::make_shared<NoReactions>());
}

void DenitrificationParams::validate() const {
    if (!(Y > 0.0 && Y < 1.0)) throw DomainError("denitrification: need 0 < Y < 1");
    if (!(f_P >= 0.0 && f_P <= 1.0)) throw DomainError("denitrification: need 0 <= f_P <= 1");
    if (!(b > 0.0 && mu_max > 0.0 && K_NO3 > 0.0 && K_S > 0.0))
        throw DomainError("denitrification: rates and half-saturations must be positive");
}

DenitrificationRates::DenitrificationRates(const DenitrificationParams& p) : p_(p) { p_.validate(); }

double DenitrificationRates::mu(std::span<const double> S) const noexcept {
    return p_.mu_max * S[0] / (p_.K_NO3 + S[0]) * S[1] / (p_.K_S + S[1]);
}

double DenitrificationRates::growth_rate(std::span<const double> S) const {
    if (S.size() < 2) throw DomainError("growth_rate: needs (S_NO3, S_S, ...)");
    for (double s : S)
        if (s < 0.0) throw DomainError("growth_rate: negative substrate concentration");
    return mu(S);
}

void DenitrificationRates::rates(std::span<const double> C, std::span<const double> S, std::span<double> r) const {
    r[0] = C[0] * mu(S);
    r[1] = C[0] * p_.b;
}

bool DenitrificationRates::factorizes(std::size_t l, ComponentRef c) const noexcept {
    if (c.phase == Phase::Solid) return c.index == 0 && l < 2;  // both rates carry X_OHO
    return l == 0 && (c.index == 0 || c.index == 1);           // growth carries S_NO3 and S_S
}

double DenitrificationRates::factor(std::size_t l, ComponentRef c, std::span<const double> C,
                                    std::span<const double> S) const {
    if (c.phase == Phase::Solid) return l == 0 ? mu(S) : p_.b;
    const double no3 = S[0], ss = S[1];
    if (c.index == 0) return p_.mu_max * C[0] / (p_.K_NO3 + no3) * ss / (p_.K_S + ss);
    return p_.mu_max * C[0] * no3 / (p_.K_NO3 + no3) / (p_.K_S + ss);
}

std::vector<double> denitrification_sigma_C(const DenitrificationParams& p) {
    return {1.0, -1.0,  //
            0.0, p.f_P};
}

std::vector<double> denitrification_sigma_S(const DenitrificationParams& p) {
    return {-p.Y_bar(), 0.0,           //
            -1.0 / p.Y, 1.0 - p.f_P,  //
            p.Y_bar(), 0.0};
}

ReactionModel make_denitrification_model(const DenitrificationParams& p) {
    return ReactionModel(kDenitrificationSolids, kDenitrificationSolubles, denitrification_sigma_C(p),
                         denitrification_sigma_S(p), std::make_shared<DenitrificationRates>(p));
}

}  // namespace sbr
