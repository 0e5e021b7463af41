#include "sbr/constitutive.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <string>

#include "sbr/error.hpp"

namespace sbr {

namespace {
constexpr std::size_t kTableIntervals = 10000;
}

void MaterialParams::validate() const {
    if (!(rho_X > X_max)) throw DomainError("material: need rho_X > X_max");
    if (!(rho_L > 0.0 && rho_L < rho_X)) throw DomainError("material: need 0 < rho_L < rho_X");
    if (!(g > 0.0)) throw DomainError("material: need g > 0");
    if (!(v0 > 0.0)) throw DomainError("material: need v0 > 0");
    if (!(X_scale > 0.0)) throw DomainError("material: need X_scale > 0");
    if (!(eta > 0.0)) throw DomainError("material: need eta > 0");
    if (!(alpha >= 0.0)) throw DomainError("material: need alpha >= 0");
    if (!(X_crit > 0.0 && X_crit < X_max)) throw DomainError("material: need 0 < X_crit < X_max");
}

SettlingModel::SettlingModel(const MaterialParams& params) : p_(params) {
    p_.validate();
    compression_factor_ = p_.rho_X * p_.alpha / (p_.g * p_.delta_rho());

    // f'(X) = v0 (1 + (1 - eta) s) / (1 + s)^2 with s = (X/X_scale)^eta.
    const auto slope = [&](double X) {
        const double s = std::pow(X / p_.X_scale, p_.eta);
        return p_.v0 * (1.0 + (1.0 - p_.eta) * s) / ((1.0 + s) * (1.0 + s));
    };
    if (p_.eta > 1.0) {
        X_peak_ = std::min(p_.X_max, p_.X_scale * std::pow(p_.eta - 1.0, -1.0 / p_.eta));
        max_slope_ = std::max(std::abs(slope(0.0)), std::abs(slope(p_.X_max)));
        // Most negative slope at s = (1 + eta) / (eta - 1).
        const double X_s = p_.X_scale * std::pow((1.0 + p_.eta) / (p_.eta - 1.0), 1.0 / p_.eta);
        if (X_s < p_.X_max) max_slope_ = std::max(max_slope_, std::abs(slope(X_s)));
    } else {
        X_peak_ = p_.X_max;
        max_slope_ = p_.v0;
    }
    D_table_.build([this](double s) { return d_above(s); }, p_.X_crit, p_.X_max);
    D_flux_table_.build([this](double s) { return v_hs_unchecked(s) * compression_factor_; }, p_.X_crit,
                        p_.X_max);
}

void SettlingModel::check(double X, const char* what) const {
    if (!(X >= 0.0 && X <= p_.X_max))
        throw DomainError(std::string(what) + ": concentration " + std::to_string(X) + " outside [0, X_max]");
}

double SettlingModel::v_hs(double X) const {
    check(X, "v_hs");
    return v_hs_unchecked(X);
}

double SettlingModel::d_above(double X) const noexcept {
    return v_hs_unchecked(X) * compression_factor_ / X;
}

double SettlingModel::d_compress(double X) const {
    check(X, "d_compress");
    return X <= p_.X_crit ? 0.0 : d_above(X);
}

double SettlingModel::max_d_on(double lo, double hi) const {
    if (hi <= p_.X_crit) return 0.0;
    // d is decreasing above X_crit.
    return d_above(std::max(lo, p_.X_crit));
}

template <class Integrand>
void SettlingModel::PrimitiveTable::build(const Integrand& g, double lo, double hi) {
    a = lo;
    h = (hi - lo) / kTableIntervals;
    F.assign(kTableIntervals + 1, 0.0);
    f.assign(kTableIntervals + 1, 0.0);
    for (std::size_t i = 0; i <= kTableIntervals; ++i) {
        const double x = a + h * static_cast<double>(i);
        f[i] = g(x);
        if (i > 0) {
            const double x0 = a + h * static_cast<double>(i - 1);
            F[i] = F[i - 1] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, x0, x, 0, 0.0);
        }
    }
    // Fritsch-Carlson: keep each Hermite piece monotone.
    for (std::size_t i = 0; i < kTableIntervals; ++i) {
        const double secant = (F[i + 1] - F[i]) / h;
        if (secant <= 0.0) continue;
        const double al = f[i] / secant;
        const double be = f[i + 1] / secant;
        const double r2 = al * al + be * be;
        if (r2 > 9.0) {
            const double tau = 3.0 / std::sqrt(r2);
            f[i] *= tau;
            f[i + 1] *= tau;
        }
    }
}

double SettlingModel::PrimitiveTable::eval(double X) const noexcept {
    const double u = (X - a) / h;
    std::size_t i = u > 0.0 ? static_cast<std::size_t>(u) : 0;
    if (i >= kTableIntervals) i = kTableIntervals - 1;
    const double t = u - static_cast<double>(i);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + t;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    return h00 * F[i] + h10 * h * f[i] + h01 * F[i + 1] + h11 * h * f[i + 1];
}

double SettlingModel::D(double X) const {
    check(X, "D");
    return D_unchecked(X);
}

double SettlingModel::D_quadrature(double X) const {
    check(X, "D_quadrature");
    if (X <= p_.X_crit) return 0.0;
    const auto integrand = [this](double s) { return d_above(s); };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, p_.X_crit, X, 15, 1e-13);
}

double SettlingModel::d_flux(double X) const {
    check(X, "d_flux");
    return X <= p_.X_crit ? 0.0 : v_hs_unchecked(X) * compression_factor_;
}

double SettlingModel::D_flux(double X) const {
    check(X, "D_flux");
    return D_flux_unchecked(X);
}

double SettlingModel::D_flux_quadrature(double X) const {
    check(X, "D_flux_quadrature");
    if (X <= p_.X_crit) return 0.0;
    const auto integrand = [this](double s) { return v_hs_unchecked(s) * compression_factor_; };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, p_.X_crit, X, 15, 1e-13);
}

double SettlingModel::max_d_flux_on(double lo, double hi) const {
    if (hi <= p_.X_crit) return 0.0;
    // X d(X) is a multiple of v_hs above X_crit, hence decreasing.
    return v_hs_unchecked(std::max(lo, p_.X_crit)) * compression_factor_;
}

double SettlingModel::batch_flux(double X) const {
    check(X, "batch_flux");
    return batch_flux_unchecked(X);
}

double SettlingModel::godunov_unchecked(double a, double b) const noexcept {
    const double fa = batch_flux_unchecked(a);
    const double fb = batch_flux_unchecked(b);
    if (a <= b) return std::min(fa, fb);  // f is unimodal: interval minimum sits at an end
    if (b <= X_peak_ && X_peak_ <= a) return batch_flux_unchecked(X_peak_);
    return std::max(fa, fb);
}

double SettlingModel::godunov_flux(double X_left, double X_right) const {
    check(X_left, "godunov_flux");
    check(X_right, "godunov_flux");
    return godunov_unchecked(X_left, X_right);
}

ConvectiveVelocities SettlingModel::velocity_coefficients(double X, double q, int gamma) const {
    if (X >= p_.rho_X) throw DomainError("velocity_coefficients: X >= rho_X is singular");
    const double F_C = q + gamma * v_hs(X);
    const double F_S = (p_.rho_X * q - F_C * X) / (p_.rho_X - X);
    return {F_C, F_S};
}

PhaseVelocities SettlingModel::phase_velocities(double X, double dXdz, double q, int gamma) const {
    if (X >= p_.rho_X) throw DomainError("phase_velocities: volume fraction 1 is singular");
    const double dDdz = d_compress(X) * dXdz;
    const double v = gamma * (v_hs(X) - dDdz);
    const double phi = X / p_.rho_X;
    return {q + v, q - phi / (1.0 - phi) * v};
}

}  // namespace sbr
