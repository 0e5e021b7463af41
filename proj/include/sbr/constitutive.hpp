#pragma once

#include <cmath>
#include <vector>

namespace sbr {

/// Material and settling parameters. Defaults are the denitrification
/// examples' values.
struct MaterialParams {
    double rho_X = 1050.0;     // solids density, kg/m^3
    double rho_L = 998.0;      // liquid density, kg/m^3
    double g = 9.81;           // m/s^2
    double X_max = 30.0;       // maximal solids concentration, kg/m^3
    double v0 = 1.76e-3;       // maximal settling velocity, m/s
    double X_scale = 3.87;     // hindered-settling scale, kg/m^3
    double eta = 3.58;         // hindered-settling exponent
    double alpha = 0.2;        // effective-stress slope, m^2/s^2
    double X_crit = 5.0;       // critical concentration, kg/m^3

    double delta_rho() const noexcept { return rho_X - rho_L; }
    /// Throws DomainError on inconsistent values.
    void validate() const;
};

struct ConvectiveVelocities {
    double F_C;  // solids, m/s
    double F_S;  // substrates, m/s
};

struct PhaseVelocities {
    double v_X;
    double v_L;
};

/// Hindered settling v_hs(X) = v0 / (1 + (X/X_scale)^eta) with a linear
/// effective solids stress above X_crit. All public functions are total on
/// [0, X_max] and throw DomainError outside.
class SettlingModel {
public:
    explicit SettlingModel(const MaterialParams& params);

    const MaterialParams& params() const noexcept { return p_; }

    double v_hs(double X) const;
    /// Compression coefficient d(X); zero on [0, X_crit].
    double d_compress(double X) const;
    /// D(X) = integral of d from X_crit to X, from the precomputed table.
    double D(double X) const;
    /// D(X) by adaptive quadrature at call time. Used to check the table.
    double D_quadrature(double X) const;

    /// Compression in mass-flux form: the solids flux X dD(X)/dz equals
    /// dD_flux(X)/dz, where D_flux is the primitive of X d(X).
    double d_flux(double X) const;
    double D_flux(double X) const;
    double D_flux_quadrature(double X) const;
    /// Upper bound of X d(X) over [lo, hi].
    double max_d_flux_on(double lo, double hi) const;

    /// Batch settling flux f(X) = X v_hs(X).
    double batch_flux(double X) const;
    /// Godunov flux for f: min of f over [a, b] if a <= b, max over [b, a]
    /// otherwise.
    double godunov_flux(double X_left, double X_right) const;

    ConvectiveVelocities velocity_coefficients(double X, double q, int gamma) const;
    PhaseVelocities phase_velocities(double X, double dXdz, double q, int gamma) const;

    /// Location of the maximum of f on [0, X_max].
    double flux_peak() const noexcept { return X_peak_; }
    /// max |f'| over [0, X_max].
    double max_flux_slope() const noexcept { return max_slope_; }
    /// Upper bound of d over [lo, hi].
    double max_d_on(double lo, double hi) const;

    // Unchecked versions for the stepping kernels; callers guarantee
    // 0 <= X <= X_max.
    double v_hs_unchecked(double X) const noexcept {
        return p_.v0 / (1.0 + std::pow(X / p_.X_scale, p_.eta));
    }
    double batch_flux_unchecked(double X) const noexcept { return X * v_hs_unchecked(X); }
    double godunov_unchecked(double a, double b) const noexcept;
    double D_unchecked(double X) const noexcept { return X <= p_.X_crit ? 0.0 : D_table_.eval(X); }
    double D_flux_unchecked(double X) const noexcept {
        return X <= p_.X_crit ? 0.0 : D_flux_table_.eval(X);
    }

private:
    // Primitive of a smooth integrand on [a, b]: per-interval Gauss-Kronrod
    // sums at the nodes, cubic Hermite in between with slopes limited so
    // every piece stays monotone.
    struct PrimitiveTable {
        double a = 0.0;
        double h = 0.0;
        std::vector<double> F;
        std::vector<double> f;

        template <class Integrand>
        void build(const Integrand& g, double lo, double hi);
        double eval(double X) const noexcept;
    };

    void check(double X, const char* what) const;
    // d for X >= X_crit, including the right limit at X_crit.
    double d_above(double X) const noexcept;

    MaterialParams p_;
    double X_peak_ = 0.0;
    double max_slope_ = 0.0;
    double compression_factor_ = 0.0;  // rho_X alpha / (g delta_rho)
    PrimitiveTable D_table_;
    PrimitiveTable D_flux_table_;
};

}  // namespace sbr
