#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sbr {

/// Upper bound on k_C, k_S and k_r; lets the stepping kernels use stack
/// buffers.
inline constexpr std::size_t kMaxComponents = 16;

enum class Phase { Solid, Soluble };

struct ComponentRef {
    Phase phase;
    std::size_t index;
};

/// Rate vector r(C, S) >= 0 together with its positivity factorisation:
/// whenever rate l consumes a component, r_l = rbar_l * (that component)
/// with rbar_l bounded on the invariant region.
class RateLaw {
public:
    virtual ~RateLaw() = default;
    virtual std::size_t k_r() const noexcept = 0;
    virtual void rates(std::span<const double> C, std::span<const double> S, std::span<double> r) const = 0;
    virtual bool factorizes(std::size_t l, ComponentRef c) const noexcept = 0;
    /// rbar_l for the given component; only called when factorizes() is true.
    virtual double factor(std::size_t l, ComponentRef c, std::span<const double> C,
                          std::span<const double> S) const = 0;
};

/// R_C = sigma_C r, R_S = sigma_S r with the component-name registry.
class ReactionModel {
public:
    /// sigma matrices are row-major (k_C x k_r, k_S x k_r). Throws DomainError
    /// if a negative coefficient is not backed by a factorisation of the rate.
    ReactionModel(std::vector<std::string> solid_names, std::vector<std::string> soluble_names,
                  std::vector<double> sigma_C, std::vector<double> sigma_S, std::shared_ptr<const RateLaw> law);

    std::size_t k_C() const noexcept { return solid_names_.size(); }
    std::size_t k_S() const noexcept { return soluble_names_.size(); }
    std::size_t k_r() const noexcept { return law_->k_r(); }
    const std::vector<std::string>& solid_names() const noexcept { return solid_names_; }
    const std::vector<std::string>& soluble_names() const noexcept { return soluble_names_; }
    const std::vector<double>& sigma_C() const noexcept { return sigma_C_; }
    const std::vector<double>& sigma_S() const noexcept { return sigma_S_; }
    double sigma_C(std::size_t k, std::size_t l) const { return sigma_C_[k * k_r() + l]; }
    double sigma_S(std::size_t k, std::size_t l) const { return sigma_S_[k * k_r() + l]; }
    const RateLaw& law() const noexcept { return *law_; }

    void rates(std::span<const double> C, std::span<const double> S, std::span<double> r) const;
    void reaction_terms(std::span<const double> C, std::span<const double> S, std::span<double> R_C,
                        std::span<double> R_S) const;

    struct Totals {
        double solids;
        double solubles;
    };
    /// Sums of R_C and R_S components.
    Totals total_rates(std::span<const double> C, std::span<const double> S) const;

    /// Split R = production - consumption * concentration, componentwise,
    /// with production >= 0 and consumption >= 0. Exact algebraic identity.
    void split(std::span<const double> C, std::span<const double> S, std::span<double> prod_C,
               std::span<double> cons_C, std::span<double> prod_S, std::span<double> cons_S) const;

    bool has_reactions() const noexcept { return k_r() > 0; }

private:
    std::vector<std::string> solid_names_;
    std::vector<std::string> soluble_names_;
    std::vector<double> sigma_C_;
    std::vector<double> sigma_S_;
    std::shared_ptr<const RateLaw> law_;
};

/// Zero reaction rates.
class NoReactions final : public RateLaw {
public:
    std::size_t k_r() const noexcept override { return 0; }
    void rates(std::span<const double>, std::span<const double>, std::span<double>) const override {}
    bool factorizes(std::size_t, ComponentRef) const noexcept override { return false; }
    double factor(std::size_t, ComponentRef, std::span<const double>, std::span<const double>) const override {
        return 0.0;
    }
};

ReactionModel make_inert_model(std::vector<std::string> solid_names, std::vector<std::string> soluble_names);

struct DenitrificationParams {
    double Y = 0.67;          // yield
    double b = 6.94e-6;       // decay rate, 1/s
    double f_P = 0.2;         // undegradable fraction of decay
    double mu_max = 5.56e-5;  // 1/s
    double K_NO3 = 5e-4;      // kg/m^3
    double K_S = 0.02;        // kg/m^3

    double Y_bar() const noexcept { return (1.0 - Y) / (2.86 * Y); }
    void validate() const;
};

/// Anoxic growth on nitrate plus decay. C = (X_OHO, X_U),
/// S = (S_NO3, S_S, S_N2), r = X_OHO (mu(S), b).
class DenitrificationRates final : public RateLaw {
public:
    explicit DenitrificationRates(const DenitrificationParams& p);

    const DenitrificationParams& params() const noexcept { return p_; }
    /// Monod growth rate mu(S). Throws DomainError for negative substrates.
    double growth_rate(std::span<const double> S) const;

    std::size_t k_r() const noexcept override { return 2; }
    void rates(std::span<const double> C, std::span<const double> S, std::span<double> r) const override;
    bool factorizes(std::size_t l, ComponentRef c) const noexcept override;
    double factor(std::size_t l, ComponentRef c, std::span<const double> C,
                  std::span<const double> S) const override;

private:
    double mu(std::span<const double> S) const noexcept;
    DenitrificationParams p_;
};

inline const std::vector<std::string> kDenitrificationSolids{"X_OHO", "X_U"};
inline const std::vector<std::string> kDenitrificationSolubles{"S_NO3", "S_S", "S_N2"};

std::vector<double> denitrification_sigma_C(const DenitrificationParams& p);
std::vector<double> denitrification_sigma_S(const DenitrificationParams& p);

ReactionModel make_denitrification_model(const DenitrificationParams& p);

}  // namespace sbr
