#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace sbr {

/// Extremes over all accepted steps.
struct InvariantStats {
    std::size_t steps = 0;
    double min_C = std::numeric_limits<double>::infinity();
    double min_S = std::numeric_limits<double>::infinity();
    double max_X = 0.0;
    double min_W = std::numeric_limits<double>::infinity();
};

/// Cumulative mass bookkeeping per component (kg). Solids come first, then
/// solubles. Closure: mass(t) - mass(0) = inflow - underflow - effluent + reacted.
struct MassLedger {
    std::size_t k_C = 0;
    std::size_t k_S = 0;
    std::vector<double> inflow;
    std::vector<double> underflow;
    std::vector<double> effluent;
    std::vector<double> reacted;
    InvariantStats invariants;

    MassLedger() = default;
    MassLedger(std::size_t kc, std::size_t ks)
        : k_C(kc), k_S(ks), inflow(kc + ks, 0.0), underflow(kc + ks, 0.0), effluent(kc + ks, 0.0),
          reacted(kc + ks, 0.0) {}

    std::size_t size() const noexcept { return k_C + k_S; }
};

/// Sample times k * interval, k = 0, 1, ...
struct SampleClock {
    double interval = 30.0;
    std::size_t next = 0;
    double time() const noexcept { return static_cast<double>(next) * interval; }
};

}  // namespace sbr
