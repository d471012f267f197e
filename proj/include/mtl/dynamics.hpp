#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mtl/market.hpp"

namespace mtl {

enum class InterventionTarget {
    ProductPrice,    ///< overrides products[product].p0 while active
    ReturnsSlope,    ///< overrides k while active
    ShareInjection,  ///< moves share into `product` once, at t_start
};

enum class InterventionMode { Set, Add };

/// A temporary policy: a piecewise-constant parameter override on steps
/// t_start..t_end (inclusive), or a one-shot share injection at t_start.
struct Intervention {
    long t_start = 0;
    long t_end = 0;
    InterventionTarget target = InterventionTarget::ProductPrice;
    std::size_t product = 0;
    InterventionMode mode = InterventionMode::Set;
    double value = 0.0;

    bool active(long t) const { return t >= t_start && t <= t_end; }
    void validate(std::size_t n_products) const;
};

using Schedule = std::vector<Intervention>;

struct SimulationOptions {
    long t_max = 100000;
    double tol = 1e-10;
};

struct StepRecord {
    long t = 0;
    std::vector<double> u;
    std::vector<double> prices;
    std::vector<std::size_t> survivors;
    double nonbuyers = 0.0;
};

struct Trajectory {
    std::vector<StepRecord> records;
    bool converged = false;
    std::optional<long> t_converged;

    const StepRecord& last() const { return records.back(); }
};

/// Endpoint of a run without the per-step history.
struct Outcome {
    MarketState state;
    bool converged = false;
    std::optional<long> t_converged;
};

/// One synchronous relaxation step: a fraction lambda of consumers re-choose at the
/// prices implied by the current shares.
MarketState step(const MarketParams& params, const MarketState& state);

/// Every consumer in the standard product.
MarketState default_initial_state(std::size_t n);

/// Parameters in force at step t after applying every active override in order.
MarketParams effective_params(const MarketParams& base, const Schedule& schedule, long t);

/// Share injection: sets (or raises) the share of `product` and rescales everything
/// else, non-buyers included, proportionally so the total stays consistent.
void inject_share(std::vector<double>& u, std::size_t product, double target_share);

/// Iterates `step` until max |du| < tol after the last intervention has ended, or t_max
/// steps have been taken. Non-convergence is reported through `converged`.
Trajectory simulate(const MarketParams& params, const MarketState& initial,
                    const SimulationOptions& options = {}, const Schedule& schedule = {});

/// Same iteration as `simulate`, keeping only the endpoint.
Outcome run_to_convergence(const MarketParams& params, const MarketState& initial,
                           const SimulationOptions& options = {}, const Schedule& schedule = {});

}  // namespace mtl
