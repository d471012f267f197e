#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mtl/distributions.hpp"
#include "mtl/dynamics.hpp"
#include "mtl/market.hpp"

namespace mtl {

/// A solution of the greenest product's self-consistency equation u = 1 - F(p0 - k u).
struct FixedPoint {
    double u_star = 0.0;
    bool stable = false;
    /// k f(x*) == 1 to within 1e-9: a fold tangency, reported as unstable.
    bool degenerate = false;
    double residual = 0.0;
};

struct FixedPointSet {
    std::vector<FixedPoint> points;  ///< sorted by u_star
    /// Middle (unstable) point when exactly three points exist.
    std::optional<double> separatrix;
};

struct FullEquilibrium {
    std::vector<double> u;
    std::vector<double> prices;
    std::vector<std::size_t> survivors;
    double residual = 0.0;
};

/// Largest |u_i - d_i| where d is the demand implied by the prices at u.
double equilibrium_residual(const MarketParams& params, std::span<const double> u);

/// Enumerates all roots of u - 1 + F(p0_top - k u) on [0,1] by sign changes over a
/// 10^4-cell grid refined by bisection to 1e-12, and tags each by k f(x*) < 1.
FixedPointSet green_fixed_points(const WtpDistribution& wtp, double p0_top, double k);

/// Smallest k at which three fixed points can coexist: the distribution width.
double multiplicity_threshold(const WtpDistribution& wtp);

/// Prices of the greenest product bounding the bistable window for slope k, i.e. the
/// two values of p0 at which the line 1 - u is tangent to F. Empty when k <= width.
std::optional<std::pair<double, double>> fold_points(const LogitWtp& wtp, double k);
std::optional<std::pair<double, double>> fold_points(const UniformWtp& wtp, double k);
/// Dispatches to the closed forms for the built-in distributions; any other distribution
/// is handled by locating k f(x) = 1 numerically.
std::optional<std::pair<double, double>> fold_points(const WtpDistribution& wtp, double k);

/// Exact equilibrium for a uniform distribution in the single-attractor regime (k < width).
/// Solves the greenest product first and cascades down the greenness ranks, dropping any
/// product that cannot undercut the next greener survivor.
/// Throws std::invalid_argument for a non-uniform distribution or k >= width.
FullEquilibrium equilibrium_uniform_closed_form(const MarketParams& params);

/// Printed survival conditions for three products on a [0,1] uniform distribution
/// (valid while every price stays inside the support).
namespace unit_uniform {
/// Intermediate product has zero share iff P01 >= (P02 - k) / (1 - k).
bool intermediate_vanishes(double p01, double p02, double k);
/// Standard product has zero share: two disjunctive branches.
bool standard_vanishes(double p00, double p01, double p02, double k);
}  // namespace unit_uniform

struct NumericEquilibria {
    std::vector<FullEquilibrium> equilibria;  ///< distinct endpoints, lexicographic in u
    /// Indices into the start list whose run did not converge or failed verification.
    std::vector<std::size_t> failed_starts;
};

/// Default starts: every pure state, then the empty market.
std::vector<MarketState> default_starts(std::size_t n);

/// Attractors found by relaxing from each start; endpoints within 1e-6 are merged and
/// every endpoint is checked against residual < 1e-8.
NumericEquilibria equilibrium_numeric(const MarketParams& params,
                                      const std::vector<MarketState>& starts,
                                      const SimulationOptions& options = {});
NumericEquilibria equilibrium_numeric(const MarketParams& params,
                                      const SimulationOptions& options = {});

}  // namespace mtl
