#include "mtl/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtl {

namespace {

constexpr int kRootGridCells = 10000;
constexpr double kBisectionWidth = 1e-12;
constexpr double kTangencyBand = 1e-9;
constexpr double kMergeDistance = 1e-6;
constexpr double kResidualLimit = 1e-8;

template <typename Fn>
double bisect(Fn&& g, double lo, double hi, double g_lo) {
    while (hi - lo >= kBisectionWidth) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = g(mid);
        if (g_mid == 0.0) return mid;
        if ((g_mid < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Roots of g on [lo, hi]: exact zeros at grid nodes plus bisected sign changes.
template <typename Fn>
std::vector<double> bracket_roots(Fn&& g, double lo, double hi, int cells) {
    std::vector<double> nodes(cells + 1);
    std::vector<double> values(cells + 1);
    for (int i = 0; i <= cells; ++i) {
        nodes[i] = i == cells ? hi : lo + (hi - lo) * i / cells;
        values[i] = g(nodes[i]);
    }
    std::vector<double> roots;
    for (int i = 0; i <= cells; ++i) {
        if (values[i] == 0.0) {
            roots.push_back(nodes[i]);
            continue;
        }
        if (i < cells && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0)) {
            roots.push_back(bisect(g, nodes[i], nodes[i + 1], values[i]));
        }
    }
    return roots;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

FullEquilibrium describe_endpoint(const MarketParams& params, std::vector<double> u) {
    FullEquilibrium eq;
    eq.prices = effective_prices(params, u);
    eq.survivors = rank_and_eliminate(eq.prices);
    eq.residual = equilibrium_residual(params, u);
    eq.u = std::move(u);
    return eq;
}

}  // namespace

double equilibrium_residual(const MarketParams& params, std::span<const double> u) {
    const auto prices = effective_prices(params, u);
    const auto survivors = rank_and_eliminate(prices);
    const auto demand = demand_shares(*params.wtp, prices, survivors);
    return max_abs_diff(u, demand.shares);
}

FixedPointSet green_fixed_points(const WtpDistribution& wtp, double p0_top, double k) {
    if (!(k >= 0.0)) throw std::invalid_argument("k: must be >= 0");
    const auto g = [&](double u) { return u - 1.0 + wtp.cdf(p0_top - k * u); };

    FixedPointSet set;
    for (double u : bracket_roots(g, 0.0, 1.0, kRootGridCells)) {
        const double x = p0_top - k * u;
        const double slope = k * wtp.pdf(x);
        FixedPoint fp;
        fp.u_star = u;
        fp.degenerate = std::abs(slope - 1.0) < kTangencyBand;
        fp.stable = slope < 1.0 && !fp.degenerate;
        fp.residual = std::abs(u - (1.0 - wtp.cdf(x)));
        set.points.push_back(fp);
    }
    if (set.points.size() == 3) set.separatrix = set.points[1].u_star;
    return set;
}

double multiplicity_threshold(const WtpDistribution& wtp) { return wtp.width(); }

std::optional<std::pair<double, double>> fold_points(const LogitWtp& wtp, double k) {
    if (!(k > wtp.width())) return std::nullopt;
    // Tangency k beta F (1 - F) = 1.
    const double root = std::sqrt(1.0 - wtp.width() / k);
    double folds[2];
    int i = 0;
    for (double f : {0.5 * (1.0 + root), 0.5 * (1.0 - root)}) {
        const double x = wtp.center() + std::log(f / (1.0 - f)) / wtp.beta();
        folds[i++] = x + k * (1.0 - f);
    }
    return std::pair{std::min(folds[0], folds[1]), std::max(folds[0], folds[1])};
}

std::optional<std::pair<double, double>> fold_points(const UniformWtp& wtp, double k) {
    if (!(k > wtp.width())) return std::nullopt;
    // Low root u = 0 needs p0 >= upper; high root u = 1 needs p0 - k <= lower.
    return std::pair{wtp.upper(), wtp.lower() + k};
}

std::optional<std::pair<double, double>> fold_points(const WtpDistribution& wtp, double k) {
    if (const auto* logit = dynamic_cast<const LogitWtp*>(&wtp)) return fold_points(*logit, k);
    if (const auto* uniform = dynamic_cast<const UniformWtp*>(&wtp)) return fold_points(*uniform, k);
    if (!(k > wtp.width())) return std::nullopt;

    const double lo = wtp.quantile(1e-9);
    const double hi = wtp.quantile(1.0 - 1e-9);
    const auto tangency = [&](double x) { return k * wtp.pdf(x) - 1.0; };
    const auto xs = bracket_roots(tangency, lo, hi, kRootGridCells);
    if (xs.size() < 2) return std::nullopt;
    double p_min = std::numeric_limits<double>::infinity();
    double p_max = -p_min;
    for (double x : xs) {
        const double p = x + k * (1.0 - wtp.cdf(x));
        p_min = std::min(p_min, p);
        p_max = std::max(p_max, p);
    }
    return std::pair{p_min, p_max};
}

FullEquilibrium equilibrium_uniform_closed_form(const MarketParams& params) {
    params.validate();
    const auto* uniform = dynamic_cast<const UniformWtp*>(params.wtp.get());
    if (uniform == nullptr) throw std::invalid_argument("distribution: closed form requires a uniform distribution");
    if (params.returns) throw std::invalid_argument("returns: closed form requires linear returns");
    const double w = uniform->width();
    const double k = params.k;
    if (!(k < w)) throw std::invalid_argument("k: closed form requires k < width (multiple attractors possible)");

    const std::size_t n = params.size();
    std::vector<double> u(n, 0.0);

    const double p0_top = params.products[n - 1].p0;
    u[n - 1] = std::clamp((uniform->upper() - p0_top) / (w - k), 0.0, 1.0);
    double p_next = p0_top - k * u[n - 1];

    for (std::size_t i = n - 1; i-- > 0;) {
        const double p0 = params.products[i].p0;
        const double f_next = uniform->cdf(p_next);
        if (uniform->cdf(p0) >= f_next) {
            // Cannot undercut the next greener survivor with positive share.
            if (p0 < p_next) p_next = p0;
            continue;
        }
        if (p0 - k * f_next <= uniform->lower()) {
            u[i] = f_next;  // priced below every consumer
        } else {
            u[i] = (w * f_next - p0 + uniform->lower()) / (w - k);
        }
        p_next = p0 - k * u[i];
    }
    return describe_endpoint(params, std::move(u));
}

namespace unit_uniform {

bool intermediate_vanishes(double p01, double p02, double k) {
    return p01 >= (p02 - k) / (1.0 - k);
}

bool standard_vanishes(double p00, double p01, double p02, double k) {
    const double edge = (p02 - k) / (1.0 - k);
    const bool first = p00 >= p01 / (1.0 - k) - k * (p02 - k) / ((1.0 - k) * (1.0 - k)) && p01 < edge;
    const bool second = p00 >= edge && p01 >= edge;
    return first || second;
}

}  // namespace unit_uniform

std::vector<MarketState> default_starts(std::size_t n) {
    std::vector<MarketState> starts;
    for (std::size_t i = 0; i < n; ++i) starts.push_back(MarketState::pure(n, i));
    starts.push_back(MarketState::empty(n));
    return starts;
}

NumericEquilibria equilibrium_numeric(const MarketParams& params, const std::vector<MarketState>& starts,
                                      const SimulationOptions& options) {
    NumericEquilibria result;
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const auto outcome = run_to_convergence(params, starts[s], options);
        if (!outcome.converged) {
            result.failed_starts.push_back(s);
            continue;
        }
        auto eq = describe_endpoint(params, outcome.state.u);
        if (!(eq.residual < kResidualLimit)) {
            result.failed_starts.push_back(s);
            continue;
        }
        const bool seen = std::any_of(result.equilibria.begin(), result.equilibria.end(),
                                      [&](const FullEquilibrium& other) {
                                          return max_abs_diff(other.u, eq.u) < kMergeDistance;
                                      });
        if (!seen) result.equilibria.push_back(std::move(eq));
    }
    std::sort(result.equilibria.begin(), result.equilibria.end(),
              [](const FullEquilibrium& a, const FullEquilibrium& b) { return a.u < b.u; });
    return result;
}

NumericEquilibria equilibrium_numeric(const MarketParams& params, const SimulationOptions& options) {
    return equilibrium_numeric(params, default_starts(params.size()), options);
}

}  // namespace mtl
