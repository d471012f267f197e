#include "mtl/market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mtl {

void MarketParams::validate() const {
    if (products.empty()) throw std::invalid_argument("products: at least one product is required");
    for (std::size_t i = 0; i < products.size(); ++i) {
        if (products[i].id != i) {
            throw std::invalid_argument("products[" + std::to_string(i) + "].id: ids must be 0..n-1 in greenness order");
        }
        if (!std::isfinite(products[i].p0)) {
            throw std::invalid_argument("products[" + std::to_string(i) + "].p0: must be finite");
        }
    }
    if (!std::isfinite(k) || k < 0.0) throw std::invalid_argument("k: must be finite and >= 0");
    if (!(lambda > 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda: must lie in (0, 1]");
    if (!wtp) throw std::invalid_argument("distribution: missing");
}

MarketParams make_params(std::vector<double> p0, double k, double lambda, WtpPtr wtp) {
    MarketParams params;
    params.products.reserve(p0.size());
    for (std::size_t i = 0; i < p0.size(); ++i) {
        params.products.push_back({i, "product_" + std::to_string(i), p0[i]});
    }
    params.k = k;
    params.lambda = lambda;
    params.wtp = std::move(wtp);
    return params;
}

MarketState MarketState::pure(std::size_t n, std::size_t i) {
    MarketState s = empty(n);
    s.u.at(i) = 1.0;
    return s;
}

MarketState MarketState::empty(std::size_t n) { return MarketState{std::vector<double>(n, 0.0), 0}; }

bool is_valid_state(std::span<const double> u, double tol) {
    double total = 0.0;
    for (double x : u) {
        if (!(x >= 0.0 && x <= 1.0)) return false;
        total += x;
    }
    return total <= 1.0 + tol;
}

double nonbuyer_share(std::span<const double> u) {
    const double rest = 1.0 - std::accumulate(u.begin(), u.end(), 0.0);
    return rest > 0.0 ? rest : 0.0;
}

std::vector<double> effective_prices(const MarketParams& params, std::span<const double> u) {
    std::vector<double> prices(params.products.size());
    for (std::size_t i = 0; i < prices.size(); ++i) {
        prices[i] = params.returns ? params.returns->price(params.products[i].p0, params.k, u[i])
                                   : params.products[i].p0 - params.k * u[i];
    }
    return prices;
}

std::vector<std::size_t> rank_and_eliminate(std::span<const double> prices) {
    std::vector<std::size_t> survivors;
    double cheapest_greener = std::numeric_limits<double>::infinity();
    for (std::size_t i = prices.size(); i-- > 0;) {
        if (prices[i] < cheapest_greener) {
            survivors.push_back(i);
            cheapest_greener = prices[i];
        }
    }
    std::reverse(survivors.begin(), survivors.end());
    return survivors;
}

Demand demand_shares(const WtpDistribution& wtp, std::span<const double> prices,
                     std::span<const std::size_t> survivors) {
    Demand demand;
    demand.shares.assign(prices.size(), 0.0);
    if (survivors.empty()) {
        demand.nonbuyers = 1.0;
        return demand;
    }
    double upper = 1.0;  // cdf at the next survivor's price; +inf for the greenest
    for (std::size_t m = survivors.size(); m-- > 0;) {
        const double here = wtp.cdf(prices[survivors[m]]);
        demand.shares[survivors[m]] = upper - here;
        upper = here;
    }
    demand.nonbuyers = upper;
    return demand;
}

MarketView view(const MarketParams& params, std::span<const double> u) {
    MarketView v;
    v.prices = effective_prices(params, u);
    v.survivors = rank_and_eliminate(v.prices);
    v.nonbuyer_share = nonbuyer_share(u);
    return v;
}

}  // namespace mtl
