#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mtl/distributions.hpp"

namespace mtl {

/// A product on offer. Position in the product list is its greenness rank:
/// a higher id is greener.
struct ProductSpec {
    std::size_t id = 0;
    std::string name;
    double p0 = 0.0;  ///< price at zero market share
};

/// Maps (price at zero share, returns slope, share) to the effective price.
/// Implementations must be non-increasing in share.
class ReturnsCurve {
public:
    virtual ~ReturnsCurve() = default;
    virtual double price(double p0, double k, double share) const = 0;
};

/// p = p0 - k * share
class LinearReturns final : public ReturnsCurve {
public:
    double price(double p0, double k, double share) const override { return p0 - k * share; }
};

struct MarketParams {
    std::vector<ProductSpec> products;
    double k = 0.0;
    double lambda = 0.1;
    WtpPtr wtp;
    /// Null means linear returns.
    std::shared_ptr<const ReturnsCurve> returns;

    std::size_t size() const { return products.size(); }
    std::size_t top() const { return products.size() - 1; }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Builds a parameter set with products named "product_<i>".
MarketParams make_params(std::vector<double> p0, double k, double lambda, WtpPtr wtp);

struct MarketState {
    std::vector<double> u;
    long t = 0;

    /// Whole market in product `i`.
    static MarketState pure(std::size_t n, std::size_t i);
    static MarketState empty(std::size_t n);
};

/// Shares in [0,1] and total at most 1 + tol.
bool is_valid_state(std::span<const double> u, double tol = 1e-12);

/// Consumers currently holding no product.
double nonbuyer_share(std::span<const double> u);

std::vector<double> effective_prices(const MarketParams& params, std::span<const double> u);

/// Drops every product priced at or above some greener product. Survivors are returned
/// in increasing price order, which is also increasing greenness.
std::vector<std::size_t> rank_and_eliminate(std::span<const double> prices);

struct Demand {
    std::vector<double> shares;  ///< indexed by product id; zero for eliminated products
    double nonbuyers = 0.0;      ///< consumers priced out of every survivor
};

/// Each survivor captures the consumers whose reservation price lies between its own
/// price and the next survivor's; the greenest survivor takes everyone above its price.
Demand demand_shares(const WtpDistribution& wtp, std::span<const double> prices,
                     std::span<const std::size_t> survivors);

struct MarketView {
    std::vector<double> prices;
    std::vector<std::size_t> survivors;
    double nonbuyer_share = 0.0;
};

MarketView view(const MarketParams& params, std::span<const double> u);

}  // namespace mtl
