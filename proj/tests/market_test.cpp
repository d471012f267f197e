#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "doctest.h"
#include "mtl/market.hpp"

using namespace mtl;

namespace {

std::vector<std::size_t> brute_force_survivors(const std::vector<double>& p) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < p.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = i + 1; j < p.size(); ++j) dominated = dominated || p[j] <= p[i];
        if (!dominated) keep.push_back(i);
    }
    std::sort(keep.begin(), keep.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    return keep;
}

const auto kUnit = std::make_shared<UniformWtp>(0.0, 1.0);

}  // namespace

TEST_CASE("effective prices fall linearly with share") {
    CHECK(effective_prices(make_params({0.8}, 0.5, 0.1, kUnit), std::vector{0.0})[0] == 0.8);
    CHECK(effective_prices(make_params({0.5}, 0.25, 0.1, kUnit), std::vector{0.4})[0] == doctest::Approx(0.4));
    const auto p = effective_prices(make_params({0.5, 0.6, 0.8}, 0.2, 0.1, kUnit), std::vector{1.0, 0.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.3));
    CHECK(p[1] == 0.6);
    CHECK(p[2] == 0.8);
}

TEST_CASE("effective prices may go negative") {
    const auto p = effective_prices(make_params({0.5}, 2.0, 0.1, kUnit), std::vector{1.0});
    CHECK(p[0] == doctest::Approx(-1.5));
}

TEST_CASE("custom returns curve is used when supplied") {
    struct Quadratic final : ReturnsCurve {
        double price(double p0, double k, double share) const override { return p0 - k * share * share; }
    };
    auto params = make_params({0.5, 0.9}, 0.4, 0.1, kUnit);
    params.returns = std::make_shared<Quadratic>();
    const auto p = effective_prices(params, std::vector{0.5, 0.0});
    CHECK(p[0] == doctest::Approx(0.4));
}

TEST_CASE("rank and eliminate") {
    CHECK(rank_and_eliminate(std::vector{0.3, 0.6, 0.8}) == std::vector<std::size_t>{0, 1, 2});
    CHECK(rank_and_eliminate(std::vector{0.3, 0.6, 0.55}) == std::vector<std::size_t>{0, 2});
    CHECK(rank_and_eliminate(std::vector{0.9, 0.9, 0.9}) == std::vector<std::size_t>{2});
    CHECK(rank_and_eliminate(std::vector{0.7}) == std::vector<std::size_t>{0});
    CHECK(rank_and_eliminate(std::vector{1.0, -0.5, 0.2}) == std::vector<std::size_t>{1, 2});
}

TEST_CASE("demand shares") {
    SUBCASE("all survive") {
        const std::vector p{0.3, 0.6, 0.8};
        const auto d = demand_shares(*kUnit, p, rank_and_eliminate(p));
        CHECK(d.shares[0] == doctest::Approx(0.3));
        CHECK(d.shares[1] == doctest::Approx(0.2));
        CHECK(d.shares[2] == doctest::Approx(0.2));
        CHECK(d.nonbuyers == doctest::Approx(0.3));
    }
    SUBCASE("middle product dominated") {
        const std::vector p{0.3, 0.6, 0.55};
        const auto d = demand_shares(*kUnit, p, rank_and_eliminate(p));
        CHECK(d.shares[0] == doctest::Approx(0.25));
        CHECK(d.shares[1] == 0.0);
        CHECK(d.shares[2] == doctest::Approx(0.45));
    }
    SUBCASE("single survivor takes everyone above its price") {
        const LogitWtp logit(0.1, 3.0);
        const std::vector p{0.9, 0.9, 0.4};
        const auto d = demand_shares(logit, p, rank_and_eliminate(p));
        CHECK(d.shares[2] == doctest::Approx(1.0 - logit.cdf(0.4)));
        CHECK(d.shares[0] == 0.0);
    }
}

TEST_CASE("market view") {
    const auto params = make_params({0.5, 0.6, 0.8}, 0.2, 0.1, kUnit);
    const auto v = view(params, std::vector{0.5, 0.1, 0.1});
    CHECK(v.survivors == std::vector<std::size_t>{0, 1, 2});
    CHECK(v.nonbuyer_share == doctest::Approx(0.3));
}

TEST_CASE("parameter validation names the field") {
    auto params = make_params({0.5, 0.6}, -0.1, 0.1, kUnit);
    CHECK_THROWS_WITH_AS(params.validate(), doctest::Contains("k:"), std::invalid_argument);
    params.k = 0.1;
    params.lambda = 0.0;
    CHECK_THROWS_WITH_AS(params.validate(), doctest::Contains("lambda:"), std::invalid_argument);
    params.lambda = 1.0;
    CHECK_NOTHROW(params.validate());
    params.products.clear();
    CHECK_THROWS_WITH_AS(params.validate(), doctest::Contains("products"), std::invalid_argument);
}

TEST_CASE("property: demand conservation, dominance soundness, greenest first, idempotence") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> price(-0.5, 1.5);
    std::uniform_int_distribution<int> count(1, 6);
    const LogitWtp logit(0.2, 3.0);
    const mtl::WtpDistribution* dists[] = {kUnit.get(), &logit};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> p(static_cast<std::size_t>(count(rng)));
        for (auto& x : p) x = price(rng);
        if (trial % 5 == 0 && p.size() > 1) p[0] = p[1];  // exercise ties

        const auto survivors = rank_and_eliminate(p);
        CHECK(survivors == brute_force_survivors(p));
        CHECK(survivors.back() == p.size() - 1);
        for (std::size_t a = 0; a + 1 < survivors.size(); ++a) {
            CHECK(survivors[a] < survivors[a + 1]);
            CHECK(p[survivors[a]] < p[survivors[a + 1]]);
        }

        std::vector<double> sub;
        for (auto s : survivors) sub.push_back(p[s]);
        CHECK(rank_and_eliminate(sub).size() == sub.size());

        for (const auto* wtp : dists) {
            const auto d = demand_shares(*wtp, p, survivors);
            double total = d.nonbuyers;
            for (double x : d.shares) {
                CHECK(x >= 0.0);
                total += x;
            }
            CHECK(std::abs(total - 1.0) < 1e-12);
            CHECK(d.shares.back() == doctest::Approx(1.0 - wtp->cdf(p.back())).epsilon(1e-15));
        }
    }
}
