#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "mtl/distributions.hpp"
#include "oracles.hpp"

using mtl::LogitWtp;
using mtl::UniformWtp;

TEST_CASE("uniform cdf is linear inside the support and clipped outside") {
    const UniformWtp unit(0.0, 1.0);
    CHECK(unit.cdf(0.5) == doctest::Approx(0.5));
    CHECK(UniformWtp(0.0, 0.9).cdf(-0.1) == 0.0);
    CHECK(unit.cdf(1.7) == 1.0);
    CHECK(unit.width() == 1.0);
}

TEST_CASE("logit cdf matches the logistic formula") {
    const LogitWtp logit(0.0, 4.0);
    CHECK(logit.cdf(0.0) == 0.5);
    CHECK(logit.cdf(1.0) == doctest::Approx(oracle::logistic(1.0, 0.0, 4.0)).epsilon(1e-14));
    CHECK(logit.cdf(1.0) == doctest::Approx(0.98201).epsilon(1e-5));
    CHECK(logit.cdf(-1e6) == 0.0);
    CHECK(logit.cdf(1e6) == 1.0);
}

TEST_CASE("widths") {
    CHECK(LogitWtp(0.0, 4.0).width() == 1.0);
    CHECK(LogitWtp(0.0, 8.0).width() == 0.5);
    CHECK(LogitWtp::from_width(0.3, 0.5).beta() == 8.0);
    CHECK(UniformWtp(-0.2, 1.1).width() == doctest::Approx(1.3));
}

TEST_CASE("densities") {
    CHECK(UniformWtp(0.0, 1.0).pdf(0.5) == 1.0);
    CHECK(UniformWtp(0.0, 1.0).pdf(2.0) == 0.0);
    CHECK(UniformWtp(0.0, 1.0).pdf(0.0) == 1.0);
    CHECK(UniformWtp(0.0, 1.0).pdf(1.0) == 0.0);
    CHECK(LogitWtp(0.0, 4.0).pdf(0.0) == 1.0);
}

TEST_CASE("quantiles") {
    CHECK(UniformWtp(0.0, 1.0).quantile(0.25) == 0.25);
    CHECK(LogitWtp(0.0, 4.0).quantile(0.5) == 0.0);
    CHECK(LogitWtp(0.0, 4.0).quantile(0.98201) == doctest::Approx(1.0).epsilon(1e-4));
    for (double bad : {0.0, 1.0, -0.5, 1.5, std::nan("")}) {
        CHECK_THROWS_AS(UniformWtp(0.0, 1.0).quantile(bad), std::domain_error);
        CHECK_THROWS_AS(LogitWtp(0.0, 4.0).quantile(bad), std::domain_error);
    }
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(UniformWtp(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(UniformWtp(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LogitWtp(0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(LogitWtp::from_width(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("property: quantile inverts cdf") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> q_dist(0.001, 0.999);
    const UniformWtp uniform(-0.3, 1.4);
    const LogitWtp logit(0.25, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const double q = q_dist(rng);
        CHECK(std::abs(uniform.cdf(uniform.quantile(q)) - q) < 1e-9);
        CHECK(std::abs(logit.cdf(logit.quantile(q)) - q) < 1e-9);
    }
    for (double x : {-0.2, 0.1, 0.7, 1.3}) {
        CHECK(std::abs(uniform.quantile(uniform.cdf(x)) - x) < 1e-9);
        CHECK(std::abs(logit.quantile(logit.cdf(x)) - x) < 1e-9);
    }
}

TEST_CASE("property: logit symmetry about its center") {
    const LogitWtp logit(0.4, 5.0);
    for (double x = -3.0; x <= 3.0; x += 0.01) {
        CHECK(std::abs(logit.cdf(0.4 + x) + logit.cdf(0.4 - x) - 1.0) < 1e-12);
    }
}

TEST_CASE("property: cdf is monotone, bounded, and differentiates to pdf") {
    const UniformWtp uniform(0.0, 0.9);
    const LogitWtp logit(0.0, 4.0);
    const mtl::WtpDistribution* dists[] = {&uniform, &logit};
    const double h = 1e-5;
    for (const auto* d : dists) {
        double previous = 0.0;
        for (double x = -2.0; x <= 2.0; x += 0.003) {
            const double f = d->cdf(x);
            CHECK(f >= previous);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            CHECK(d->pdf(x) >= 0.0);
            previous = f;
        }
        for (double x : {0.05, 0.3, 0.45, 0.81}) {
            const double slope = (d->cdf(x + h) - d->cdf(x - h)) / (2 * h);
            CHECK(std::abs(slope - d->pdf(x)) < 1e-5);
        }
    }
}

TEST_CASE("property: largest density is the inverse width") {
    const UniformWtp uniform(0.2, 1.1);
    const LogitWtp logit(0.3, 2.5);
    const mtl::WtpDistribution* dists[] = {&uniform, &logit};
    for (const auto* d : dists) {
        double best = 0.0;
        for (double x = -3.0; x <= 3.0; x += 1e-4) best = std::max(best, d->pdf(x));
        CHECK(std::abs(best - 1.0 / d->width()) < 1e-6);
    }
}
