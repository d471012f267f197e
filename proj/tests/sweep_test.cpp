#include <cmath>
#include <memory>
#include <sstream>

#include "doctest.h"
#include "mtl/equilibrium.hpp"
#include "mtl/report.hpp"
#include "mtl/sweep.hpp"

using namespace mtl;

namespace {

const auto kUnit = std::make_shared<UniformWtp>(0.0, 1.0);
const auto kLogit = std::make_shared<LogitWtp>(0.0, 4.0);

SweepSpec regime_map_spec(int steps) {
    SweepSpec spec;
    spec.base = make_params({0.5, 0.6, 0.8}, 0.2, 0.1, kUnit);
    spec.axis1 = Axis{ParameterPath::parse("k", spec.base), 0.0, 0.5, steps};
    spec.axis2 = Axis{ParameterPath::parse("p0[1]", spec.base), 0.5, 0.8, steps};
    return spec;
}

HysteresisSpec logit_hysteresis(double k, int steps) {
    HysteresisSpec spec;
    spec.base = make_params({0.5, 0.6, 1.0}, k, 0.1, kLogit);
    spec.min = 0.4;
    spec.max = 1.6;
    spec.steps = steps;
    return spec;
}

std::string sweep_csv(const SweepResult& r) {
    std::ostringstream out;
    report::write_sweep(out, r, 3);
    return out.str();
}

}  // namespace

TEST_CASE("parameter paths") {
    const auto params = make_params({0.5, 0.6, 0.8}, 0.2, 0.1, kUnit);
    CHECK(ParameterPath::parse("k", params).kind == ParameterPath::Kind::ReturnsSlope);
    CHECK(ParameterPath::parse("lambda", params).kind == ParameterPath::Kind::RelaxationRate);
    CHECK(ParameterPath::parse("p0[2]", params).product == 2);
    CHECK(ParameterPath::parse("p0[product_1]", params).product == 1);
    CHECK(ParameterPath::parse("p0[1]", params).to_string() == "p0[1]");
    CHECK_THROWS_AS(ParameterPath::parse("p0[3]", params), std::invalid_argument);
    CHECK_THROWS_AS(ParameterPath::parse("p0[]", params), std::invalid_argument);
    CHECK_THROWS_AS(ParameterPath::parse("mu", params), std::invalid_argument);

    auto copy = params;
    ParameterPath::parse("p0[0]", params).apply(copy, 0.33);
    CHECK(copy.products[0].p0 == 0.33);
    CHECK(ParameterPath::parse("p0[0]", params).read(copy) == 0.33);
}

TEST_CASE("axis values and validation") {
    const auto params = make_params({0.5, 0.8}, 0.2, 0.1, kUnit);
    const Axis axis{ParameterPath::parse("k", params), 0.0, 0.5, 11};
    CHECK(axis.value(0) == 0.0);
    CHECK(axis.value(10) == 0.5);
    CHECK(axis.value(4) == doctest::Approx(0.2));
    CHECK_THROWS_AS((Axis{axis.path, 0.5, 0.0, 11}.validate(params, "a")), std::invalid_argument);
    CHECK_THROWS_AS((Axis{axis.path, -0.5, 0.5, 11}.validate(params, "a")), std::invalid_argument);
    CHECK_THROWS_AS((Axis{axis.path, 0.0, 0.5, 0}.validate(params, "a")), std::invalid_argument);
    CHECK_NOTHROW((Axis{axis.path, 0.3, 0.3, 1}.validate(params, "a")));
}

TEST_CASE("regime map over k and the hybrid price") {
    auto spec = regime_map_spec(11);
    spec.jobs = 2;
    const auto result = sweep2d(spec);
    REQUIRE(result.cells.size() == 121);
    for (const auto& cell : result.cells) {
        REQUIRE(cell.runs.size() == 1);
        const auto& run = cell.runs[0];
        CHECK(run.converged);
        const double k = cell.x1;
        const double p01 = cell.x2;
        CHECK(std::abs(run.u[2] - 0.2 / (1.0 - k)) < 1e-6);
        const double edge = (0.8 - k) / (1.0 - k);
        if (p01 >= edge + 1e-9) CHECK(run.u[1] < 1e-8);
        if (p01 <= edge - 1e-3) CHECK(run.u[1] > 1e-6);
        if (cell.surviving_products == 3) {
            for (double u : run.u) CHECK(u > 1e-6);
        }
        CHECK(cell.attractors == 1);
        auto params = spec.base;
        params.k = k;
        params.products[1].p0 = p01;
        CHECK(equilibrium_residual(params, run.u) < 1e-8);
    }
}

TEST_CASE("1x1 sweep is a single simulation") {
    SweepSpec spec;
    spec.base = make_params({0.5, 0.6, 0.8}, 0.2, 0.1, kUnit);
    spec.axis1 = Axis{ParameterPath::parse("k", spec.base), 0.2, 0.2, 1};
    spec.axis2 = Axis{ParameterPath::parse("p0[1]", spec.base), 0.6, 0.6, 1};
    const auto result = sweep2d(spec);
    REQUIRE(result.cells.size() == 1);
    const auto direct = run_to_convergence(spec.base, default_initial_state(3), spec.simulation);
    CHECK(result.cells[0].runs[0].u == direct.state.u);
    CHECK(result.cells[0].runs[0].t_converged == direct.t_converged);
}

TEST_CASE("continuation protocol reaches the same single attractors") {
    auto independent = regime_map_spec(6);
    auto continuation = independent;
    continuation.protocol = SweepProtocol::Continuation;
    const auto a = sweep2d(independent);
    const auto b = sweep2d(continuation);
    for (std::size_t c = 0; c < a.cells.size(); ++c) {
        for (std::size_t p = 0; p < 3; ++p) CHECK(std::abs(a.cells[c].runs[0].u[p] - b.cells[c].runs[0].u[p]) < 1e-6);
    }
}

TEST_CASE("bad initial conditions abort before any work") {
    auto spec = regime_map_spec(3);
    spec.initial_conditions = {{0.5, 0.5}};
    CHECK_THROWS_AS(sweep2d(spec), std::invalid_argument);
}

TEST_CASE("hysteresis window brackets the folds") {
    auto spec = logit_hysteresis(2.0, 61);
    const double step = 1.2 / 60;
    const auto result = hysteresis_sweep(spec);
    REQUIRE(result.window.has_value());
    const auto folds = *fold_points(LogitWtp(0.0, 4.0), 2.0);
    CHECK(std::abs(result.window->first - folds.first) <= step);
    CHECK(std::abs(result.window->second - folds.second) <= step);
    for (std::size_t i = 0; i < result.axis.size(); ++i) {
        CHECK(result.converged_high[i]);
        CHECK(result.converged_low[i]);
        CHECK(result.branch_high[i] >= result.branch_low[i] - 1e-9);
        const bool inside = result.axis[i] >= result.window->first && result.axis[i] <= result.window->second;
        if (!inside) CHECK(std::abs(result.branch_high[i] - result.branch_low[i]) < 1e-6);
    }
}

TEST_CASE("continuation hysteresis finds the same window") {
    auto spec = logit_hysteresis(2.0, 61);
    const auto independent = hysteresis_sweep(spec);
    spec.protocol = SweepProtocol::Continuation;
    const auto continuation = hysteresis_sweep(spec);
    REQUIRE(continuation.window.has_value());
    CHECK(continuation.window->first == independent.window->first);
    CHECK(continuation.window->second == independent.window->second);
}

TEST_CASE("no window below the multiplicity threshold") {
    const auto logit = hysteresis_sweep(logit_hysteresis(0.5, 61));
    CHECK_FALSE(logit.window.has_value());
    for (std::size_t i = 0; i < logit.axis.size(); ++i) {
        CHECK(std::abs(logit.branch_high[i] - logit.branch_low[i]) < 1e-6);
    }

    HysteresisSpec uniform;
    uniform.base = make_params({0.3, 0.5, 0.8}, 0.5, 0.1, kUnit);
    uniform.min = 0.0;
    uniform.max = 1.2;
    uniform.steps = 61;
    CHECK_FALSE(hysteresis_sweep(uniform).window.has_value());
}

TEST_CASE("dual-branch surface") {
    SurfaceSpec spec;
    spec.base = make_params({0.5, 0.6, 1.0}, 2.0, 0.1, kLogit);
    spec.k_min = 0.5;
    spec.k_max = 2.5;
    spec.k_steps = 9;  // includes k = 1.0 and 2.0
    spec.price_min = 0.4;
    spec.price_max = 1.6;
    spec.price_steps = 13;
    const auto result = surface(spec);
    REQUIRE(result.cells.size() == 9 * 13);

    bool split_above = false;
    for (const auto& cell : result.cells) {
        if (cell.x1 < 1.0) CHECK(branch_difference(cell) < 1e-6);
        if (cell.x1 > 1.0 && branch_difference(cell) > kBranchSeparation) split_above = true;
    }
    CHECK(split_above);

    const auto row = hysteresis_sweep(logit_hysteresis(2.0, 13));
    for (int j = 0; j < 13; ++j) {
        const auto& cell = result.cell(6, j);
        REQUIRE(cell.x1 == 2.0);
        CHECK(cell.runs[0].u[2] == row.branch_high[j]);
        CHECK(cell.runs[1].u[2] == row.branch_low[j]);
    }

    // At k = 2.5 the upper fold lies beyond 1.6, so only rows up to k = 2 are single-valued there.
    for (int i = 0; i <= 6; ++i) {
        const auto& cell = result.cell(i, 12);
        CHECK(branch_difference(cell) < 1e-6);
        CHECK(cell.runs[1].u[2] < 0.2);
    }
}

TEST_CASE("sweeps are deterministic and independent of the worker count") {
    auto spec = regime_map_spec(9);
    spec.initial_conditions = {{1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
    spec.jobs = 1;
    const auto serial = sweep_csv(sweep2d(spec));
    CHECK(serial == sweep_csv(sweep2d(spec)));
    spec.jobs = 4;
    CHECK(serial == sweep_csv(sweep2d(spec)));
    spec.jobs = 0;
    CHECK(serial == sweep_csv(sweep2d(spec)));
}
