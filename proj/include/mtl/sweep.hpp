#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtl/dynamics.hpp"
#include "mtl/market.hpp"

namespace mtl {

/// A scalar parameter of MarketParams addressed by name: "k", "lambda", "p0[<id>]" or
/// "p0[<product name>]".
struct ParameterPath {
    enum class Kind { ProductPrice, ReturnsSlope, RelaxationRate };

    Kind kind = Kind::ReturnsSlope;
    std::size_t product = 0;

    static ParameterPath parse(std::string_view text, const MarketParams& params);
    static ParameterPath top_price(const MarketParams& params);

    void apply(MarketParams& params, double value) const;
    double read(const MarketParams& params) const;
    std::string to_string() const;
};

struct Axis {
    ParameterPath path;
    double min = 0.0;
    double max = 1.0;
    int steps = 2;

    /// Evenly spaced; a single-step axis sits at `min`.
    double value(int i) const;
    void validate(const MarketParams& base, const std::string& label) const;
};

enum class SweepProtocol {
    IndependentInit,  ///< every cell relaxes from the configured initial conditions
    Continuation,     ///< each cell starts from the previous cell's endpoint along axis1
};

struct SweepSpec {
    MarketParams base;
    Axis axis1;
    std::optional<Axis> axis2;
    /// Defaults to the standard product holding the whole market.
    std::vector<std::vector<double>> initial_conditions;
    SweepProtocol protocol = SweepProtocol::IndependentInit;
    SimulationOptions simulation;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned jobs = 0;
};

struct RunOutcome {
    std::vector<double> u;
    std::vector<std::size_t> survivors;
    bool converged = false;
    std::optional<long> t_converged;
};

struct SweepCell {
    int i = 0;
    int j = 0;
    double x1 = 0.0;
    double x2 = 0.0;
    std::vector<RunOutcome> runs;  ///< one per initial condition
    int surviving_products = 0;    ///< shares above 1e-6 in the first run
    int attractors = 0;            ///< distinct converged endpoints across runs
};

struct SweepResult {
    std::string axis1_name;
    std::string axis2_name;  ///< empty for a one-axis sweep
    std::vector<double> axis1;
    std::vector<double> axis2;  ///< holds a single 0 for a one-axis sweep
    std::vector<SweepCell> cells;  ///< row-major, axis1 outer

    const SweepCell& cell(int i, int j) const { return cells.at(static_cast<std::size_t>(i) * axis2.size() + j); }
};

SweepResult sweep2d(const SweepSpec& spec);

struct HysteresisSpec {
    MarketParams base;
    std::optional<ParameterPath> path;  ///< defaults to the greenest product's p0
    double min = 0.0;
    double max = 1.0;
    int steps = 241;
    SweepProtocol protocol = SweepProtocol::IndependentInit;
    SimulationOptions simulation;
    unsigned jobs = 0;
};

struct HysteresisResult {
    std::string axis_name;
    std::vector<double> axis;
    std::vector<double> branch_high;  ///< greenest share relaxed from the all-green market
    std::vector<double> branch_low;   ///< greenest share relaxed from the all-standard market
    std::vector<bool> converged_high;
    std::vector<bool> converged_low;
    std::vector<bool> differs;
    /// Smallest and largest axis values where the branches differ.
    std::optional<std::pair<double, double>> window;
};

inline constexpr double kBranchSeparation = 1e-3;

HysteresisResult hysteresis_sweep(const HysteresisSpec& spec);

struct SurfaceSpec {
    MarketParams base;
    double k_min = 0.5;
    double k_max = 2.5;
    int k_steps = 41;
    double price_min = 0.4;
    double price_max = 1.6;
    int price_steps = 61;
    SimulationOptions simulation;
    unsigned jobs = 0;
};

/// Dual-branch grid over (k, greenest p0). Run 0 starts all-green, run 1 all-standard.
SweepResult surface(const SurfaceSpec& spec);

/// |u_top(high start) - u_top(low start)| for a surface cell.
double branch_difference(const SweepCell& cell);

}  // namespace mtl
