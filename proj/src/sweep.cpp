#include "mtl/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "parallel.hpp"

namespace mtl {

namespace {

constexpr double kShareFloor = 1e-6;
constexpr double kEndpointMerge = 1e-6;

std::size_t parse_index(std::string_view inner, const MarketParams& params, std::string_view text) {
    for (const auto& product : params.products) {
        if (product.name == inner) return product.id;
    }
    std::size_t id = 0;
    if (inner.empty()) throw std::invalid_argument("parameter path '" + std::string(text) + "': empty product");
    for (char c : inner) {
        if (c < '0' || c > '9') {
            throw std::invalid_argument("parameter path '" + std::string(text) + "': unknown product");
        }
        id = id * 10 + static_cast<std::size_t>(c - '0');
    }
    if (id >= params.size()) {
        throw std::invalid_argument("parameter path '" + std::string(text) + "': product index out of range");
    }
    return id;
}

RunOutcome run_cell(const MarketParams& params, const std::vector<double>& start,
                    const SimulationOptions& options) {
    const auto outcome = run_to_convergence(params, MarketState{start, 0}, options);
    RunOutcome run;
    run.u = outcome.state.u;
    run.survivors = rank_and_eliminate(effective_prices(params, run.u));
    run.converged = outcome.converged;
    run.t_converged = outcome.t_converged;
    return run;
}

void label(SweepCell& cell) {
    const auto& first = cell.runs.front().u;
    cell.surviving_products =
        static_cast<int>(std::count_if(first.begin(), first.end(), [](double x) { return x > kShareFloor; }));
    std::vector<const std::vector<double>*> distinct;
    for (const auto& run : cell.runs) {
        if (!run.converged) continue;
        const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const std::vector<double>* other) {
            for (std::size_t p = 0; p < run.u.size(); ++p) {
                if (std::abs((*other)[p] - run.u[p]) >= kEndpointMerge) return false;
            }
            return true;
        });
        if (!seen) distinct.push_back(&run.u);
    }
    cell.attractors = static_cast<int>(distinct.size());
}

std::vector<double> all_green(std::size_t n) { return MarketState::pure(n, n - 1).u; }

std::vector<double> all_standard(std::size_t n) {
    return n > 1 ? MarketState::pure(n, 0).u : MarketState::empty(n).u;
}

}  // namespace

ParameterPath ParameterPath::parse(std::string_view text, const MarketParams& params) {
    if (text == "k") return {Kind::ReturnsSlope, 0};
    if (text == "lambda") return {Kind::RelaxationRate, 0};
    if (text.starts_with("p0[") && text.ends_with("]")) {
        return {Kind::ProductPrice, parse_index(text.substr(3, text.size() - 4), params, text)};
    }
    throw std::invalid_argument("parameter path '" + std::string(text) + "': expected k, lambda or p0[<product>]");
}

ParameterPath ParameterPath::top_price(const MarketParams& params) {
    return {Kind::ProductPrice, params.top()};
}

void ParameterPath::apply(MarketParams& params, double value) const {
    switch (kind) {
        case Kind::ProductPrice: params.products.at(product).p0 = value; break;
        case Kind::ReturnsSlope: params.k = value; break;
        case Kind::RelaxationRate: params.lambda = value; break;
    }
}

double ParameterPath::read(const MarketParams& params) const {
    switch (kind) {
        case Kind::ProductPrice: return params.products.at(product).p0;
        case Kind::ReturnsSlope: return params.k;
        case Kind::RelaxationRate: return params.lambda;
    }
    return 0.0;
}

std::string ParameterPath::to_string() const {
    switch (kind) {
        case Kind::ProductPrice: return "p0[" + std::to_string(product) + "]";
        case Kind::ReturnsSlope: return "k";
        case Kind::RelaxationRate: return "lambda";
    }
    return {};
}

double Axis::value(int i) const {
    if (steps == 1) return min;
    if (i == steps - 1) return max;
    return min + (max - min) * i / (steps - 1);
}

void Axis::validate(const MarketParams& base, const std::string& label) const {
    if (steps < 1) throw std::invalid_argument(label + ".steps: must be >= 1");
    if (!std::isfinite(min) || !std::isfinite(max)) throw std::invalid_argument(label + ": bounds must be finite");
    if (steps >= 2 && !(min < max)) throw std::invalid_argument(label + ": require min < max");
    if (steps == 1 && min > max) throw std::invalid_argument(label + ": require min <= max");
    for (double v : {min, max}) {
        MarketParams probe = base;
        path.apply(probe, v);
        try {
            probe.validate();
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(label + ": value " + std::to_string(v) + " is invalid (" + e.what() + ")");
        }
    }
}

SweepResult sweep2d(const SweepSpec& spec) {
    spec.base.validate();
    spec.axis1.validate(spec.base, "axis1");
    if (spec.axis2) spec.axis2->validate(spec.base, "axis2");
    const std::size_t n = spec.base.size();
    auto inits = spec.initial_conditions;
    if (inits.empty()) inits.push_back(default_initial_state(n).u);
    for (const auto& init : inits) {
        if (init.size() != n || !is_valid_state(init)) {
            throw std::invalid_argument("initial_conditions: each entry needs " + std::to_string(n) +
                                        " valid shares");
        }
    }

    SweepResult result;
    result.axis1_name = spec.axis1.path.to_string();
    for (int i = 0; i < spec.axis1.steps; ++i) result.axis1.push_back(spec.axis1.value(i));
    if (spec.axis2) {
        result.axis2_name = spec.axis2->path.to_string();
        for (int j = 0; j < spec.axis2->steps; ++j) result.axis2.push_back(spec.axis2->value(j));
    } else {
        result.axis2.push_back(0.0);
    }
    const int n1 = spec.axis1.steps;
    const int n2 = static_cast<int>(result.axis2.size());
    result.cells.resize(static_cast<std::size_t>(n1) * n2);

    const auto cell_params = [&](int i, int j) {
        MarketParams params = spec.base;
        spec.axis1.path.apply(params, result.axis1[i]);
        if (spec.axis2) spec.axis2->path.apply(params, result.axis2[j]);
        return params;
    };
    const auto prepare = [&](int i, int j) -> SweepCell& {
        SweepCell& cell = result.cells[static_cast<std::size_t>(i) * n2 + j];
        cell.i = i;
        cell.j = j;
        cell.x1 = result.axis1[i];
        cell.x2 = spec.axis2 ? result.axis2[j] : 0.0;
        return cell;
    };

    if (spec.protocol == SweepProtocol::IndependentInit) {
        detail::parallel_for(result.cells.size(), spec.jobs, [&](std::size_t index) {
            const int i = static_cast<int>(index / n2);
            const int j = static_cast<int>(index % n2);
            SweepCell& cell = prepare(i, j);
            const auto params = cell_params(i, j);
            for (const auto& init : inits) cell.runs.push_back(run_cell(params, init, spec.simulation));
            label(cell);
        });
    } else {
        detail::parallel_for(static_cast<std::size_t>(n2), spec.jobs, [&](std::size_t column) {
            const int j = static_cast<int>(column);
            auto starts = inits;
            for (int i = 0; i < n1; ++i) {
                SweepCell& cell = prepare(i, j);
                const auto params = cell_params(i, j);
                for (std::size_t r = 0; r < starts.size(); ++r) {
                    cell.runs.push_back(run_cell(params, starts[r], spec.simulation));
                    starts[r] = cell.runs.back().u;
                }
                label(cell);
            }
        });
    }
    return result;
}

HysteresisResult hysteresis_sweep(const HysteresisSpec& spec) {
    spec.base.validate();
    const std::size_t n = spec.base.size();
    const ParameterPath path = spec.path.value_or(ParameterPath::top_price(spec.base));
    const Axis axis{path, spec.min, spec.max, spec.steps};
    axis.validate(spec.base, "hysteresis");

    HysteresisResult result;
    result.axis_name = path.to_string();
    const auto count = static_cast<std::size_t>(spec.steps);
    for (int i = 0; i < spec.steps; ++i) result.axis.push_back(axis.value(i));
    result.branch_high.assign(count, 0.0);
    result.branch_low.assign(count, 0.0);
    result.converged_high.assign(count, false);
    result.converged_low.assign(count, false);

    const auto params_at = [&](std::size_t i) {
        MarketParams params = spec.base;
        path.apply(params, result.axis[i]);
        return params;
    };
    const std::size_t top = n - 1;

    // Slot 2i holds the high-branch run at axis[i], slot 2i+1 the low-branch run.
    std::vector<RunOutcome> runs(2 * count);
    if (spec.protocol == SweepProtocol::IndependentInit) {
        detail::parallel_for(2 * count, spec.jobs, [&](std::size_t task) {
            const bool high = task % 2 == 0;
            runs[task] = run_cell(params_at(task / 2), high ? all_green(n) : all_standard(n), spec.simulation);
        });
    } else {
        // High branch is followed upward from the all-green market, low branch downward.
        detail::parallel_for(2, spec.jobs, [&](std::size_t branch) {
            const bool high = branch == 0;
            auto state = high ? all_green(n) : all_standard(n);
            for (std::size_t step = 0; step < count; ++step) {
                const std::size_t i = high ? step : count - 1 - step;
                runs[2 * i + branch] = run_cell(params_at(i), state, spec.simulation);
                state = runs[2 * i + branch].u;
            }
        });
    }
    for (std::size_t i = 0; i < count; ++i) {
        result.branch_high[i] = runs[2 * i].u[top];
        result.converged_high[i] = runs[2 * i].converged;
        result.branch_low[i] = runs[2 * i + 1].u[top];
        result.converged_low[i] = runs[2 * i + 1].converged;
    }

    result.differs.assign(count, false);
    for (std::size_t i = 0; i < count; ++i) {
        result.differs[i] = std::abs(result.branch_high[i] - result.branch_low[i]) > kBranchSeparation;
        if (!result.differs[i]) continue;
        if (!result.window) {
            result.window = std::pair{result.axis[i], result.axis[i]};
        } else {
            result.window->second = result.axis[i];
        }
    }
    return result;
}

SweepResult surface(const SurfaceSpec& spec) {
    SweepSpec sweep;
    sweep.base = spec.base;
    sweep.axis1 = Axis{{ParameterPath::Kind::ReturnsSlope, 0}, spec.k_min, spec.k_max, spec.k_steps};
    sweep.axis2 = Axis{ParameterPath::top_price(spec.base), spec.price_min, spec.price_max, spec.price_steps};
    const std::size_t n = spec.base.size();
    sweep.initial_conditions = {all_green(n), all_standard(n)};
    sweep.protocol = SweepProtocol::IndependentInit;
    sweep.simulation = spec.simulation;
    sweep.jobs = spec.jobs;
    return sweep2d(sweep);
}

double branch_difference(const SweepCell& cell) {
    if (cell.runs.size() < 2) return 0.0;
    const std::size_t top = cell.runs[0].u.size() - 1;
    return std::abs(cell.runs[0].u[top] - cell.runs[1].u[top]);
}

}  // namespace mtl
