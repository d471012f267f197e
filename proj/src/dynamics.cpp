#include "mtl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mtl {

void Intervention::validate(std::size_t n_products) const {
    if (t_start < 0 || t_end < t_start) {
        throw std::invalid_argument("schedule: require 0 <= t_start <= t_end");
    }
    if (!std::isfinite(value)) throw std::invalid_argument("schedule: value must be finite");
    switch (target) {
        case InterventionTarget::ProductPrice:
        case InterventionTarget::ShareInjection:
            if (product >= n_products) {
                throw std::invalid_argument("schedule: target product " + std::to_string(product) +
                                            " does not exist");
            }
            break;
        case InterventionTarget::ReturnsSlope:
            if (mode == InterventionMode::Set && value < 0.0) {
                throw std::invalid_argument("schedule: k override must be >= 0");
            }
            break;
    }
    if (target == InterventionTarget::ShareInjection && mode == InterventionMode::Set &&
        (value < 0.0 || value > 1.0)) {
        throw std::invalid_argument("schedule: injected share must lie in [0, 1]");
    }
}

MarketState step(const MarketParams& params, const MarketState& state) {
    const auto prices = effective_prices(params, state.u);
    const auto survivors = rank_and_eliminate(prices);
    const auto demand = demand_shares(*params.wtp, prices, survivors);

    MarketState next;
    next.t = state.t + 1;
    next.u.resize(state.u.size());
    const double keep = 1.0 - params.lambda;
    for (std::size_t i = 0; i < next.u.size(); ++i) {
        next.u[i] = keep * state.u[i] + params.lambda * demand.shares[i];
    }
    return next;
}

MarketState default_initial_state(std::size_t n) { return MarketState::pure(n, 0); }

MarketParams effective_params(const MarketParams& base, const Schedule& schedule, long t) {
    MarketParams params = base;
    for (const auto& iv : schedule) {
        if (!iv.active(t)) continue;
        const auto apply = [&](double& slot) {
            slot = iv.mode == InterventionMode::Set ? iv.value : slot + iv.value;
        };
        switch (iv.target) {
            case InterventionTarget::ProductPrice: apply(params.products.at(iv.product).p0); break;
            case InterventionTarget::ReturnsSlope: apply(params.k); break;
            case InterventionTarget::ShareInjection: break;
        }
    }
    if (params.k < 0.0) throw std::invalid_argument("schedule: k override drives k below 0");
    return params;
}

void inject_share(std::vector<double>& u, std::size_t product, double target_share) {
    const double target = std::clamp(target_share, 0.0, 1.0);
    const double rest = 1.0 - u.at(product);
    const double scale = rest > 0.0 ? (1.0 - target) / rest : 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (j != product) u[j] *= scale;
    }
    u[product] = target;
}

namespace {

bool any_active(const Schedule& schedule, long t) {
    return std::any_of(schedule.begin(), schedule.end(), [t](const Intervention& iv) {
        return iv.target != InterventionTarget::ShareInjection && iv.active(t);
    });
}

void apply_injections(const Schedule& schedule, MarketState& state) {
    for (const auto& iv : schedule) {
        if (iv.target != InterventionTarget::ShareInjection || iv.t_start != state.t) continue;
        const double target =
            iv.mode == InterventionMode::Set ? iv.value : state.u[iv.product] + iv.value;
        inject_share(state.u, iv.product, target);
    }
}

template <typename OnState>
Outcome iterate(const MarketParams& params, const MarketState& initial,
                const SimulationOptions& options, const Schedule& schedule, OnState&& on_state) {
    params.validate();
    if (options.t_max < 1) throw std::invalid_argument("t_max: must be >= 1");
    if (!(options.tol > 0.0)) throw std::invalid_argument("tol: must be > 0");
    if (initial.u.size() != params.size()) {
        throw std::invalid_argument("initial: expected " + std::to_string(params.size()) + " shares");
    }
    if (!is_valid_state(initial.u)) {
        throw std::invalid_argument("initial: shares must lie in [0,1] and sum to at most 1");
    }
    long quiet_after = -1;
    for (const auto& iv : schedule) {
        iv.validate(params.size());
        quiet_after = std::max(quiet_after, iv.t_end);
    }

    Outcome out;
    out.state = initial;
    long steps = 0;
    while (true) {
        apply_injections(schedule, out.state);
        const long t = out.state.t;
        MarketParams overridden;
        const MarketParams* current = &params;
        if (any_active(schedule, t)) {
            overridden = effective_params(params, schedule, t);
            current = &overridden;
        }
        on_state(*current, out.state);
        if (out.converged || steps == options.t_max) break;

        MarketState next = step(*current, out.state);
        ++steps;
        double change = 0.0;
        for (std::size_t i = 0; i < next.u.size(); ++i) {
            change = std::max(change, std::abs(next.u[i] - out.state.u[i]));
        }
        out.state = std::move(next);
        if (t > quiet_after && change < options.tol) {
            out.converged = true;
            out.t_converged = out.state.t;
        }
    }
    return out;
}

}  // namespace

Trajectory simulate(const MarketParams& params, const MarketState& initial,
                    const SimulationOptions& options, const Schedule& schedule) {
    Trajectory traj;
    const auto outcome = iterate(params, initial, options, schedule,
                                 [&](const MarketParams& current, const MarketState& state) {
                                     StepRecord rec;
                                     rec.t = state.t;
                                     rec.u = state.u;
                                     rec.prices = effective_prices(current, state.u);
                                     rec.survivors = rank_and_eliminate(rec.prices);
                                     rec.nonbuyers = nonbuyer_share(state.u);
                                     traj.records.push_back(std::move(rec));
                                 });
    traj.converged = outcome.converged;
    traj.t_converged = outcome.t_converged;
    return traj;
}

Outcome run_to_convergence(const MarketParams& params, const MarketState& initial,
                           const SimulationOptions& options, const Schedule& schedule) {
    return iterate(params, initial, options, schedule, [](const MarketParams&, const MarketState&) {});
}

}  // namespace mtl
