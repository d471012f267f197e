#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mtl/dynamics.hpp"
#include "mtl/equilibrium.hpp"
#include "mtl/market.hpp"
#include "mtl/sweep.hpp"

namespace mtl {

/// Invalid run configuration. `key()` is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct AxisConfig {
    std::string param;
    double min = 0.0;
    double max = 1.0;
    int steps = 101;
};

struct SweepConfig {
    AxisConfig axis1;
    std::optional<AxisConfig> axis2;
    std::vector<std::vector<double>> initial_conditions;
    SweepProtocol protocol = SweepProtocol::IndependentInit;
};

struct HysteresisConfig {
    std::optional<std::string> param;
    double min = 0.0;
    double max = 1.0;
    int steps = 241;
    SweepProtocol protocol = SweepProtocol::IndependentInit;
};

struct SurfaceConfig {
    double k_min = 0.5;
    double k_max = 2.5;
    int k_steps = 41;
    double price_min = 0.4;
    double price_max = 1.6;
    int price_steps = 61;
};

struct EquilibriumConfig {
    std::vector<std::vector<double>> starts;
};

/// Everything one run needs, parsed from a TOML file. Sections mirror the library types:
///
///     k = 0.2
///     lambda = 0.1
///     distribution = { kind = "uniform", min = 0.0, max = 1.0 }
///     products = [ { name = "standard", p0 = 0.5 }, { name = "green", p0 = 0.8 } ]
///
/// plus optional `initial`, `t_max`, `tol`, `[[schedule]]` and one block per command
/// (`[sweep]`, `[hysteresis]`, `[surface]`, `[equilibrium]`). Unknown keys are rejected.
struct RunConfig {
    MarketParams params;
    MarketState initial;
    SimulationOptions simulation;
    Schedule schedule;
    std::optional<SweepConfig> sweep;
    std::optional<HysteresisConfig> hysteresis;
    std::optional<SurfaceConfig> surface;
    std::optional<EquilibriumConfig> equilibrium;

    /// Re-checks every invariant; throws ConfigError.
    void validate() const;

    SweepSpec sweep_spec(unsigned jobs) const;
    HysteresisSpec hysteresis_spec(unsigned jobs) const;
    SurfaceSpec surface_spec(unsigned jobs) const;
    std::vector<MarketState> equilibrium_starts() const;
};

RunConfig parse_config(std::string_view text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace mtl
