#include "mtl/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "toml.hpp"

namespace mtl {

namespace {

std::string join(std::string_view prefix, std::string_view key) {
    return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

void check_keys(const toml::table& table, std::string_view prefix,
                std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, node] : table) {
        bool known = false;
        for (auto a : allowed) known = known || key.str() == a;
        if (!known) throw ConfigError(join(prefix, key.str()), "unknown key");
    }
}

const toml::table& as_table(const toml::node& node, const std::string& key) {
    const auto* table = node.as_table();
    if (table == nullptr) throw ConfigError(key, "expected a table");
    return *table;
}

const toml::array& as_array(const toml::node& node, const std::string& key) {
    const auto* array = node.as_array();
    if (array == nullptr) throw ConfigError(key, "expected an array");
    return *array;
}

double as_number(const toml::node& node, const std::string& key) {
    if (const auto* f = node.as_floating_point()) return f->get();
    if (const auto* i = node.as_integer()) return static_cast<double>(i->get());
    throw ConfigError(key, "expected a number");
}

long as_integer(const toml::node& node, const std::string& key) {
    if (const auto* i = node.as_integer()) return static_cast<long>(i->get());
    throw ConfigError(key, "expected an integer");
}

std::string as_string(const toml::node& node, const std::string& key) {
    if (const auto* s = node.as_string()) return s->get();
    throw ConfigError(key, "expected a string");
}

const toml::node& required(const toml::table& table, std::string_view prefix, std::string_view key) {
    const auto* node = table.get(key);
    if (node == nullptr) throw ConfigError(join(prefix, key), "missing required key");
    return *node;
}

double number_or(const toml::table& table, std::string_view prefix, std::string_view key, double fallback) {
    const auto* node = table.get(key);
    return node ? as_number(*node, join(prefix, key)) : fallback;
}

std::vector<double> number_list(const toml::node& node, const std::string& key) {
    std::vector<double> out;
    const auto& array = as_array(node, key);
    for (std::size_t i = 0; i < array.size(); ++i) {
        out.push_back(as_number(*array.get(i), key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::vector<double>> share_lists(const toml::node& node, const std::string& key) {
    std::vector<std::vector<double>> out;
    const auto& array = as_array(node, key);
    for (std::size_t i = 0; i < array.size(); ++i) {
        out.push_back(number_list(*array.get(i), key + "[" + std::to_string(i) + "]"));
    }
    return out;
}

WtpPtr parse_distribution(const toml::table& table) {
    const std::string kind = as_string(required(table, "distribution", "kind"), "distribution.kind");
    try {
        if (kind == "uniform") {
            check_keys(table, "distribution", {"kind", "min", "max"});
            return std::make_shared<UniformWtp>(as_number(required(table, "distribution", "min"), "distribution.min"),
                                                as_number(required(table, "distribution", "max"), "distribution.max"));
        }
        if (kind == "logit") {
            check_keys(table, "distribution", {"kind", "center", "width"});
            return std::make_shared<LogitWtp>(LogitWtp::from_width(
                number_or(table, "distribution", "center", 0.0),
                as_number(required(table, "distribution", "width"), "distribution.width")));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("distribution", e.what());
    }
    throw ConfigError("distribution.kind", "expected \"uniform\" or \"logit\", got \"" + kind + "\"");
}

std::vector<ProductSpec> parse_products(const toml::array& array) {
    std::vector<ProductSpec> products;
    for (std::size_t i = 0; i < array.size(); ++i) {
        const std::string key = "products[" + std::to_string(i) + "]";
        const auto& table = as_table(*array.get(i), key);
        check_keys(table, key, {"name", "p0"});
        ProductSpec product;
        product.id = i;
        product.name = table.get("name") ? as_string(*table.get("name"), key + ".name") : "product_" + std::to_string(i);
        product.p0 = as_number(required(table, key, "p0"), key + ".p0");
        for (const auto& other : products) {
            if (other.name == product.name) throw ConfigError(key + ".name", "duplicate product name");
        }
        products.push_back(std::move(product));
    }
    return products;
}

SweepProtocol parse_protocol(const toml::table& table, std::string_view prefix) {
    const auto* node = table.get("protocol");
    if (node == nullptr) return SweepProtocol::IndependentInit;
    const std::string key = join(prefix, "protocol");
    const std::string value = as_string(*node, key);
    if (value == "independent") return SweepProtocol::IndependentInit;
    if (value == "continuation") return SweepProtocol::Continuation;
    throw ConfigError(key, "expected \"independent\" or \"continuation\"");
}

AxisConfig parse_axis(const toml::node& node, const std::string& key) {
    const auto& table = as_table(node, key);
    check_keys(table, key, {"param", "min", "max", "steps"});
    AxisConfig axis;
    axis.param = as_string(required(table, key, "param"), key + ".param");
    axis.min = as_number(required(table, key, "min"), key + ".min");
    axis.max = as_number(required(table, key, "max"), key + ".max");
    if (const auto* steps = table.get("steps")) axis.steps = static_cast<int>(as_integer(*steps, key + ".steps"));
    return axis;
}

std::size_t product_ref(std::string_view inner, const MarketParams& params, const std::string& key) {
    try {
        return ParameterPath::parse("p0[" + std::string(inner) + "]", params).product;
    } catch (const std::invalid_argument&) {
        throw ConfigError(key, "unknown product '" + std::string(inner) + "'");
    }
}

Intervention parse_intervention(const toml::table& table, const std::string& key, const MarketParams& params) {
    check_keys(table, key, {"t_start", "t_end", "target", "mode", "value"});
    Intervention iv;
    iv.t_start = as_integer(required(table, key, "t_start"), key + ".t_start");
    iv.t_end = table.get("t_end") ? as_integer(*table.get("t_end"), key + ".t_end") : iv.t_start;
    iv.value = as_number(required(table, key, "value"), key + ".value");

    const std::string target = as_string(required(table, key, "target"), key + ".target");
    if (target == "k") {
        iv.target = InterventionTarget::ReturnsSlope;
    } else if (target.starts_with("p0[") && target.ends_with("]")) {
        iv.target = InterventionTarget::ProductPrice;
        iv.product = product_ref(std::string_view(target).substr(3, target.size() - 4), params, key + ".target");
    } else if (target.starts_with("share[") && target.ends_with("]")) {
        iv.target = InterventionTarget::ShareInjection;
        iv.product = product_ref(std::string_view(target).substr(6, target.size() - 7), params, key + ".target");
    } else {
        throw ConfigError(key + ".target", "expected k, p0[<product>] or share[<product>]");
    }

    const std::string mode = table.get("mode") ? as_string(*table.get("mode"), key + ".mode") : "set";
    if (mode == "set") {
        iv.mode = InterventionMode::Set;
    } else if (mode == "add") {
        iv.mode = InterventionMode::Add;
    } else {
        throw ConfigError(key + ".mode", "expected \"set\" or \"add\"");
    }
    return iv;
}

void check_shares(const std::vector<double>& u, std::size_t n, const std::string& key) {
    if (u.size() != n) throw ConfigError(key, "expected " + std::to_string(n) + " shares");
    if (!is_valid_state(u)) throw ConfigError(key, "shares must lie in [0,1] and sum to at most 1");
}

Axis resolve_axis(const AxisConfig& axis, const MarketParams& params, const std::string& key) {
    try {
        return Axis{ParameterPath::parse(axis.param, params), axis.min, axis.max, axis.steps};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ".param", e.what());
    }
}

template <typename Fn>
void rethrow_as_config(const std::string& key, Fn&& fn) {
    try {
        fn();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key, e.what());
    }
}

}  // namespace

void RunConfig::validate() const {
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        // Messages already lead with the key name.
        const std::string what = e.what();
        throw ConfigError(what.substr(0, what.find(':')), what.substr(what.find(':') + 2));
    }
    check_shares(initial.u, params.size(), "initial");
    if (simulation.t_max < 1) throw ConfigError("t_max", "must be >= 1");
    if (!(simulation.tol > 0.0)) throw ConfigError("tol", "must be > 0");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        rethrow_as_config("schedule[" + std::to_string(i) + "]", [&] { schedule[i].validate(params.size()); });
    }
    if (sweep) {
        rethrow_as_config("sweep.axis1", [&] { resolve_axis(sweep->axis1, params, "sweep.axis1").validate(params, "sweep.axis1"); });
        if (sweep->axis2) {
            rethrow_as_config("sweep.axis2", [&] { resolve_axis(*sweep->axis2, params, "sweep.axis2").validate(params, "sweep.axis2"); });
        }
        for (std::size_t i = 0; i < sweep->initial_conditions.size(); ++i) {
            check_shares(sweep->initial_conditions[i], params.size(),
                         "sweep.initial_conditions[" + std::to_string(i) + "]");
        }
    }
    if (hysteresis) {
        if (hysteresis->steps < 2) throw ConfigError("hysteresis.steps", "must be >= 2");
        const auto spec = hysteresis_spec(0);
        rethrow_as_config("hysteresis", [&] {
            Axis{spec.path.value(), spec.min, spec.max, spec.steps}.validate(params, "hysteresis");
        });
    }
    if (surface) {
        const auto spec = surface_spec(0);
        rethrow_as_config("surface.k", [&] {
            Axis{{ParameterPath::Kind::ReturnsSlope, 0}, spec.k_min, spec.k_max, spec.k_steps}.validate(params, "surface.k");
        });
        rethrow_as_config("surface.p0", [&] {
            Axis{ParameterPath::top_price(params), spec.price_min, spec.price_max, spec.price_steps}.validate(params, "surface.p0");
        });
    }
    if (equilibrium) {
        for (std::size_t i = 0; i < equilibrium->starts.size(); ++i) {
            check_shares(equilibrium->starts[i], params.size(), "equilibrium.starts[" + std::to_string(i) + "]");
        }
    }
}

SweepSpec RunConfig::sweep_spec(unsigned jobs) const {
    if (!sweep) throw ConfigError("sweep", "missing [sweep] block");
    SweepSpec spec;
    spec.base = params;
    spec.axis1 = resolve_axis(sweep->axis1, params, "sweep.axis1");
    if (sweep->axis2) spec.axis2 = resolve_axis(*sweep->axis2, params, "sweep.axis2");
    spec.initial_conditions = sweep->initial_conditions;
    if (spec.initial_conditions.empty()) spec.initial_conditions.push_back(initial.u);
    spec.protocol = sweep->protocol;
    spec.simulation = simulation;
    spec.jobs = jobs;
    return spec;
}

HysteresisSpec RunConfig::hysteresis_spec(unsigned jobs) const {
    if (!hysteresis) throw ConfigError("hysteresis", "missing [hysteresis] block");
    HysteresisSpec spec;
    spec.base = params;
    if (hysteresis->param) {
        try {
            spec.path = ParameterPath::parse(*hysteresis->param, params);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("hysteresis.param", e.what());
        }
    } else {
        spec.path = ParameterPath::top_price(params);
    }
    spec.min = hysteresis->min;
    spec.max = hysteresis->max;
    spec.steps = hysteresis->steps;
    spec.protocol = hysteresis->protocol;
    spec.simulation = simulation;
    spec.jobs = jobs;
    return spec;
}

SurfaceSpec RunConfig::surface_spec(unsigned jobs) const {
    if (!surface) throw ConfigError("surface", "missing [surface] block");
    SurfaceSpec spec;
    spec.base = params;
    spec.k_min = surface->k_min;
    spec.k_max = surface->k_max;
    spec.k_steps = surface->k_steps;
    spec.price_min = surface->price_min;
    spec.price_max = surface->price_max;
    spec.price_steps = surface->price_steps;
    spec.simulation = simulation;
    spec.jobs = jobs;
    return spec;
}

std::vector<MarketState> RunConfig::equilibrium_starts() const {
    if (!equilibrium || equilibrium->starts.empty()) return default_starts(params.size());
    std::vector<MarketState> starts;
    for (const auto& u : equilibrium->starts) starts.push_back(MarketState{u, 0});
    return starts;
}

RunConfig parse_config(std::string_view text, const std::string& source) {
    toml::table root;
    try {
        root = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << e.description() << " (line " << e.source().begin.line << ")";
        throw ConfigError(source, msg.str());
    }
    check_keys(root, "", {"k", "lambda", "distribution", "products", "initial", "t_max", "tol", "schedule",
                          "sweep", "hysteresis", "surface", "equilibrium"});

    RunConfig config;
    config.params.products = parse_products(as_array(required(root, "", "products"), "products"));
    if (config.params.products.empty()) throw ConfigError("products", "at least one product is required");
    config.params.wtp = parse_distribution(as_table(required(root, "", "distribution"), "distribution"));
    config.params.k = as_number(required(root, "", "k"), "k");
    config.params.lambda = number_or(root, "", "lambda", 0.1);

    const std::size_t n = config.params.size();
    config.initial = root.get("initial") ? MarketState{number_list(*root.get("initial"), "initial"), 0}
                                         : default_initial_state(n);
    if (const auto* node = root.get("t_max")) config.simulation.t_max = as_integer(*node, "t_max");
    config.simulation.tol = number_or(root, "", "tol", config.simulation.tol);

    if (const auto* node = root.get("schedule")) {
        const auto& array = as_array(*node, "schedule");
        for (std::size_t i = 0; i < array.size(); ++i) {
            const std::string key = "schedule[" + std::to_string(i) + "]";
            config.schedule.push_back(parse_intervention(as_table(*array.get(i), key), key, config.params));
        }
    }

    if (const auto* node = root.get("sweep")) {
        const auto& table = as_table(*node, "sweep");
        check_keys(table, "sweep", {"axis1", "axis2", "initial_conditions", "protocol"});
        SweepConfig sweep;
        sweep.axis1 = parse_axis(required(table, "sweep", "axis1"), "sweep.axis1");
        if (const auto* axis2 = table.get("axis2")) sweep.axis2 = parse_axis(*axis2, "sweep.axis2");
        if (const auto* inits = table.get("initial_conditions")) {
            sweep.initial_conditions = share_lists(*inits, "sweep.initial_conditions");
        }
        sweep.protocol = parse_protocol(table, "sweep");
        config.sweep = std::move(sweep);
    }

    if (const auto* node = root.get("hysteresis")) {
        const auto& table = as_table(*node, "hysteresis");
        check_keys(table, "hysteresis", {"param", "min", "max", "steps", "protocol"});
        HysteresisConfig hysteresis;
        if (const auto* param = table.get("param")) hysteresis.param = as_string(*param, "hysteresis.param");
        hysteresis.min = as_number(required(table, "hysteresis", "min"), "hysteresis.min");
        hysteresis.max = as_number(required(table, "hysteresis", "max"), "hysteresis.max");
        if (const auto* steps = table.get("steps")) {
            hysteresis.steps = static_cast<int>(as_integer(*steps, "hysteresis.steps"));
        }
        hysteresis.protocol = parse_protocol(table, "hysteresis");
        config.hysteresis = hysteresis;
    }

    if (const auto* node = root.get("surface")) {
        const auto& table = as_table(*node, "surface");
        check_keys(table, "surface", {"k", "p0"});
        SurfaceConfig surface;
        const auto range = [&](std::string_view key, double& lo, double& hi, int& steps) {
            const std::string path = join("surface", key);
            const auto& sub = as_table(required(table, "surface", key), path);
            check_keys(sub, path, {"min", "max", "steps"});
            lo = as_number(required(sub, path, "min"), path + ".min");
            hi = as_number(required(sub, path, "max"), path + ".max");
            if (const auto* s = sub.get("steps")) steps = static_cast<int>(as_integer(*s, path + ".steps"));
        };
        range("k", surface.k_min, surface.k_max, surface.k_steps);
        range("p0", surface.price_min, surface.price_max, surface.price_steps);
        config.surface = surface;
    }

    if (const auto* node = root.get("equilibrium")) {
        const auto& table = as_table(*node, "equilibrium");
        check_keys(table, "equilibrium", {"starts"});
        EquilibriumConfig equilibrium;
        if (const auto* starts = table.get("starts")) equilibrium.starts = share_lists(*starts, "equilibrium.starts");
        config.equilibrium = equilibrium;
    }

    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

}  // namespace mtl
