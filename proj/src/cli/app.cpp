#include "mtl/app.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtl/config.hpp"
#include "mtl/equilibrium.hpp"
#include "mtl/report.hpp"
#include "mtl/sweep.hpp"

namespace mtl {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitNoConvergence = 2;

struct Options {
    std::string config;
    std::optional<double> k;
    std::optional<double> lambda;
    std::optional<std::string> out;
    std::optional<unsigned> jobs;
};

std::string brief(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string brief(std::span<const double> xs) {
    std::string s = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + brief(xs[i]);
    return s + ")";
}

unsigned resolve_jobs(const Options& opts) {
    if (opts.jobs) return *opts.jobs;
    if (const char* env = std::getenv("MTL_JOBS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<unsigned>(value);
        } catch (const std::exception&) {
        }
        throw ConfigError("MTL_JOBS", "expected a positive integer");
    }
    return 0;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto staging = path;
    staging += ".tmp";
    {
        std::ofstream file(staging, std::ios::binary);
        if (!file) throw std::runtime_error("cannot write " + staging.string());
        file << contents;
    }
    std::filesystem::rename(staging, path);
}

int simulate_cmd(const RunConfig& config, const std::filesystem::path& out_path, std::ostream& out) {
    const auto traj = simulate(config.params, config.initial, config.simulation, config.schedule);
    std::ostringstream csv;
    report::write_trajectory(csv, traj, config.params.size());
    write_file(out_path, csv.str());

    const auto& last = traj.last();
    if (traj.converged) {
        out << "converged at t=" << *traj.t_converged;
    } else {
        out << "did not converge within t_max=" << config.simulation.t_max;
    }
    out << "; shares u=" << brief(last.u) << ", prices p=" << brief(last.prices) << ", survivors ["
        << report::join_ids(last.survivors) << "], non-buyers " << brief(last.nonbuyers) << ". Trajectory written to "
        << out_path.string() << ".\n";
    return traj.converged ? kExitOk : kExitNoConvergence;
}

int equilibrium_cmd(const RunConfig& config, const std::filesystem::path& out_path, std::ostream& out) {
    const auto starts = config.equilibrium_starts();
    const auto found = equilibrium_numeric(config.params, starts, config.simulation);
    std::ostringstream csv;
    report::write_equilibria(csv, found.equilibria, config.params.size());
    write_file(out_path, csv.str());

    out << found.equilibria.size() << " distinct equilibri" << (found.equilibria.size() == 1 ? "um" : "a")
        << " from " << starts.size() << " starts:";
    for (const auto& eq : found.equilibria) {
        out << " u=" << brief(eq.u) << " [survivors " << report::join_ids(eq.survivors) << "];";
    }
    const auto* uniform = dynamic_cast<const UniformWtp*>(config.params.wtp.get());
    if (uniform && config.params.k < uniform->width()) {
        const auto exact = equilibrium_uniform_closed_form(config.params);
        out << " closed form u=" << brief(exact.u) << ";";
    }
    if (!found.failed_starts.empty()) {
        out << " " << found.failed_starts.size() << " start(s) failed to converge or verify;";
    }
    out << " written to " << out_path.string() << ".\n";
    return found.failed_starts.empty() ? kExitOk : kExitNoConvergence;
}

int fixed_points_cmd(const RunConfig& config, const std::filesystem::path& out_path, std::ostream& out) {
    const auto& params = config.params;
    const auto set = green_fixed_points(*params.wtp, params.products.back().p0, params.k);
    std::ostringstream csv;
    report::write_fixed_points(csv, set);
    write_file(out_path, csv.str());

    out << set.points.size() << " fixed point(s) of the greenest share:";
    for (const auto& fp : set.points) {
        out << " " << brief(fp.u_star) << (fp.stable ? " (stable)" : fp.degenerate ? " (degenerate)" : " (unstable)")
            << ";";
    }
    if (set.separatrix) out << " separatrix " << brief(*set.separatrix) << ";";
    out << " multiplicity needs k >= " << brief(multiplicity_threshold(*params.wtp));
    if (const auto folds = fold_points(*params.wtp, params.k)) {
        out << ", bistable for greenest p0 in (" << brief(folds->first) << ", " << brief(folds->second) << ")";
    }
    out << "; written to " << out_path.string() << ".\n";
    return kExitOk;
}

int sweep_cmd(const RunConfig& config, const std::filesystem::path& out_path, unsigned jobs, std::ostream& out) {
    const auto result = sweep2d(config.sweep_spec(jobs));
    std::ostringstream csv;
    report::write_sweep(csv, result, config.params.size());
    write_file(out_path, csv.str());

    std::size_t failures = 0;
    std::size_t multi = 0;
    for (const auto& cell : result.cells) {
        for (const auto& run : cell.runs) failures += run.converged ? 0 : 1;
        multi += cell.attractors > 1 ? 1 : 0;
    }
    out << "swept " << result.axis1.size() << "x" << result.axis2.size() << " cells over " << result.axis1_name
        << (result.axis2_name.empty() ? "" : " and " + result.axis2_name) << "; " << failures
        << " non-converged run(s); " << multi << " cell(s) with several attractors; written to " << out_path.string()
        << ".\n";
    return kExitOk;
}

int hysteresis_cmd(const RunConfig& config, const std::filesystem::path& out_path, unsigned jobs, std::ostream& out) {
    const auto result = hysteresis_sweep(config.hysteresis_spec(jobs));
    std::ostringstream csv;
    report::write_hysteresis(csv, result);
    write_file(out_path, csv.str());

    if (result.window) {
        out << "hysteresis window over " << result.axis_name << ": [" << brief(result.window->first) << ", "
            << brief(result.window->second) << "]";
    } else {
        out << "no hysteresis window over " << result.axis_name << " (branches agree everywhere)";
    }
    if (const auto folds = fold_points(*config.params.wtp, config.params.k)) {
        out << "; tangency folds at " << brief(folds->first) << " and " << brief(folds->second);
    }
    out << "; written to " << out_path.string() << ".\n";
    return kExitOk;
}

int surface_cmd(const RunConfig& config, const std::filesystem::path& out_path, unsigned jobs, std::ostream& out) {
    const auto result = surface(config.surface_spec(jobs));
    std::ostringstream csv;
    report::write_sweep(csv, result, config.params.size());
    write_file(out_path, csv.str());

    std::size_t split = 0;
    std::optional<double> k_onset;
    for (const auto& cell : result.cells) {
        if (branch_difference(cell) > kBranchSeparation) {
            ++split;
            if (!k_onset || cell.x1 < *k_onset) k_onset = cell.x1;
        }
    }
    out << "surface " << result.axis1.size() << "x" << result.axis2.size() << ": " << split
        << " cell(s) where the branches differ";
    if (k_onset) out << ", smallest such k " << brief(*k_onset);
    out << " (multiplicity threshold " << brief(multiplicity_threshold(*config.params.wtp)) << "); written to "
        << out_path.string() << ".\n";
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Market-share dynamics under increasing returns and heterogeneous willingness to pay"};
    app.require_subcommand(1);
    Options opts;

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Relax the market from the initial shares and record the trajectory"},
        {"equilibrium", "Find equilibria by relaxing from several starts"},
        {"fixed-points", "Enumerate fixed points of the greenest product's share"},
        {"sweep2d", "Asymptotic shares over a one- or two-axis parameter grid"},
        {"hysteresis", "Dual-branch sweep of the greenest product's price"},
        {"surface", "Dual-branch grid over k and the greenest product's price"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", opts.config, "TOML run configuration")->required();
        sub->add_option("--k", opts.k, "Override the returns-to-scale slope");
        sub->add_option("--lambda", opts.lambda, "Override the relaxation rate");
        sub->add_option("--out", opts.out, "Output CSV path (default out/<command>.csv)");
        sub->add_option("--jobs", opts.jobs, "Worker threads for sweeps (default MTL_JOBS or all cores)")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    RunConfig config;
    unsigned jobs = 0;
    try {
        config = load_config(opts.config);
        if (opts.k) config.params.k = *opts.k;
        if (opts.lambda) config.params.lambda = *opts.lambda;
        config.validate();
        jobs = resolve_jobs(opts);
        if (command == "sweep2d") config.sweep_spec(jobs);
        if (command == "hysteresis") config.hysteresis_spec(jobs);
        if (command == "surface") config.surface_spec(jobs);
    } catch (const ConfigError& e) {
        err << "invalid config: " << e.what() << "\n";
        return kExitInvalid;
    }

    const std::filesystem::path out_path = opts.out.value_or("out/" + command + ".csv");
    try {
        if (command == "simulate") return simulate_cmd(config, out_path, out);
        if (command == "equilibrium") return equilibrium_cmd(config, out_path, out);
        if (command == "fixed-points") return fixed_points_cmd(config, out_path, out);
        if (command == "sweep2d") return sweep_cmd(config, out_path, jobs, out);
        if (command == "hysteresis") return hysteresis_cmd(config, out_path, jobs, out);
        return surface_cmd(config, out_path, jobs, out);
    } catch (const std::invalid_argument& e) {
        err << "invalid config: " << e.what() << "\n";
        return kExitInvalid;
    }
}

}  // namespace mtl
