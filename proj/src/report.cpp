#include "mtl/report.hpp"

#include <cstdio>

namespace mtl::report {

std::string format_number(double x) {
    if (x == 0.0) return "0";  // folds -0 into 0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string join_ids(std::span<const std::size_t> ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i > 0) out += ';';
        out += std::to_string(ids[i]);
    }
    return out;
}

namespace {

void indexed_columns(std::ostream& out, const char* prefix, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out << ',' << prefix << i;
}

void values(std::ostream& out, std::span<const double> xs) {
    for (double x : xs) out << ',' << format_number(x);
}

}  // namespace

void write_trajectory(std::ostream& out, const Trajectory& traj, std::size_t n) {
    out << 't';
    indexed_columns(out, "u_", n);
    indexed_columns(out, "p_", n);
    out << ",nonbuyers,survivors\n";
    for (const auto& rec : traj.records) {
        out << rec.t;
        values(out, rec.u);
        values(out, rec.prices);
        out << ',' << format_number(rec.nonbuyers) << ',' << join_ids(rec.survivors) << '\n';
    }
}

void write_equilibria(std::ostream& out, std::span<const FullEquilibrium> equilibria, std::size_t n) {
    out << "eq_index";
    indexed_columns(out, "u_", n);
    indexed_columns(out, "p_", n);
    out << ",survivors,residual\n";
    for (std::size_t e = 0; e < equilibria.size(); ++e) {
        out << e;
        values(out, equilibria[e].u);
        values(out, equilibria[e].prices);
        out << ',' << join_ids(equilibria[e].survivors) << ',' << format_number(equilibria[e].residual) << '\n';
    }
}

void write_fixed_points(std::ostream& out, const FixedPointSet& set) {
    out << "u_star,stable,residual\n";
    for (const auto& fp : set.points) {
        out << format_number(fp.u_star) << ',' << (fp.stable ? 1 : 0) << ',' << format_number(fp.residual) << '\n';
    }
}

void write_sweep(std::ostream& out, const SweepResult& result, std::size_t n) {
    out << "# axis1=" << result.axis1_name << " steps=" << result.axis1.size();
    if (!result.axis2_name.empty()) out << " axis2=" << result.axis2_name << " steps=" << result.axis2.size();
    out << '\n';
    out << "axis1,axis2,init_idx";
    indexed_columns(out, "u_", n);
    out << ",survivors,converged\n";
    const bool two_axes = !result.axis2_name.empty();
    for (const auto& cell : result.cells) {
        for (std::size_t r = 0; r < cell.runs.size(); ++r) {
            const auto& run = cell.runs[r];
            out << format_number(cell.x1) << ',';
            if (two_axes) out << format_number(cell.x2);
            out << ',' << r;
            values(out, run.u);
            out << ',' << join_ids(run.survivors) << ',' << (run.converged ? 1 : 0) << '\n';
        }
    }
}

void write_hysteresis(std::ostream& out, const HysteresisResult& result) {
    out << "# axis=" << result.axis_name << " steps=" << result.axis.size();
    if (result.window) {
        out << " window=" << format_number(result.window->first) << ':' << format_number(result.window->second);
    }
    out << '\n';
    out << "axis,u2_high_branch,u2_low_branch,differs\n";
    for (std::size_t i = 0; i < result.axis.size(); ++i) {
        out << format_number(result.axis[i]) << ',' << format_number(result.branch_high[i]) << ','
            << format_number(result.branch_low[i]) << ',' << (result.differs[i] ? 1 : 0) << '\n';
    }
}

}  // namespace mtl::report
