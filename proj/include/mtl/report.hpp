#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>

#include "mtl/dynamics.hpp"
#include "mtl/equilibrium.hpp"
#include "mtl/sweep.hpp"

namespace mtl::report {

/// Nine significant digits, locale independent.
std::string format_number(double x);

/// Semicolon-joined product ids.
std::string join_ids(std::span<const std::size_t> ids);

/// t,u_0..u_{n-1},p_0..p_{n-1},nonbuyers,survivors
void write_trajectory(std::ostream& out, const Trajectory& traj, std::size_t n);

/// eq_index,u_0..,p_0..,survivors,residual
void write_equilibria(std::ostream& out, std::span<const FullEquilibrium> equilibria, std::size_t n);

/// u_star,stable,residual
void write_fixed_points(std::ostream& out, const FixedPointSet& set);

/// axis1,axis2,init_idx,u_0..,survivors,converged (one row per cell and initial condition)
void write_sweep(std::ostream& out, const SweepResult& result, std::size_t n);

/// axis,u2_high_branch,u2_low_branch,differs
void write_hysteresis(std::ostream& out, const HysteresisResult& result);

}  // namespace mtl::report
