#pragma once
// CSV emission. Every file gets a header row; numbers are written with 17
// significant digits so repeated runs are byte-identical and values
// round-trip through text exactly.

#include <string>
#include <vector>

#include "minkbvp/bvp.hpp"
#include "minkbvp/continuation.hpp"

namespace minkbvp {

/// Columns: index,u0,v0,sup_norm,bc_residual,weak_residual,min_u
void write_solutions_csv(const std::string& path, const std::vector<Solution>& sols);

/// Columns: arclength_index,param,u0,sup_norm,bc_residual,is_fold
void write_branch_csv(const std::string& path, const Branch& br);

/// Columns: t,u,uprime,v on a uniform grid over the trajectory's span.
/// comment_lines are emitted first, each prefixed with "# " if not already.
void write_trajectory_csv(const std::string& path, const Trajectory& traj, int grid_points,
                          const std::vector<std::string>& comment_lines = {});

/// One number, 17 significant digits.
std::string csv_num(double x);

/// Creates the directory (and parents) if needed; throws config_error on failure.
void ensure_directory(const std::string& dir);

}  // namespace minkbvp
