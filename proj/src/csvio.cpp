#include "minkbvp/csvio.hpp"

#include <filesystem>
#include <fstream>

namespace minkbvp {

namespace {

std::ofstream open_out(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);  // binary: identical bytes on every platform
  if (!out) throw config_error("cannot open output file '" + path + "'");
  return out;
}

}  // namespace

std::string csv_num(double x) { return format_double(x, 17); }

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec && !std::filesystem::is_directory(dir))
    throw config_error("cannot create output directory '" + dir + "'");
}

void write_solutions_csv(const std::string& path, const std::vector<Solution>& sols) {
  std::ofstream out = open_out(path);
  out << "index,u0,v0,sup_norm,bc_residual,weak_residual,min_u\n";
  for (std::size_t i = 0; i < sols.size(); ++i) {
    const Solution& s = sols[i];
    out << i << ',' << csv_num(s.u0()) << ',' << csv_num(s.v0()) << ',' << csv_num(s.sup_norm)
        << ',' << csv_num(s.certificate.bc_residual) << ','
        << csv_num(s.certificate.weak_residual) << ',' << csv_num(s.certificate.min_u) << '\n';
  }
}

void write_branch_csv(const std::string& path, const Branch& br) {
  std::ofstream out = open_out(path);
  out << "arclength_index,param,u0,sup_norm,bc_residual,is_fold\n";
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const BranchPoint& p = br.points[i];
    out << i << ',' << csv_num(p.param) << ',' << csv_num(p.u0) << ',' << csv_num(p.sup_norm)
        << ',' << csv_num(p.bc_residual) << ',' << (p.is_fold ? 1 : 0) << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj, int grid_points,
                          const std::vector<std::string>& comment_lines) {
  if (grid_points < 2) throw domain_error("trajectory csv: need at least 2 grid points");
  std::ofstream out = open_out(path);
  for (const std::string& c : comment_lines) {
    if (!c.empty() && c[0] == '#')
      out << c << '\n';
    else
      out << "# " << c << '\n';
  }
  out << "t,u,uprime,v\n";
  const double a = std::min(traj.t0(), traj.t1());
  const double b = std::max(traj.t0(), traj.t1());
  for (int k = 0; k < grid_points; ++k) {
    double t = a + (b - a) * k / (grid_points - 1);
    PhaseState s = traj.eval(t);
    out << csv_num(t) << ',' << csv_num(s.u) << ',' << csv_num(s.slope()) << ','
        << csv_num(s.v) << '\n';
  }
}

}  // namespace minkbvp
