#pragma once
// Shared basics: error hierarchy, tolerances, and a deterministic parallel map.

#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace minkbvp {

/// Base class for all library errors.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid user input: bad configuration file, out-of-range key, missing block.
struct config_error : error {
  explicit config_error(const std::string& what) : error(what) {}
};

/// Invalid argument to a library operation (precondition violation).
struct domain_error : error {
  explicit domain_error(const std::string& what) : error(what) {}
};

/// Numerical failure: step-size underflow, state blow-up, divergent iteration.
/// `t_last` is the last time the integrator had a valid state (NaN when not
/// applicable).
struct numeric_error : error {
  double t_last;
  explicit numeric_error(const std::string& what, double t = std::numeric_limits<double>::quiet_NaN())
      : error(what), t_last(t) {}
};

/// Relative/absolute tolerance pair for the adaptive integrator.
struct Tolerances {
  double rel = 1e-10;
  double abs = 1e-12;
};

/// Runs fn(0..n-1), possibly on several threads. Work is split into static
/// contiguous chunks so that results written to caller-owned slots are
/// deterministic. Thread count is capped by the MINKBVP_THREADS environment
/// variable (absent or 0 means all hardware threads). Exceptions thrown by fn
/// are rethrown on the calling thread (the one from the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// snprintf-backed number formatting ("%.17g" round-trips doubles; CSV uses
/// "%.12g" for readability). Centralized so emitted files are byte-stable.
std::string format_double(double x, int precision = 12);

}  // namespace minkbvp
