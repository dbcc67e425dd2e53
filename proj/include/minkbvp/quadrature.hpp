#pragma once
// Adaptive Gauss–Kronrod quadrature (G7/K15) used for nonlinearity primitives
// and certificate integrals. Test code deliberately uses a different rule
// (adaptive Simpson) as an independent oracle.

#include <functional>

namespace minkbvp {

/// Integrates f over [a, b] (a ≤ b or a > b; the sign convention of the
/// Riemann integral applies). Subdivides until the K15-vs-G7 error estimate
/// of each panel is below abs_tol + rel_tol*|panel integral|.
/// Throws numeric_error if the recursion depth limit (60) is exceeded.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-12, double abs_tol = 1e-300);

/// Fixed-order Gauss–Legendre rule (7 points) on [a, b]; no error control.
/// Used for per-cell certificate integrals where the cell is already small.
double gauss7(const std::function<double(double)>& f, double a, double b);

}  // namespace minkbvp
