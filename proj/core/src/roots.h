#pragma once

#include <functional>
#include <vector>

namespace twostrain::detail {

using ScalarFn = std::function<double(double)>;

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

/// Bisection on a sign-changing bracket until hi - lo <= width.
double bisect(const ScalarFn& fn, Bracket b, double width);

/// Newton steps with a central-difference derivative. A step is kept only if
/// it stays inside `b` and reduces |fn|.
double polish_newton(const ScalarFn& fn, double x, Bracket b, int steps);

/// Brackets of every sign change of fn over n uniform subintervals of
/// [lo, hi].
std::vector<Bracket> scan_sign_changes(const ScalarFn& fn, double lo,
                                       double hi, int n);

}  // namespace twostrain::detail
