#include "roots.h"

#include <cmath>
#include <limits>

namespace twostrain::detail {

double bisect(const ScalarFn& fn, Bracket b, double width) {
  double f_lo = fn(b.lo);
  if (f_lo == 0.0) return b.lo;
  if (fn(b.hi) == 0.0) return b.hi;
  // 200 halvings exhaust double precision for any finite bracket.
  for (int it = 0; it < 200 && b.hi - b.lo > width; ++it) {
    const double mid = 0.5 * (b.lo + b.hi);
    const double f_mid = fn(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      b.lo = mid;
      f_lo = f_mid;
    } else {
      b.hi = mid;
    }
  }
  return 0.5 * (b.lo + b.hi);
}

double polish_newton(const ScalarFn& fn, double x, Bracket b, int steps) {
  double fx = fn(x);
  for (int i = 0; i < steps && fx != 0.0; ++i) {
    const double h =
        std::sqrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(x));
    const double slope = (fn(x + h) - fn(x - h)) / (2.0 * h);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    const double next = x - fx / slope;
    if (next < b.lo || next > b.hi) break;
    const double f_next = fn(next);
    if (!(std::abs(f_next) < std::abs(fx))) break;
    x = next;
    fx = f_next;
  }
  return x;
}

std::vector<Bracket> scan_sign_changes(const ScalarFn& fn, double lo,
                                       double hi, int n) {
  auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  std::vector<Bracket> out;
  double x_prev = lo;
  int s_prev = sign(fn(lo));
  if (s_prev == 0) out.push_back({lo, lo});
  for (int i = 1; i <= n; ++i) {
    const double x = (i == n) ? hi : lo + (hi - lo) * i / n;
    const int s = sign(fn(x));
    if (s == 0) {
      out.push_back({x, x});
    } else if (s_prev != 0 && s != s_prev) {
      out.push_back({x_prev, x});
    }
    x_prev = x;
    s_prev = s;
  }
  return out;
}

}  // namespace twostrain::detail
