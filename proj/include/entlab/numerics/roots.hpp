#ifndef ENTLAB_NUMERICS_ROOTS_HPP
#define ENTLAB_NUMERICS_ROOTS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "entlab/numerics/linalg.hpp"

namespace entlab::numerics {

struct RootOptions {
  double points_per_unit = 1000.0; ///< sign-change scan resolution
  double x_tol = 1e-14;            ///< bisection stops at this bracket width (relative to |x|, floored at 1)
  double f_tol = 1e-8;             ///< roots with |f(r)| above this are discarded (poles, jumps)
};

struct RootSet {
  std::vector<double> roots;
  bool complete = true; ///< false when fewer than the requested count were found
};

/// Roots of a continuous function on (lo, hi) by sign-change scan plus bisection.
/// Returns at most `count` roots in ascending order (all of them when count is empty).
inline RootSet find_roots(const std::function<double(double)>& f, double lo, double hi,
                          std::optional<std::size_t> count = std::nullopt, const RootOptions& opt = {})
{
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidInput("find_roots: bracket must satisfy lo < hi");
  if (!(opt.points_per_unit > 0))
    throw InvalidInput("find_roots: scan resolution must be positive");

  const auto steps = static_cast<std::size_t>(std::max(2.0, std::ceil((hi - lo) * opt.points_per_unit)));
  const double h = (hi - lo) / static_cast<double>(steps);

  RootSet out;
  auto accept = [&](double r) {
    if (std::abs(f(r)) > opt.f_tol)
      return;
    if (!out.roots.empty() && std::abs(r - out.roots.back()) <= 4.0 * opt.x_tol * std::max(1.0, std::abs(r)))
      return;
    out.roots.push_back(r);
  };

  double a = lo;
  double fa = f(a);
  for (std::size_t i = 1; i <= steps; ++i) {
    if (count && out.roots.size() >= *count)
      break;
    const double b = (i == steps) ? hi : lo + static_cast<double>(i) * h;
    const double fb = f(b);
    if (fb == 0.0) {
      if (b < hi)
        accept(b);
    } else if (fa != 0.0 && std::signbit(fa) != std::signbit(fb)) {
      double left = a;
      double right = b;
      double fl = fa;
      while (right - left > opt.x_tol * std::max(1.0, std::abs(left))) {
        const double mid = 0.5 * (left + right);
        if (mid <= left || mid >= right)
          break;
        const double fm = f(mid);
        if (fm == 0.0) {
          left = right = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(fl)) {
          left = mid;
          fl = fm;
        } else {
          right = mid;
        }
      }
      accept(0.5 * (left + right));
    }
    a = b;
    fa = fb;
  }
  if (count && out.roots.size() > *count)
    out.roots.resize(*count);
  out.complete = !count || out.roots.size() >= *count;
  return out;
}

} // namespace entlab::numerics

#endif // ENTLAB_NUMERICS_ROOTS_HPP
