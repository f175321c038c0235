#pragma once

/**
 * @file approx.hpp
 * @brief Sampling-based slope estimation and the independent reference
 *        integrator used for verification.
 *
 * Nothing here certifies anything. Sampled slope ranges are inner
 * approximations (true l <= l_hat, L_hat <= true L) and the reference
 * integrator is a plain composite Simpson value, deliberately independent
 * of the certified rules it is used to cross-check.
 */

#include <cstddef>

#include "certquad/core.hpp"

namespace certquad {

namespace detail {

inline double checked_eval(const Integrand& f, double t) {
  const double v = f(t);
  if (!std::isfinite(v))
    throw ValidationError("integrand returned a non-finite value at t = " +
                          num(t));
  return v;
}

}  // namespace detail

/// Sampled slope range. The caveat flag is always set: sampling can only
/// narrow the truth from the inside, never certify it.
struct SlopeEstimate {
  double l_hat;
  double L_hat;
  std::size_t samples;
  bool caveat;
};

/// Min and max consecutive secant slope over n+1 equispaced nodes.
inline SlopeEstimate estimate_slopes(const Integrand& f, const Interval& iv,
                                     std::size_t n) {
  if (n < 2) throw ValidationError("estimate_slopes requires n >= 2");
  if (iv.degenerate()) return {0.0, 0.0, n, true};

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double t_prev = iv.a;
  double f_prev = detail::checked_eval(f, iv.a);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = i == n ? iv.b
                            : iv.a + (static_cast<double>(i) * iv.width()) /
                                         static_cast<double>(n);
    if (!(t > t_prev))
      throw ValidationError("sample spacing underflow: n too large for the "
                            "interval width");
    const double fv = detail::checked_eval(f, t);
    const double slope = (fv - f_prev) / (t - t_prev);
    lo = std::min(lo, slope);
    hi = std::max(hi, slope);
    t_prev = t;
    f_prev = fv;
  }
  return {lo, hi, n, true};
}

/// Classical composite Simpson value on n cells (n even, n >= 2).
/// Compensated summation keeps accumulation error negligible next to the
/// discretization error, so the value is trustworthy as a reference down
/// to ~1e-12 relative on smooth integrands at n ~ 1e4.
inline double oracle_integral(const Integrand& f, const Interval& iv,
                              std::size_t n) {
  if (n < 2 || n % 2 != 0)
    throw ValidationError("oracle_integral requires an even n >= 2");
  if (iv.degenerate()) return 0.0;

  const double step = iv.width() / static_cast<double>(n);
  double sum = detail::checked_eval(f, iv.a) + detail::checked_eval(f, iv.b);
  double comp = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double t = iv.a + static_cast<double>(i) * step;
    const double term =
        (i % 2 == 1 ? 4.0 : 2.0) * detail::checked_eval(f, t);
    const double y = term - comp;
    const double next = sum + y;
    comp = (next - sum) - y;
    sum = next;
  }
  return sum * step / 3.0;
}

}  // namespace certquad
