#pragma once

/**
 * @file core.hpp
 * @brief Domain types and the kernel arithmetic shared by every certified
 *        quadrature rule in the library.
 *
 * All error bounds produced here descend from the piecewise-linear kernel
 *
 *     p(x,t) = t - (a + h(b-a)/2)   for t in [a, x]
 *            = t - (b - h(b-a)/2)   for t in (x, b]
 *
 * whose absolute integral and maximum over [a, b] have closed forms. The
 * rules pair a quadrature value with a rigorous ceiling on its absolute
 * error, valid whenever the integrand honours its declared slope envelope.
 *
 * Everything in this header is pure; values are immutable after
 * construction and safe to share across threads without coordination.
 */

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace certquad {

/// Integrands are deterministic, side-effect-free maps t -> f(t).
using Integrand = std::function<double(double)>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class of every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
struct ValidationError : Error {
  using Error::Error;
};

/// The computed secant slope falsifies a declared slope hypothesis. A
/// certificate issued under a falsified hypothesis would be void, so the
/// offending call is rejected instead of silently continuing.
struct SlopeConsistencyError : Error {
  using Error::Error;
};

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v))
    throw ValidationError(std::string(what) + " must be finite, got " + num(v));
}

/// Slack for membership tests of computed points in computed ranges.
/// Scales with the magnitude of the range endpoints so that midpoints and
/// admissibility bounds that differ from their exact values by rounding
/// are not rejected.
inline double point_slack(double a, double b) {
  return 32.0 * std::numeric_limits<double>::epsilon() *
         std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Closed integration domain [a, b] with a <= b. The degenerate case
/// a == b is admitted; every estimate and bound over it is exactly zero.
struct Interval {
  double a;
  double b;

  Interval(double a_, double b_) : a(a_), b(b_) {
    detail::require_finite(a, "interval endpoint a");
    detail::require_finite(b, "interval endpoint b");
    if (a > b)
      throw ValidationError("interval requires a <= b, got [" + detail::num(a) +
                            ", " + detail::num(b) + "]");
  }

  double width() const { return b - a; }
  double midpoint() const { return 0.5 * (a + b); }
  bool degenerate() const { return a == b; }
};

/// Parameters (h, x) of the perturbed rules. h in [0, 1] weights the
/// endpoint average against the interior evaluation; the interior point x
/// must lie in [a + h(b-a)/2, b - h(b-a)/2]. At h = 1 that range collapses
/// to the single point (a+b)/2.
///
/// Validity is enforced at construction: an out-of-range x is an error,
/// never a clamp — a silently moved evaluation point would invalidate the
/// certificate downstream.
struct RuleParams {
  double h;
  double x;

  RuleParams(const Interval& iv, double h_, double x_) : h(h_), x(x_) {
    detail::require_finite(h, "rule parameter h");
    detail::require_finite(x, "evaluation point x");
    if (h < 0.0 || h > 1.0)
      throw ValidationError("rule parameter h must lie in [0, 1], got " +
                            detail::num(h));
    if (!in_admissible_range(iv))
      throw ValidationError(
          "evaluation point x = " + detail::num(x) + " outside admissible [" +
          detail::num(admissible_lo(iv, h)) + ", " +
          detail::num(admissible_hi(iv, h)) + "] for h = " + detail::num(h));
  }

  /// Midpoint evaluation, admissible for every h.
  static RuleParams midpoint(const Interval& iv, double h) {
    return RuleParams(iv, h, iv.midpoint());
  }

  static double admissible_lo(const Interval& iv, double h) {
    return iv.a + 0.5 * h * iv.width();
  }
  static double admissible_hi(const Interval& iv, double h) {
    return iv.b - 0.5 * h * iv.width();
  }

  bool admissible_for(const Interval& iv) const {
    return std::isfinite(h) && h >= 0.0 && h <= 1.0 && in_admissible_range(iv);
  }

 private:
  bool in_admissible_range(const Interval& iv) const {
    const double slack = detail::point_slack(iv.a, iv.b);
    return std::isfinite(x) && x >= admissible_lo(iv, h) - slack &&
           x <= admissible_hi(iv, h) + slack;
  }
};

/// Throws unless p is admissible for iv.
inline void require_admissible(const Interval& iv, const RuleParams& p) {
  if (!p.admissible_for(iv))
    throw ValidationError("rule parameters (h = " + detail::num(p.h) +
                          ", x = " + detail::num(p.x) +
                          ") are not admissible for [" + detail::num(iv.a) +
                          ", " + detail::num(iv.b) + "]");
}

/// Two-sided slope envelope: every secant slope of the integrand is
/// declared to lie in [l, L]. l == L is admitted as the exact-affine
/// degenerate case, for which all certified bounds collapse to zero.
struct SlopeBounds {
  double l;
  double L;

  SlopeBounds(double l_, double L_) : l(l_), L(L_) {
    detail::require_finite(l, "lower slope l");
    detail::require_finite(L, "upper slope L");
    if (l > L)
      throw ValidationError("slope bounds require l <= L, got l = " +
                            detail::num(l) + ", L = " + detail::num(L));
  }

  /// Symmetric envelope (-L, L) of an L-Lipschitz function, L >= 0.
  static SlopeBounds from_lipschitz(double L) {
    detail::require_finite(L, "Lipschitz constant");
    if (L < 0.0)
      throw ValidationError("Lipschitz constant must be nonnegative, got " +
                            detail::num(L));
    return SlopeBounds(-L, L);
  }

  double spread() const { return L - l; }
  double mean() const { return 0.5 * (L + l); }
};

enum class RuleFamily { MidRange, Lower, Upper, Lipschitz };

inline const char* to_string(RuleFamily f) {
  switch (f) {
    case RuleFamily::MidRange: return "midrange";
    case RuleFamily::Lower: return "lower";
    case RuleFamily::Upper: return "upper";
    case RuleFamily::Lipschitz: return "lipschitz";
  }
  return "unknown";
}

/// A quadrature value paired with a rigorous ceiling on its absolute error.
/// For any integrand that truly satisfies the declared slopes,
/// |value - integral| <= bound.
struct CertifiedEstimate {
  double value;       ///< approximation of the integral
  double bound;       ///< certified error ceiling, >= 0
  RuleFamily rule;    ///< the bound family that produced this estimate
  RuleParams params;  ///< (h, x) actually used
  double secant;      ///< S = (f(b) - f(a)) / (b - a), recorded for audit
};

// ---------------------------------------------------------------------------
// Kernel arithmetic
// ---------------------------------------------------------------------------

/// Point evaluation of the kernel. The left branch is closed at t == x.
inline double peano_kernel(const Interval& iv, const RuleParams& p, double t) {
  require_admissible(iv, p);
  if (!(t >= iv.a && t <= iv.b))
    throw ValidationError("kernel argument t = " + detail::num(t) +
                          " outside [" + detail::num(iv.a) + ", " +
                          detail::num(iv.b) + "]");
  const double shift = 0.5 * p.h * iv.width();
  return t <= p.x ? t - (iv.a + shift) : t - (iv.b - shift);
}

/// Integral of |kernel| over [a, b], in closed form:
///     (b-a)^2/4 * [h^2 + (h-1)^2] + (x - (a+b)/2)^2.
inline double kernel_abs_integral(const Interval& iv, const RuleParams& p) {
  require_admissible(iv, p);
  const double w = iv.width();
  const double d = p.x - iv.midpoint();
  return 0.25 * w * w * (p.h * p.h + (p.h - 1.0) * (p.h - 1.0)) + d * d;
}

/// Maximum of |kernel| over [a, b]:
///     max{ h(b-a)/2, x - a - h(b-a)/2, b - x - h(b-a)/2 }.
inline double kernel_max(const Interval& iv, const RuleParams& p) {
  require_admissible(iv, p);
  const double shift = 0.5 * p.h * iv.width();
  return std::max({shift, p.x - iv.a - shift, iv.b - p.x - shift});
}

/// Endpoint secant slope S = (f(b) - f(a)) / (b - a).
inline double secant_slope(const Integrand& f, const Interval& iv) {
  if (iv.degenerate())
    throw ValidationError("secant slope is undefined on a degenerate interval");
  return (f(iv.b) - f(iv.a)) / iv.width();
}

}  // namespace certquad
