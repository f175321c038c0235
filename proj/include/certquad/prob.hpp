#pragma once

/**
 * @file prob.hpp
 * @brief Certified envelopes for CDF values and expectations of a random
 *        variable whose density on [a, b] lies between m and M.
 *
 * The CDF F of such a variable has every secant slope in [m, M], satisfies
 * F(a) = 0 and F(b) = 1,
 * and the integral of F over [a, b] equals b - E[X]. Feeding these facts
 * through the certified rules and rearranging encloses F(x) (given E[X])
 * or E[X] (given only m, M) in intervals that are intersected to the
 * tightest sound result and clamped last.
 */

#include <array>
#include <optional>
#include <string>

#include "certquad/rules.hpp"

namespace certquad {

/// Declared density bounds admit no value: the intersection of the
/// certified enclosures came out empty, so the inputs are mutually
/// inconsistent.
struct EnvelopeInconsistencyError : Error {
  using Error::Error;
};

/// A random variable supported on [a, b] whose density is bounded below
/// by m and above by M. Total probability forces m(b-a) <= 1 <= M(b-a).
struct DensityModel {
  Interval support;
  double m;
  double M;
  std::optional<double> expectation;

  DensityModel(Interval support_, double m_, double M_,
               std::optional<double> expectation_ = std::nullopt)
      : support(support_), m(m_), M(M_), expectation(expectation_) {
    detail::require_finite(m, "density floor m");
    detail::require_finite(M, "density ceiling M");
    if (m < 0.0)
      throw ValidationError("density floor m must be nonnegative, got " +
                            detail::num(m));
    if (m > M)
      throw ValidationError("density bounds require m <= M, got m = " +
                            detail::num(m) + ", M = " + detail::num(M));
    if (support.degenerate())
      throw ValidationError("density support must be non-degenerate");
    const double w = support.width();
    const double slack = 1e-12 * std::max({1.0, m * w, M * w});
    if (m * w > 1.0 + slack || M * w < 1.0 - slack)
      throw ValidationError(
          "density bounds must straddle 1/(b-a): need m(b-a) <= 1 <= M(b-a), "
          "got m(b-a) = " + detail::num(m * w) + ", M(b-a) = " +
          detail::num(M * w));
    if (expectation) {
      detail::require_finite(*expectation, "expectation");
      const double pslack = detail::point_slack(support.a, support.b);
      if (*expectation < support.a - pslack ||
          *expectation > support.b + pslack)
        throw ValidationError("expectation " + detail::num(*expectation) +
                              " outside the support [" +
                              detail::num(support.a) + ", " +
                              detail::num(support.b) + "]");
    }
  }
};

/// Two-sided enclosure of a probability; 0 <= lo <= hi <= 1.
struct ProbabilityEnvelope {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

/// The CDF of any density in the model has all its secant slopes in
/// [m, M]; this makes every rule in the library applicable to F directly.
inline SlopeBounds cdf_as_lipschitz(const DensityModel& dm) {
  return SlopeBounds(dm.m, dm.M);
}

namespace detail {

/// Rejects an empty intersection, tolerating rounding-level crossings by
/// collapsing them to a point.
inline void resolve_empty(double& lo, double& hi, const char* what) {
  if (lo <= hi) return;
  const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::fabs(lo), std::fabs(hi)});
  if (lo - hi <= slack) {
    lo = hi = 0.5 * (lo + hi);
    return;
  }
  throw EnvelopeInconsistencyError(
      std::string("empty ") + what +
      " envelope: the declared density bounds are mutually inconsistent");
}

}  // namespace detail

/// Encloses Pr(X <= x). Each of the three rule families applied to the
/// CDF yields one enclosure once the estimate is solved for F(x); the
/// result is their intersection, intersected with [0, 1]. Requires the
/// expectation and h < 1 (at h = 1 the probability term drops out of the
/// estimate and no enclosure can be solved for).
inline ProbabilityEnvelope cdf_envelope(const DensityModel& dm, double x,
                                        double h) {
  if (!dm.expectation)
    throw ValidationError("cdf envelope requires the model expectation");
  detail::require_finite(h, "rule parameter h");
  if (h >= 1.0)
    throw ValidationError("cdf envelope requires h < 1");
  const Interval& iv = dm.support;
  const RuleParams p(iv, h, x);
  const double w = iv.width();
  const double d = x - iv.midpoint();
  const double b_minus_e = iv.b - *dm.expectation;
  const double denom = w * (1.0 - h);
  const double inv_w = 1.0 / w;

  const std::array<double, 3> slope = {0.5 * (dm.M + dm.m), dm.m, dm.M};
  const std::array<double, 3> radius = {
      0.5 * kernel_abs_integral(iv, p) * (dm.M - dm.m),
      w * kernel_max(iv, p) * std::max(inv_w - dm.m, 0.0),
      w * kernel_max(iv, p) * std::max(dm.M - inv_w, 0.0)};

  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 3; ++i) {
    const double center =
        w * slope[static_cast<std::size_t>(i)] * d * (1.0 - h) -
        0.5 * w * h + b_minus_e;
    lo = std::max(lo, (center - radius[static_cast<std::size_t>(i)]) / denom);
    hi = std::min(hi, (center + radius[static_cast<std::size_t>(i)]) / denom);
  }
  detail::resolve_empty(lo, hi, "probability");
  return {lo, hi};
}

/// One inequality of a verification report: |lhs| against its ceiling.
struct InequalityCheck {
  const char* name;
  double lhs;
  double rhs;
  bool pass;
};

struct MidpointCheckReport {
  std::array<InequalityCheck, 3> checks;
  bool all_pass() const {
    return checks[0].pass && checks[1].pass && checks[2].pass;
  }
};

/// Checks the three h = 1/2, x = (a+b)/2 inequalities
///     |pr/2 + 1/4 - (b - E)/(b-a)| <= rhs
/// with rhs = (b-a)(M-m)/16, (1 - m(b-a))/4 and (M(b-a) - 1)/4, reporting
/// each residual. A failure is evidence that (m, M, E, pr) are mutually
/// inconsistent.
inline MidpointCheckReport cdf_midpoint_check(const DensityModel& dm,
                                              double pr_mid) {
  if (!dm.expectation)
    throw ValidationError("midpoint check requires the model expectation");
  detail::require_finite(pr_mid, "midpoint probability");
  if (pr_mid < 0.0 || pr_mid > 1.0)
    throw ValidationError("midpoint probability must lie in [0, 1], got " +
                          detail::num(pr_mid));
  const double w = dm.support.width();
  const double lhs =
      std::fabs(0.5 * pr_mid + 0.25 - (dm.support.b - *dm.expectation) / w);
  const double inv_w = 1.0 / w;
  const std::array<double, 3> rhs = {
      w / 16.0 * (dm.M - dm.m),
      0.25 * w * std::max(inv_w - dm.m, 0.0),
      0.25 * w * std::max(dm.M - inv_w, 0.0)};
  const auto pass = [](double l, double r) {
    return l <= r + 1e-12 * std::max(1.0, std::fabs(r));
  };
  return {{InequalityCheck{"midrange", lhs, rhs[0], pass(lhs, rhs[0])},
           InequalityCheck{"lower", lhs, rhs[1], pass(lhs, rhs[1])},
           InequalityCheck{"upper", lhs, rhs[2], pass(lhs, rhs[2])}}};
}

/// Encloses E[X] from the density bounds alone, via the h = 1/2 rules
/// evaluated at x = a, where F(a) = 0 removes the probability term:
///
///     |E - (a+3b)/4 + (M+m)(b-a)^2/8| <= 3/16 (b-a)^2 (M-m)
///     |E - (a+3b)/4 +     m(b-a)^2/4| <= 3/4  (b-a)(1 - m(b-a))
///     |E - (a+3b)/4 +     M(b-a)^2/4| <= 3/4  (b-a)(M(b-a) - 1)
///
/// Returns the intersection of the three, clamped to [a, b].
inline Interval expectation_envelope(const DensityModel& dm) {
  const Interval& iv = dm.support;
  const double w = iv.width();
  const double q = 0.25 * (iv.a + 3.0 * iv.b);

  const double c1 = q - 0.125 * (dm.M + dm.m) * w * w;
  const double r1 = (3.0 / 16.0) * w * w * (dm.M - dm.m);
  const double c2 = q - 0.25 * dm.m * w * w;
  const double r2 = 0.75 * w * std::max(1.0 - dm.m * w, 0.0);
  const double c3 = q - 0.25 * dm.M * w * w;
  const double r3 = 0.75 * w * std::max(dm.M * w - 1.0, 0.0);

  double lo = std::max({c1 - r1, c2 - r2, c3 - r3, iv.a});
  double hi = std::min({c1 + r1, c2 + r2, c3 + r3, iv.b});
  detail::resolve_empty(lo, hi, "expectation");
  return Interval(lo, hi);
}

/// One audited bound: the ceiling obtained by substituting x = a into the
/// h = 1/2 rule directly, the closed form the library implements (their
/// algebraic simplification), and a rival closed form that fails to
/// reproduce the substitution whenever M > m.
struct ExpectationBoundForm {
  double substituted;
  double implemented;
  double variant;
};

/// Executable audit of the expectation-envelope ceilings, one row per
/// family. implemented always equals substituted up to rounding; variant
/// agrees only in the collapsed M == m case.
struct ExpectationFormAudit {
  ExpectationBoundForm midrange;
  ExpectationBoundForm lower;
  ExpectationBoundForm upper;
};

inline ExpectationFormAudit expectation_form_audit(const DensityModel& dm) {
  const Interval& iv = dm.support;
  const double w = iv.width();
  const double da = std::fabs(iv.a - iv.midpoint());
  const double inv_w = 1.0 / w;

  ExpectationFormAudit audit{};
  audit.midrange.substituted = 0.5 * (w * w / 8.0 + da * da) * (dm.M - dm.m);
  audit.midrange.implemented = (3.0 / 16.0) * w * w * (dm.M - dm.m);
  audit.midrange.variant = audit.midrange.implemented;

  audit.lower.substituted = w * (0.25 * w + da) * (inv_w - dm.m);
  audit.lower.implemented = 0.75 * w * (1.0 - dm.m * w);
  audit.lower.variant = 0.75 * w * w * (dm.M - dm.m);

  audit.upper.substituted = w * (0.25 * w + da) * (dm.M - inv_w);
  audit.upper.implemented = 0.75 * w * (dm.M * w - 1.0);
  audit.upper.variant = 0.75 * w * w * (dm.M - dm.m);
  return audit;
}

}  // namespace certquad
