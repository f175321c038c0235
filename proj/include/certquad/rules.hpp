#pragma once

/**
 * @file rules.hpp
 * @brief Single-interval estimators with certified error bounds.
 *
 * Every rule evaluates the integrand at the two endpoints and one interior
 * point x and returns
 *
 *     value = (b-a) * { [f(x) - c*(x - (a+b)/2)]*(1-h) + (f(a)+f(b))/2 * h }
 *
 * where the perturbation slope c and the bound depend on the family:
 *
 *   midrange   c = (L+l)/2   bound = 1/2 * int|kernel| * (L - l)
 *   lower      c = l         bound = (b-a) * max|kernel| * (S - l)
 *   upper      c = L         bound = (b-a) * max|kernel| * (L - S)
 *
 * with S the endpoint secant slope. The lipschitz rule is the midrange
 * rule at slopes (-L, L). Presets pin h to the classical rules (midpoint,
 * trapezoid, three-point, Simpson) through the same code path, so preset
 * results are bit-identical to the general rule at that h.
 */

#include "certquad/core.hpp"

namespace certquad {

namespace detail {

/// Endpoint and interior samples of the integrand on one interval.
struct RuleSamples {
  double fa;
  double fb;
  double fx;
};

inline RuleSamples sample(const Integrand& f, const Interval& iv,
                          const RuleParams& p) {
  return {f(iv.a), f(iv.b), f(p.x)};
}

inline double secant_of(const Interval& iv, const RuleSamples& s) {
  return (s.fb - s.fa) / iv.width();
}

inline double perturbed_value(const Interval& iv, const RuleParams& p,
                              const RuleSamples& s, double slope) {
  const double d = p.x - iv.midpoint();
  return iv.width() *
         ((s.fx - slope * d) * (1.0 - p.h) + 0.5 * (s.fa + s.fb) * p.h);
}

/// A secant undershooting (or overshooting) a declared slope by no more
/// than rounding noise is treated as equal; anything larger is a
/// falsified hypothesis.
inline double slope_slack(double s1, double s2) {
  return 32.0 * std::numeric_limits<double>::epsilon() *
         std::max({1.0, std::fabs(s1), std::fabs(s2)});
}

inline CertifiedEstimate degenerate_estimate(RuleFamily fam,
                                             const RuleParams& p) {
  return {0.0, 0.0, fam, p, 0.0};
}

// Sample-level rule cores. The composite module calls these directly with
// memoized node values; the public single-interval rules below go through
// the same functions, which is what makes n = 1 composites and presets
// reproduce the general rules exactly.

inline CertifiedEstimate midrange_estimate(const Interval& iv,
                                           const RuleParams& p,
                                           const RuleSamples& s,
                                           const SlopeBounds& sb) {
  const double value = perturbed_value(iv, p, s, sb.mean());
  const double bound = 0.5 * kernel_abs_integral(iv, p) * sb.spread();
  return {value, bound, RuleFamily::MidRange, p, secant_of(iv, s)};
}

inline CertifiedEstimate lower_estimate(const Interval& iv,
                                        const RuleParams& p,
                                        const RuleSamples& s, double l) {
  const double S = secant_of(iv, s);
  if (S < l - slope_slack(S, l))
    throw SlopeConsistencyError("secant slope S = " + num(S) +
                                " falls below the declared lower slope l = " +
                                num(l));
  const double value = perturbed_value(iv, p, s, l);
  const double bound = iv.width() * kernel_max(iv, p) * std::max(S - l, 0.0);
  return {value, bound, RuleFamily::Lower, p, S};
}

inline CertifiedEstimate upper_estimate(const Interval& iv,
                                        const RuleParams& p,
                                        const RuleSamples& s, double L) {
  const double S = secant_of(iv, s);
  if (S > L + slope_slack(S, L))
    throw SlopeConsistencyError("secant slope S = " + num(S) +
                                " exceeds the declared upper slope L = " +
                                num(L));
  const double value = perturbed_value(iv, p, s, L);
  const double bound = iv.width() * kernel_max(iv, p) * std::max(L - S, 0.0);
  return {value, bound, RuleFamily::Upper, p, S};
}

}  // namespace detail

/// Two-sided rule: perturbation slope (L+l)/2, bound from the kernel's
/// absolute integral.
inline CertifiedEstimate rule_midrange(const Integrand& f, const Interval& iv,
                                       const RuleParams& p,
                                       const SlopeBounds& s) {
  require_admissible(iv, p);
  if (iv.degenerate())
    return detail::degenerate_estimate(RuleFamily::MidRange, p);
  return detail::midrange_estimate(iv, p, detail::sample(f, iv, p), s);
}

/// One-sided rule using only the lower slope l; requires the endpoint
/// secant S >= l and scales the bound by S - l.
inline CertifiedEstimate rule_lower(const Integrand& f, const Interval& iv,
                                    const RuleParams& p, double l) {
  require_admissible(iv, p);
  detail::require_finite(l, "lower slope l");
  if (iv.degenerate()) return detail::degenerate_estimate(RuleFamily::Lower, p);
  return detail::lower_estimate(iv, p, detail::sample(f, iv, p), l);
}

/// One-sided rule using only the upper slope L; requires S <= L and scales
/// the bound by L - S.
inline CertifiedEstimate rule_upper(const Integrand& f, const Interval& iv,
                                    const RuleParams& p, double L) {
  require_admissible(iv, p);
  detail::require_finite(L, "upper slope L");
  if (iv.degenerate()) return detail::degenerate_estimate(RuleFamily::Upper, p);
  return detail::upper_estimate(iv, p, detail::sample(f, iv, p), L);
}

/// Rule for an L-Lipschitz integrand (L >= 0): exactly the midrange rule
/// with slopes (-L, L), i.e. value (b-a)[f(x)(1-h) + (f(a)+f(b))/2 h] and
/// bound int|kernel| * L.
inline CertifiedEstimate rule_lipschitz(const Integrand& f, const Interval& iv,
                                        const RuleParams& p, double L) {
  CertifiedEstimate est = rule_midrange(f, iv, p, SlopeBounds::from_lipschitz(L));
  est.rule = RuleFamily::Lipschitz;
  return est;
}

/// Secant variant of the L-Lipschitz rule: the one-sided lower rule at
/// l = -L, so the bound factor is S + L. Not considered by best_rule.
inline CertifiedEstimate rule_lipschitz_secant(const Integrand& f,
                                               const Interval& iv,
                                               const RuleParams& p, double L) {
  SlopeBounds::from_lipschitz(L);  // validates L >= 0
  CertifiedEstimate est = rule_lower(f, iv, p, -L);
  est.rule = RuleFamily::Lipschitz;
  return est;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

/// Classical rules as pinned values of h.
enum class RulePreset { Midpoint, Trapezoid, ThreePoint, Simpson };

constexpr double preset_h(RulePreset preset) {
  switch (preset) {
    case RulePreset::Midpoint: return 0.0;
    case RulePreset::Trapezoid: return 1.0;
    case RulePreset::ThreePoint: return 0.5;
    case RulePreset::Simpson: return 1.0 / 3.0;
  }
  return 0.0;
}

inline const char* to_string(RulePreset preset) {
  switch (preset) {
    case RulePreset::Midpoint: return "midpoint";
    case RulePreset::Trapezoid: return "trapezoid";
    case RulePreset::ThreePoint: return "threepoint";
    case RulePreset::Simpson: return "simpson";
  }
  return "unknown";
}

/// Runs the selected family at the preset's h. Shares the general rule
/// code path, so results are bit-identical to the general rule.
inline CertifiedEstimate rule_preset(const Integrand& f, const Interval& iv,
                                     double x, const SlopeBounds& s,
                                     RulePreset preset, RuleFamily family) {
  const RuleParams p(iv, preset_h(preset), x);
  switch (family) {
    case RuleFamily::MidRange: return rule_midrange(f, iv, p, s);
    case RuleFamily::Lower: return rule_lower(f, iv, p, s.l);
    case RuleFamily::Upper: return rule_upper(f, iv, p, s.L);
    case RuleFamily::Lipschitz: break;
  }
  throw ValidationError("preset families are midrange, lower and upper");
}

/// Smallest-bound estimate among the three families. Requires
/// l <= S <= L; ties resolve to midrange, then lower, then upper.
inline CertifiedEstimate best_rule(const Integrand& f, const Interval& iv,
                                   const RuleParams& p, const SlopeBounds& s) {
  require_admissible(iv, p);
  if (iv.degenerate())
    return detail::degenerate_estimate(RuleFamily::MidRange, p);
  const detail::RuleSamples samples = detail::sample(f, iv, p);
  CertifiedEstimate best = detail::midrange_estimate(iv, p, samples, s);
  const CertifiedEstimate lo = detail::lower_estimate(iv, p, samples, s.l);
  if (lo.bound < best.bound) best = lo;
  const CertifiedEstimate up = detail::upper_estimate(iv, p, samples, s.L);
  if (up.bound < best.bound) best = up;
  return best;
}

}  // namespace certquad
