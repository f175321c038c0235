// Randomized soundness: piecewise-linear integrands and densities have
// exactly computable integrals, CDFs and expectations, and their slope
// envelopes are exactly the min/max segment slopes — so every certificate
// can be checked against ground truth with no numeric oracle in the loop.

#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "certquad/composite.hpp"
#include "certquad/prob.hpp"
#include "certquad/rules.hpp"
#include "certquad/table.hpp"
#include "corpus.hpp"

using namespace certquad;

namespace {

struct PiecewiseLinear {
  std::vector<double> nodes;
  std::vector<double> vals;

  double operator()(double t) const {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    std::size_t i = it == nodes.begin()
                        ? 0
                        : static_cast<std::size_t>(it - nodes.begin()) - 1;
    i = std::min(i, nodes.size() - 2);
    const double s = slope(i);
    return vals[i] + (t - nodes[i]) * s;
  }

  double slope(std::size_t i) const {
    return (vals[i + 1] - vals[i]) / (nodes[i + 1] - nodes[i]);
  }

  SlopeBounds slopes() const {
    double lo = slope(0);
    double hi = lo;
    for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
      lo = std::min(lo, slope(i));
      hi = std::max(hi, slope(i));
    }
    return SlopeBounds(lo, hi);
  }

  // exact integral over the full node range (trapezoid is exact here)
  double integral() const {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
      sum += 0.5 * (vals[i] + vals[i + 1]) * (nodes[i + 1] - nodes[i]);
    return sum;
  }

  // exact cumulative integral from nodes.front() to t
  double cumulative(double t) const {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double p = nodes[i];
      const double q = std::min(t, nodes[i + 1]);
      if (q <= p) break;
      const double s = slope(i);
      sum += vals[i] * (q - p) + 0.5 * s * (q - p) * (q - p);
    }
    return sum;
  }

  // exact first moment over the node range
  double first_moment() const {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const double p = nodes[i];
      const double q = nodes[i + 1];
      const double s = slope(i);
      const double q2p2 = 0.5 * (q * q - p * p);
      const double q3p3 = (q * q * q - p * p * p) / 3.0;
      sum += vals[i] * q2p2 + s * (q3p3 - p * q2p2);
    }
    return sum;
  }
};

PiecewiseLinear random_pl(std::mt19937_64& rng, const Interval& iv,
                          std::size_t segments, double slope_lo,
                          double slope_hi) {
  PiecewiseLinear pl;
  pl.nodes.resize(segments + 1);
  pl.nodes.front() = iv.a;
  pl.nodes.back() = iv.b;
  for (std::size_t i = 1; i < segments; ++i)
    pl.nodes[i] = testutil::uniform(rng, iv.a, iv.b);
  std::sort(pl.nodes.begin(), pl.nodes.end());
  for (std::size_t i = 0; i + 1 < pl.nodes.size(); ++i)
    if (pl.nodes[i + 1] - pl.nodes[i] < 1e-6)
      pl.nodes[i + 1] = pl.nodes[i] + 1e-6;
  pl.nodes.back() = std::max(pl.nodes.back(), iv.b);

  pl.vals.resize(pl.nodes.size());
  pl.vals[0] = testutil::uniform(rng, -3.0, 3.0);
  for (std::size_t i = 1; i < pl.nodes.size(); ++i) {
    const double s = testutil::uniform(rng, slope_lo, slope_hi);
    pl.vals[i] = pl.vals[i - 1] + s * (pl.nodes[i] - pl.nodes[i - 1]);
  }
  return pl;
}

}  // namespace

TEST_CASE("random piecewise-linear integrands: all families stay sound") {
  std::mt19937_64 rng(777);
  for (int rep = 0; rep < 400; ++rep) {
    const double a = testutil::uniform(rng, -4.0, 4.0);
    const Interval iv(a, a + testutil::uniform(rng, 0.3, 6.0));
    const double slope_lo = testutil::uniform(rng, -4.0, 2.0);
    const double slope_hi = slope_lo + testutil::uniform(rng, 0.0, 5.0);
    const PiecewiseLinear pl =
        random_pl(rng, iv, 2 + rep % 6, slope_lo, slope_hi);
    const Interval span(pl.nodes.front(), pl.nodes.back());
    const SlopeBounds sb = pl.slopes();
    const double exact = pl.integral();
    const Integrand f = [&pl](double t) { return pl(t); };

    const double h = testutil::uniform(rng, 0.0, 1.0);
    const RuleParams p(
        span, h,
        testutil::admissible_x(span, h, testutil::uniform(rng, 0.0, 1.0)));
    const CertifiedEstimate ests[4] = {
        rule_midrange(f, span, p, sb), rule_lower(f, span, p, sb.l),
        rule_upper(f, span, p, sb.L),
        rule_lipschitz(f, span, p,
                       std::max(std::fabs(sb.l), std::fabs(sb.L)))};
    for (const auto& est : ests) {
      CAPTURE(rep, h, p.x, sb.l, sb.L);
      REQUIRE(testutil::sound(est.value, exact, est.bound));
    }
  }
}

TEST_CASE("random piecewise-linear integrands: composites stay sound") {
  std::mt19937_64 rng(888);
  for (int rep = 0; rep < 150; ++rep) {
    const Interval iv(0.0, testutil::uniform(rng, 0.5, 5.0));
    const PiecewiseLinear pl = random_pl(rng, iv, 3, -2.0, 3.0);
    const Interval span(pl.nodes.front(), pl.nodes.back());
    const SlopeBounds sb = pl.slopes();
    const double exact = pl.integral();
    const Integrand f = [&pl](double t) { return pl(t); };

    const std::size_t n = 1 + rep % 9;
    const double h = testutil::uniform(rng, 0.0, 1.0);
    const Partition base = Partition::uniform(span, n);
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i)
      xi[i] = testutil::admissible_x(base.cell(i), h,
                                     testutil::uniform(rng, 0.0, 1.0));
    const Partition part(base.nodes(), xi);
    for (RuleFamily fam :
         {RuleFamily::MidRange, RuleFamily::Lower, RuleFamily::Upper}) {
      const auto cert = composite_general(f, part, h, sb, fam);
      CAPTURE(rep, n, h);
      REQUIRE(testutil::sound(cert.value, exact, cert.bound));
    }
  }
}

TEST_CASE("random piecewise-linear densities: envelopes contain the truth") {
  std::mt19937_64 rng(999);
  int empty_envelopes = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const double a = testutil::uniform(rng, -2.0, 2.0);
    const Interval support(a, a + testutil::uniform(rng, 0.5, 3.0));
    // positive piecewise-linear density, normalized to total mass 1
    PiecewiseLinear pl = random_pl(rng, support, 2 + rep % 4, -1.0, 1.0);
    double min_val = pl.vals[0];
    for (double v : pl.vals) min_val = std::min(min_val, v);
    for (double& v : pl.vals) v += 0.05 - min_val;  // strictly positive
    const double mass = pl.integral();
    for (double& v : pl.vals) v /= mass;

    double m = pl.vals[0];
    double M = m;
    for (double v : pl.vals) {
      m = std::min(m, v);
      M = std::max(M, v);
    }
    const double e_true = pl.first_moment();
    const DensityModel dm(support, m, M, e_true);

    // expectation envelope contains the exact first moment
    const Interval ee = expectation_envelope(dm);
    CAPTURE(rep, m, M, e_true);
    REQUIRE(ee.a <= e_true + 1e-10);
    REQUIRE(e_true <= ee.b + 1e-10);

    // cdf envelopes contain the exact CDF
    for (int k = 0; k < 4; ++k) {
      const double h = testutil::uniform(rng, 0.0, 0.95);
      const double x = testutil::admissible_x(
          support, h, testutil::uniform(rng, 0.0, 1.0));
      const double f_true = pl.cumulative(x);
      try {
        const ProbabilityEnvelope env = cdf_envelope(dm, x, h);
        CAPTURE(h, x, f_true);
        REQUIRE(env.lo <= f_true + 1e-10);
        REQUIRE(f_true <= env.hi + 1e-10);
      } catch (const EnvelopeInconsistencyError&) {
        ++empty_envelopes;  // must never happen for consistent inputs
      }
    }

    // midpoint residual check passes with the exact midpoint probability
    const auto report =
        cdf_midpoint_check(dm, pl.cumulative(support.midpoint()));
    REQUIRE(report.all_pass());
  }
  REQUIRE(empty_envelopes == 0);
}
