#pragma once

/**
 * @file table.hpp
 * @brief Tabulated data as a certified integrand.
 *
 * A two-column table (t, f) with strictly increasing t is interpreted as
 * its piecewise-linear interpolant. Because the interpolant is exactly
 * piecewise linear, its slope envelope is the min/max of the segment
 * slopes — certified, not estimated.
 */

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "certquad/core.hpp"

namespace certquad {

class TabulatedFunction {
 public:
  TabulatedFunction(std::vector<double> t, std::vector<double> f)
      : t_(std::move(t)), f_(std::move(f)) {
    if (t_.size() != f_.size())
      throw ValidationError("table columns must have equal length");
    if (t_.size() < 2) throw ValidationError("table needs at least 2 rows");
    for (std::size_t i = 0; i < t_.size(); ++i) {
      detail::require_finite(t_[i], "table abscissa");
      detail::require_finite(f_[i], "table value");
      if (i > 0 && !(t_[i - 1] < t_[i]))
        throw ValidationError("table abscissae must be strictly increasing "
                              "(violated at row " + std::to_string(i + 1) +
                              ")");
    }
  }

  /// Parses CSV rows "t,f". An optional header is allowed on the first
  /// line only; blank lines are skipped.
  static TabulatedFunction parse_csv(std::istream& in) {
    std::vector<double> t;
    std::vector<double> f;
    std::string line;
    std::size_t lineno = 0;
    bool first_data_candidate = true;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string trimmed = trim(line);
      if (trimmed.empty()) continue;
      double tv = 0.0;
      double fv = 0.0;
      if (!parse_row(trimmed, tv, fv)) {
        if (first_data_candidate) {  // header
          first_data_candidate = false;
          continue;
        }
        throw ValidationError("table line " + std::to_string(lineno) +
                              ": expected two comma-separated numbers, got '" +
                              trimmed + "'");
      }
      first_data_candidate = false;
      t.push_back(tv);
      f.push_back(fv);
    }
    return TabulatedFunction(std::move(t), std::move(f));
  }

  static TabulatedFunction load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open table file '" + path + "'");
    return parse_csv(in);
  }

  /// Evaluates the interpolant; x must lie within the tabulated range.
  double operator()(double x) const {
    const double slack = detail::point_slack(t_.front(), t_.back());
    if (x < t_.front() - slack || x > t_.back() + slack)
      throw ValidationError("interpolation point " + detail::num(x) +
                            " outside the tabulated range [" +
                            detail::num(t_.front()) + ", " +
                            detail::num(t_.back()) + "]");
    auto it = std::lower_bound(t_.begin(), t_.end(), x);
    if (it != t_.end() && *it == x)
      return f_[static_cast<std::size_t>(it - t_.begin())];
    std::size_t i = it == t_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - t_.begin()) - 1;
    i = std::min(i, t_.size() - 2);
    const double slope = (f_[i + 1] - f_[i]) / (t_[i + 1] - t_[i]);
    return f_[i] + (x - t_[i]) * slope;
  }

  /// Exact slope envelope of the interpolant over the segments meeting iv.
  SlopeBounds slopes(const Interval& iv) const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
      if (t_[i + 1] <= iv.a || t_[i] >= iv.b) continue;
      const double slope = (f_[i + 1] - f_[i]) / (t_[i + 1] - t_[i]);
      lo = std::min(lo, slope);
      hi = std::max(hi, slope);
    }
    if (!(lo <= hi)) return SlopeBounds(0.0, 0.0);  // degenerate query
    return SlopeBounds(lo, hi);
  }

  SlopeBounds slopes() const { return slopes(domain()); }

  Interval domain() const { return Interval(t_.front(), t_.back()); }
  std::size_t size() const { return t_.size(); }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  static bool parse_number(const std::string& field, double& out) {
    const std::string tf = trim(field);
    if (tf.empty()) return false;
    std::istringstream ss(tf);
    ss >> out;
    return static_cast<bool>(ss) && ss.eof() && std::isfinite(out);
  }

  static bool parse_row(const std::string& line, double& tv, double& fv) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) return false;
    if (line.find(',', comma + 1) != std::string::npos) return false;
    return parse_number(line.substr(0, comma), tv) &&
           parse_number(line.substr(comma + 1), fv);
  }

  std::vector<double> t_;
  std::vector<double> f_;
};

/// Wraps the interpolant as an Integrand.
inline Integrand to_integrand(const TabulatedFunction& tab) {
  return [tab](double x) { return tab(x); };
}

}  // namespace certquad
