// certquad: certified quadrature from the command line.
//
// Subcommands:
//   integrate  one interval or a composite/adaptive subdivision
//   prob       cdf / expectation envelopes and the midpoint check
//   sweep      (h, x, family) grid with realized errors and a summary
//
// Exit codes: 0 ok, 2 validation error, 3 slope-consistency error,
// 4 adaptive budget exhausted, 5 empty/failed probability envelope.
// Errors print one line on stderr: "certquad: <kind>: <message>".

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certquad/certquad.hpp"

namespace {

using namespace certquad;

constexpr int kOkExit = 0;
constexpr int kValidationExit = 2;
constexpr int kSlopeExit = 3;
constexpr int kBudgetExit = 4;
constexpr int kEnvelopeExit = 5;

constexpr std::size_t kOracleCells = 10000;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string json_str(const std::string& s) { return "\"" + json_escape(s) + "\""; }

std::string json_opt(const std::optional<double>& v) {
  return v ? g17(*v) : "null";
}

std::string json_opt_str(const std::optional<std::string>& v) {
  return v ? json_str(*v) : "null";
}

class WallTimer {
 public:
  WallTimer() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Shared request plumbing
// ---------------------------------------------------------------------------

struct InputOptions {
  std::string function;
  std::string table;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> l;
  std::optional<double> L;
  std::optional<std::size_t> estimate_n;
  bool accept_estimated = false;
};

void add_input_options(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("--function", in.function,
                  "integrand expression over t, e.g. \"t^2 + sin(t)\"");
  cmd->add_option("--table", in.table,
                  "CSV file of t,f rows (piecewise-linear integrand)");
  cmd->add_option("--a", in.a, "left endpoint");
  cmd->add_option("--b", in.b, "right endpoint");
  cmd->add_option("--l", in.l, "declared lower slope");
  cmd->add_option("--L", in.L, "declared upper slope");
  cmd->add_option("--estimate-slopes", in.estimate_n,
                  "sample n+1 points to estimate the slope envelope");
  cmd->add_flag("--accept-estimated", in.accept_estimated,
                "accept estimated slopes (certificate becomes heuristic)");
}

struct ResolvedInput {
  Integrand f;
  Interval iv{0.0, 1.0};
  std::optional<double> l;
  std::optional<double> L;
  bool heuristic = false;         // slopes were sampled, not declared
  bool from_table = false;
  std::optional<std::string> function_text;
  std::optional<std::string> table_path;
};

// Turns the input flags into an integrand, an interval and the slope
// envelope. need_l/need_L say which sides the selected rule consumes.
ResolvedInput resolve_input(const InputOptions& in, bool need_l, bool need_L) {
  ResolvedInput out;
  const bool has_fn = !in.function.empty();
  const bool has_table = !in.table.empty();
  if (has_fn == has_table)
    throw ValidationError("exactly one of --function or --table is required");

  if (has_table) {
    if (in.l || in.L || in.estimate_n)
      throw ValidationError("--table computes exact slopes internally; "
                            "--l/--L/--estimate-slopes are not accepted");
    const TabulatedFunction tab = TabulatedFunction::load_csv(in.table);
    const Interval dom = tab.domain();
    const double a = in.a.value_or(dom.a);
    const double b = in.b.value_or(dom.b);
    if (a < dom.a || b > dom.b)
      throw ValidationError("[--a, --b] must lie within the tabulated range [" +
                            g17(dom.a) + ", " + g17(dom.b) + "]");
    out.iv = Interval(a, b);
    const SlopeBounds s = tab.slopes(out.iv);
    out.f = to_integrand(tab);
    out.l = s.l;
    out.L = s.L;
    out.from_table = true;
    out.table_path = in.table;
    return out;
  }

  if (!in.a || !in.b)
    throw ValidationError("--a and --b are required with --function");
  out.iv = Interval(*in.a, *in.b);
  out.f = to_integrand(parse(in.function));
  out.function_text = in.function;

  if (in.estimate_n) {
    if (in.l || in.L)
      throw ValidationError("--estimate-slopes conflicts with --l/--L");
    if (!in.accept_estimated)
      throw ValidationError("estimated slopes require --accept-estimated "
                            "(the certificate becomes heuristic)");
    const SlopeEstimate est = estimate_slopes(out.f, out.iv, *in.estimate_n);
    out.l = est.l_hat;
    out.L = est.L_hat;
    out.heuristic = true;
    return out;
  }

  out.l = in.l;
  out.L = in.L;
  if (need_l && !out.l)
    throw ValidationError("the selected rule needs --l (or --estimate-slopes)");
  if (need_L && !out.L)
    throw ValidationError("the selected rule needs --L (or --estimate-slopes)");
  return out;
}

// ---------------------------------------------------------------------------
// integrate
// ---------------------------------------------------------------------------

struct IntegrateOptions {
  InputOptions in;
  std::string rule = "midrange";
  std::optional<double> h;
  std::optional<double> x;
  std::string preset;
  std::optional<std::size_t> cells;
  std::optional<double> tol;
  std::size_t max_cells = 65536;
  bool verify = false;
  std::string format = "text";
};

struct IntegrateReport {
  const IntegrateOptions* opts;
  const ResolvedInput* input;
  double h;
  std::optional<double> x;
  double value;
  double bound;
  std::vector<CertifiedEstimate> cells;  // per-cell breakdown
  std::vector<double> cell_lo, cell_hi;
  std::optional<std::string> selected;  // family chosen by --rule best
  std::optional<double> oracle;
  std::optional<double> error;
  double wall_ms = 0.0;
};

void emit_integrate_json(const IntegrateReport& r) {
  std::string out = "{\"request\":{";
  out += "\"command\":\"integrate\"";
  out += ",\"function\":" + json_opt_str(r.input->function_text);
  out += ",\"table\":" + json_opt_str(r.input->table_path);
  out += ",\"a\":" + g17(r.input->iv.a) + ",\"b\":" + g17(r.input->iv.b);
  out += ",\"rule\":" + json_str(r.opts->rule);
  out += ",\"h\":" + g17(r.h);
  out += ",\"x\":" + json_opt(r.x);
  out += ",\"l\":" + json_opt(r.input->l) + ",\"L\":" + json_opt(r.input->L);
  out += ",\"cells\":" +
         (r.opts->cells ? std::to_string(*r.opts->cells) : std::string("null"));
  out += ",\"tol\":" + json_opt(r.opts->tol);
  out += ",\"selected\":" + json_opt_str(r.selected);
  out += ",\"estimated_slopes\":";
  out += r.input->heuristic ? "true" : "false";
  out += "},\"value\":" + g17(r.value) + ",\"bound\":" + g17(r.bound);
  out += ",\"cells\":[";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    if (i) out += ",";
    out += "{\"a\":" + g17(r.cell_lo[i]) + ",\"b\":" + g17(r.cell_hi[i]) +
           ",\"xi\":" + g17(r.cells[i].params.x) +
           ",\"value\":" + g17(r.cells[i].value) +
           ",\"bound\":" + g17(r.cells[i].bound) +
           ",\"secant\":" + g17(r.cells[i].secant) + "}";
  }
  out += "],\"oracle\":" + json_opt(r.oracle);
  out += ",\"error\":" + json_opt(r.error);
  out += ",\"meta\":{\"tool\":\"certquad\",\"version\":" + json_str(kVersion) +
         ",\"wall_ms\":" + g17(r.wall_ms) + ",\"heuristic_slopes\":" +
         (r.input->heuristic ? "true" : "false") + "}}";
  std::cout << out << "\n";
}

void emit_integrate_csv(const IntegrateReport& r) {
  std::cout << "kind,index,a,b,rule,h,x,l,L,value,bound,secant,oracle,error,"
               "heuristic\n";
  std::cout << "total,," << g17(r.input->iv.a) << "," << g17(r.input->iv.b)
            << "," << r.opts->rule << "," << g17(r.h) << ","
            << (r.x ? g17(*r.x) : "") << ","
            << (r.input->l ? g17(*r.input->l) : "") << ","
            << (r.input->L ? g17(*r.input->L) : "") << "," << g17(r.value)
            << "," << g17(r.bound) << ","
            << "," << (r.oracle ? g17(*r.oracle) : "") << ","
            << (r.error ? g17(*r.error) : "") << ","
            << (r.input->heuristic ? "true" : "false") << "\n";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    std::cout << "cell," << i << "," << g17(r.cell_lo[i]) << ","
              << g17(r.cell_hi[i]) << "," << to_string(r.cells[i].rule) << ","
              << g17(r.cells[i].params.h) << "," << g17(r.cells[i].params.x)
              << ",,," << g17(r.cells[i].value) << "," << g17(r.cells[i].bound)
              << "," << g17(r.cells[i].secant) << ",,,\n";
  }
}

void emit_integrate_text(const IntegrateReport& r) {
  std::cout << "command      integrate\n";
  if (r.input->function_text)
    std::cout << "function     " << *r.input->function_text << "\n";
  if (r.input->table_path)
    std::cout << "table        " << *r.input->table_path << "\n";
  std::cout << "interval     [" << g17(r.input->iv.a) << ", "
            << g17(r.input->iv.b) << "]\n";
  std::cout << "rule         " << r.opts->rule;
  if (r.selected) std::cout << " (selected " << *r.selected << ")";
  std::cout << "\n";
  std::cout << "h            " << g17(r.h) << "\n";
  if (r.x) std::cout << "x            " << g17(*r.x) << "\n";
  std::cout << "slopes       l = "
            << (r.input->l ? g17(*r.input->l) : std::string("-")) << ", L = "
            << (r.input->L ? g17(*r.input->L) : std::string("-"))
            << (r.input->heuristic ? "  (heuristic: estimated from samples)"
                                   : "")
            << "\n";
  std::cout << "value        " << g17(r.value) << "\n";
  std::cout << "bound        " << g17(r.bound) << "\n";
  std::cout << "cells        " << r.cells.size() << "\n";
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    std::cout << "  cell " << i << ": [" << g17(r.cell_lo[i]) << ", "
              << g17(r.cell_hi[i]) << "] xi = " << g17(r.cells[i].params.x)
              << " value = " << g17(r.cells[i].value)
              << " bound = " << g17(r.cells[i].bound) << "\n";
  }
  if (r.oracle) std::cout << "oracle       " << g17(*r.oracle) << "\n";
  if (r.error) std::cout << "error        " << g17(*r.error) << "\n";
  std::cout << "wall_ms      " << g17(r.wall_ms) << "\n";
}

RuleFamily family_from_name(const std::string& name) {
  if (name == "midrange") return RuleFamily::MidRange;
  if (name == "lower") return RuleFamily::Lower;
  if (name == "upper") return RuleFamily::Upper;
  throw ValidationError("unknown rule family '" + name + "'");
}

int run_integrate(const IntegrateOptions& opts) {
  WallTimer timer;
  if (!opts.preset.empty() && opts.h)
    throw ValidationError("--rule-preset already pins h; drop --h");
  if (opts.cells && opts.tol)
    throw ValidationError("--cells (fixed composite) conflicts with --tol "
                          "(adaptive)");
  if (opts.x && (opts.cells || opts.tol))
    throw ValidationError("--x applies to single-interval rules only; "
                          "composite evaluation points default to midpoints");

  const bool need_l = opts.rule == "midrange" || opts.rule == "lower" ||
                      opts.rule == "best";
  const bool need_L = opts.rule != "lower";
  const ResolvedInput input = resolve_input(opts.in, need_l, need_L);

  double h = 0.5;
  if (opts.h) h = *opts.h;
  if (!opts.preset.empty()) {
    if (opts.preset == "midpoint") h = 0.0;
    else if (opts.preset == "trapezoid") h = 1.0;
    else if (opts.preset == "threepoint") h = 0.5;
    else if (opts.preset == "simpson") h = 1.0 / 3.0;
    else throw ValidationError("unknown preset '" + opts.preset + "'");
  }

  IntegrateReport report{};
  report.opts = &opts;
  report.input = &input;
  report.h = h;

  const auto slopes = [&]() -> SlopeBounds {
    if (opts.rule == "lower") return SlopeBounds(*input.l, *input.l);
    if (opts.rule == "upper") return SlopeBounds(*input.L, *input.L);
    if (opts.rule == "lipschitz") return SlopeBounds::from_lipschitz(*input.L);
    return SlopeBounds(*input.l, *input.L);
  };

  const auto record_composite = [&](const CompositeCertificate& cert,
                                    const Partition& part) {
    report.value = cert.value;
    report.bound = cert.bound;
    report.cells = cert.cells;
    for (std::size_t i = 0; i < part.cells(); ++i) {
      report.cell_lo.push_back(part.nodes()[i]);
      report.cell_hi.push_back(part.nodes()[i + 1]);
    }
  };

  if (opts.tol) {  // adaptive composite
    if (opts.rule != "midrange")
      throw ValidationError("adaptive refinement (--tol) runs the midrange "
                            "family; use --rule midrange");
    const SlopeBounds s = slopes();
    const Partition part =
        adaptive_partition(input.f, input.iv, s, *opts.tol, opts.max_cells);
    record_composite(composite_midrange(input.f, part, s), part);
  } else if (opts.cells) {  // fixed uniform composite
    const Partition part = Partition::uniform(input.iv, *opts.cells);
    const SlopeBounds s = slopes();
    if (opts.rule == "best") {
      CompositeCertificate best =
          composite_general(input.f, part, h, s, RuleFamily::MidRange);
      for (RuleFamily fam : {RuleFamily::Lower, RuleFamily::Upper}) {
        const CompositeCertificate cand =
            composite_general(input.f, part, h, s, fam);
        if (cand.bound < best.bound) best = cand;
      }
      report.selected = to_string(best.family);
      record_composite(best, part);
    } else if (opts.rule == "lipschitz") {
      record_composite(
          composite_general(input.f, part, h, s, RuleFamily::MidRange), part);
    } else {
      record_composite(
          composite_general(input.f, part, h, s, family_from_name(opts.rule)),
          part);
    }
  } else {  // single interval
    const double x = opts.x ? *opts.x : input.iv.midpoint();
    report.x = x;
    const RuleParams p(input.iv, h, x);
    CertifiedEstimate est =
        opts.rule == "midrange"
            ? rule_midrange(input.f, input.iv, p, slopes())
        : opts.rule == "lower"
            ? rule_lower(input.f, input.iv, p, *input.l)
        : opts.rule == "upper"
            ? rule_upper(input.f, input.iv, p, *input.L)
        : opts.rule == "lipschitz"
            ? rule_lipschitz(input.f, input.iv, p, *input.L)
            : best_rule(input.f, input.iv, p, slopes());
    if (opts.rule == "best") report.selected = to_string(est.rule);
    report.value = est.value;
    report.bound = est.bound;
    report.cells = {est};
    report.cell_lo = {input.iv.a};
    report.cell_hi = {input.iv.b};
  }

  if (opts.verify) {
    report.oracle = oracle_integral(input.f, input.iv, kOracleCells);
    report.error = std::fabs(report.value - *report.oracle);
  }
  report.wall_ms = timer.ms();

  if (opts.format == "json") emit_integrate_json(report);
  else if (opts.format == "csv") emit_integrate_csv(report);
  else emit_integrate_text(report);
  return kOkExit;
}

// ---------------------------------------------------------------------------
// prob
// ---------------------------------------------------------------------------

struct ProbOptions {
  double a = 0.0;
  double b = 0.0;
  double m = 0.0;
  double M = 0.0;
  std::optional<double> expectation;
  std::optional<double> x;
  double h = 0.5;
  std::optional<double> pr;
  std::string format = "text";
};

void emit_envelope(const std::string& command, const ProbOptions& o,
                   double lo, double hi, double wall_ms) {
  if (o.format == "json") {
    std::string out = "{\"request\":{\"command\":" + json_str(command);
    out += ",\"a\":" + g17(o.a) + ",\"b\":" + g17(o.b);
    out += ",\"m\":" + g17(o.m) + ",\"M\":" + g17(o.M);
    out += ",\"expectation\":" + json_opt(o.expectation);
    out += ",\"x\":" + json_opt(o.x);
    if (command == "prob cdf") out += ",\"h\":" + g17(o.h);
    out += "},\"lo\":" + g17(lo) + ",\"hi\":" + g17(hi);
    out += ",\"width\":" + g17(hi - lo);
    out += ",\"meta\":{\"tool\":\"certquad\",\"version\":" + json_str(kVersion) +
           ",\"wall_ms\":" + g17(wall_ms) + "}}";
    std::cout << out << "\n";
  } else if (o.format == "csv") {
    std::cout << "lo,hi,width\n"
              << g17(lo) << "," << g17(hi) << "," << g17(hi - lo) << "\n";
  } else {
    std::cout << "command      " << command << "\n";
    std::cout << "support      [" << g17(o.a) << ", " << g17(o.b) << "]\n";
    std::cout << "density      m = " << g17(o.m) << ", M = " << g17(o.M)
              << "\n";
    if (o.expectation)
      std::cout << "expectation  " << g17(*o.expectation) << "\n";
    if (o.x) std::cout << "x            " << g17(*o.x) << "\n";
    if (command == "prob cdf") std::cout << "h            " << g17(o.h) << "\n";
    std::cout << "envelope     [" << g17(lo) << ", " << g17(hi) << "]\n";
    std::cout << "width        " << g17(hi - lo) << "\n";
    std::cout << "wall_ms      " << g17(wall_ms) << "\n";
  }
}

int run_prob_cdf(const ProbOptions& o) {
  WallTimer timer;
  const DensityModel dm(Interval(o.a, o.b), o.m, o.M, o.expectation);
  if (o.h >= 1.0)
    throw ValidationError("prob cdf requires --h < 1 (at h = 1 the "
                          "probability term drops out of the estimate)");
  const double x = o.x ? *o.x : dm.support.midpoint();
  const ProbabilityEnvelope env = cdf_envelope(dm, x, o.h);
  ProbOptions echo = o;
  echo.x = x;
  emit_envelope("prob cdf", echo, env.lo, env.hi, timer.ms());
  return kOkExit;
}

int run_prob_expectation(const ProbOptions& o) {
  WallTimer timer;
  const DensityModel dm(Interval(o.a, o.b), o.m, o.M, o.expectation);
  const Interval env = expectation_envelope(dm);
  emit_envelope("prob expectation", o, env.a, env.b, timer.ms());
  return kOkExit;
}

int run_prob_midpoint_check(const ProbOptions& o) {
  WallTimer timer;
  const DensityModel dm(Interval(o.a, o.b), o.m, o.M, o.expectation);
  if (!o.pr) throw ValidationError("midpoint-check requires --pr");
  const MidpointCheckReport report = cdf_midpoint_check(dm, *o.pr);
  const double wall_ms = timer.ms();
  if (o.format == "json") {
    std::string out =
        "{\"request\":{\"command\":\"prob midpoint-check\",\"a\":" + g17(o.a) +
        ",\"b\":" + g17(o.b) + ",\"m\":" + g17(o.m) + ",\"M\":" + g17(o.M) +
        ",\"expectation\":" + json_opt(o.expectation) +
        ",\"pr\":" + g17(*o.pr) + "},\"checks\":[";
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
      const auto& c = report.checks[i];
      if (i) out += ",";
      out += "{\"name\":" + json_str(c.name) + ",\"lhs\":" + g17(c.lhs) +
             ",\"rhs\":" + g17(c.rhs) + ",\"pass\":" +
             (c.pass ? "true" : "false") + "}";
    }
    out += "],\"all_pass\":";
    out += report.all_pass() ? "true" : "false";
    out += ",\"meta\":{\"tool\":\"certquad\",\"version\":" + json_str(kVersion) +
           ",\"wall_ms\":" + g17(wall_ms) + "}}";
    std::cout << out << "\n";
  } else if (o.format == "csv") {
    std::cout << "name,lhs,rhs,pass\n";
    for (const auto& c : report.checks)
      std::cout << c.name << "," << g17(c.lhs) << "," << g17(c.rhs) << ","
                << (c.pass ? "true" : "false") << "\n";
  } else {
    std::cout << "command      prob midpoint-check\n";
    for (const auto& c : report.checks)
      std::cout << "check " << c.name << ": lhs = " << g17(c.lhs)
                << " <= rhs = " << g17(c.rhs) << " : "
                << (c.pass ? "pass" : "FAIL") << "\n";
    std::cout << "result       " << (report.all_pass() ? "pass" : "FAIL")
              << "\n";
  }
  if (!report.all_pass()) {
    std::cerr << "certquad: envelope-inconsistency: midpoint check failed; "
                 "the declared (m, M, E, pr) are mutually inconsistent\n";
    return kEnvelopeExit;
  }
  return kOkExit;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepOptions {
  InputOptions in;
  std::size_t h_grid = 11;
  std::size_t x_grid = 5;
  std::string format = "csv";
};

struct SweepRow {
  double h;
  double x;
  std::string family;
  double value;
  double bound;
  double error;
  double ratio;
};

int run_sweep(const SweepOptions& opts) {
  WallTimer timer;
  const ResolvedInput input = resolve_input(opts.in, true, true);
  if (opts.h_grid < 2 || opts.x_grid < 1)
    throw ValidationError("--h-grid needs >= 2 points, --x-grid >= 1");
  const SlopeBounds s(*input.l, *input.L);
  const double oracle = oracle_integral(input.f, input.iv, kOracleCells);

  std::vector<SweepRow> rows;
  for (std::size_t ih = 0; ih < opts.h_grid; ++ih) {
    const double h = static_cast<double>(ih) /
                     static_cast<double>(opts.h_grid - 1);
    const double lo = RuleParams::admissible_lo(input.iv, h);
    const double hi = RuleParams::admissible_hi(input.iv, h);
    for (std::size_t ix = 0; ix < opts.x_grid; ++ix) {
      const double u = opts.x_grid == 1
                           ? 0.5
                           : static_cast<double>(ix) /
                                 static_cast<double>(opts.x_grid - 1);
      const double x = lo + u * (hi - lo);
      const RuleParams p(input.iv, h, x);
      const CertifiedEstimate ests[3] = {
          rule_midrange(input.f, input.iv, p, s),
          rule_lower(input.f, input.iv, p, s.l),
          rule_upper(input.f, input.iv, p, s.L)};
      for (const CertifiedEstimate& est : ests) {
        const double err = std::fabs(est.value - oracle);
        rows.push_back({h, x, to_string(est.rule), est.value, est.bound, err,
                        est.bound / err});
      }
    }
  }

  // summary: the grid h minimizing the midrange bound at x = midpoint
  double best_h = 0.0;
  double best_bound = std::numeric_limits<double>::infinity();
  for (std::size_t ih = 0; ih < opts.h_grid; ++ih) {
    const double h = static_cast<double>(ih) /
                     static_cast<double>(opts.h_grid - 1);
    const double bound =
        rule_midrange(input.f, input.iv, RuleParams::midpoint(input.iv, h), s)
            .bound;
    if (bound < best_bound) {
      best_bound = bound;
      best_h = h;
    }
  }
  const double wall_ms = timer.ms();

  if (opts.format == "json") {
    std::string out = "{\"request\":{\"command\":\"sweep\"";
    out += ",\"function\":" + json_opt_str(input.function_text);
    out += ",\"table\":" + json_opt_str(input.table_path);
    out += ",\"a\":" + g17(input.iv.a) + ",\"b\":" + g17(input.iv.b);
    out += ",\"l\":" + json_opt(input.l) + ",\"L\":" + json_opt(input.L);
    out += ",\"h_grid\":" + std::to_string(opts.h_grid);
    out += ",\"x_grid\":" + std::to_string(opts.x_grid) + "},\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const SweepRow& r = rows[i];
      if (i) out += ",";
      out += "{\"h\":" + g17(r.h) + ",\"x\":" + g17(r.x) +
             ",\"family\":" + json_str(r.family) + ",\"value\":" +
             g17(r.value) + ",\"bound\":" + g17(r.bound) +
             ",\"error\":" + g17(r.error) + ",\"ratio\":" +
             (std::isfinite(r.ratio) ? g17(r.ratio) : "null") + "}";
    }
    out += "],\"summary\":{\"min_midrange_bound_h\":" + g17(best_h) +
           ",\"min_midrange_bound\":" + g17(best_bound) + "}";
    out += ",\"meta\":{\"tool\":\"certquad\",\"version\":" + json_str(kVersion) +
           ",\"wall_ms\":" + g17(wall_ms) + "}}";
    std::cout << out << "\n";
  } else {
    std::cout << "h,x,family,value,bound,error,ratio\n";
    for (const SweepRow& r : rows)
      std::cout << g17(r.h) << "," << g17(r.x) << "," << r.family << ","
                << g17(r.value) << "," << g17(r.bound) << "," << g17(r.error)
                << "," << g17(r.ratio) << "\n";
    std::cout << g17(best_h) << "," << g17(input.iv.midpoint())
              << ",summary,," << g17(best_bound) << ",,\n";
  }
  return kOkExit;
}

// ---------------------------------------------------------------------------

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const SlopeConsistencyError& e) {
    std::cerr << "certquad: slope-consistency: " << e.what() << "\n";
    return kSlopeExit;
  } catch (const BudgetExceededError& e) {
    std::cerr << "certquad: budget-exceeded: " << e.what() << "\n";
    return kBudgetExit;
  } catch (const EnvelopeInconsistencyError& e) {
    std::cerr << "certquad: envelope-inconsistency: " << e.what() << "\n";
    return kEnvelopeExit;
  } catch (const Error& e) {
    std::cerr << "certquad: validation: " << e.what() << "\n";
    return kValidationExit;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified quadrature with rigorous error bounds"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h for the h parameter
  app.set_version_flag("--version", std::string("certquad ") + kVersion);

  const auto add_sub = [](CLI::App* parent, const std::string& name,
                          const std::string& desc) {
    CLI::App* sub = parent->add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help");
    return sub;
  };
  const auto add_format = [](CLI::App* cmd, std::string& fmt) {
    cmd->add_option("--format", fmt, "output format")
        ->check(CLI::IsMember({"text", "json", "csv"}));
  };

  IntegrateOptions integ;
  CLI::App* integrate =
      add_sub(&app, "integrate", "integrate with a certified bound");
  add_input_options(integrate, integ.in);
  integrate->add_option("--rule", integ.rule, "bound family")
      ->check(CLI::IsMember({"midrange", "lower", "upper", "lipschitz",
                             "best"}));
  integrate->add_option("--h", integ.h, "endpoint weight in [0, 1]")
      ->check(CLI::Range(0.0, 1.0));
  integrate->add_option("--x", integ.x, "evaluation point");
  integrate->add_option("--rule-preset", integ.preset,
                        "pin h to a classical rule")
      ->check(CLI::IsMember({"midpoint", "trapezoid", "threepoint",
                             "simpson"}));
  integrate->add_option("--cells", integ.cells, "uniform composite cells");
  integrate->add_option("--tol", integ.tol,
                        "adaptive refinement to this total bound");
  integrate->add_option("--max-cells", integ.max_cells,
                        "adaptive cell budget");
  integrate->add_flag("--verify", integ.verify,
                      "append the reference value and realized error");
  add_format(integrate, integ.format);

  CLI::App* prob = add_sub(&app, "prob", "density-envelope bounds");
  prob->require_subcommand(1);
  ProbOptions prob_opts;
  const auto add_prob_common = [&](CLI::App* cmd) {
    cmd->add_option("--a", prob_opts.a, "support left endpoint")->required();
    cmd->add_option("--b", prob_opts.b, "support right endpoint")->required();
    cmd->add_option("--m", prob_opts.m, "density floor")->required();
    cmd->add_option("--M", prob_opts.M, "density ceiling")->required();
    add_format(cmd, prob_opts.format);
  };
  CLI::App* prob_cdf = add_sub(prob, "cdf", "enclose Pr(X <= x)");
  add_prob_common(prob_cdf);
  prob_cdf->add_option("--expectation", prob_opts.expectation, "E[X]")
      ->required();
  prob_cdf->add_option("--x", prob_opts.x, "query point (default midpoint)");
  prob_cdf->add_option("--h", prob_opts.h, "endpoint weight in [0, 1)");
  CLI::App* prob_exp =
      add_sub(prob, "expectation", "enclose E[X] from (m, M) alone");
  add_prob_common(prob_exp);
  CLI::App* prob_check =
      add_sub(prob, "midpoint-check", "verify the midpoint residuals");
  add_prob_common(prob_check);
  prob_check->add_option("--expectation", prob_opts.expectation, "E[X]")
      ->required();
  prob_check->add_option("--pr", prob_opts.pr, "Pr(X <= (a+b)/2)")->required();

  SweepOptions sweep;
  CLI::App* sweep_cmd =
      add_sub(&app, "sweep", "grid report over (h, x, family)");
  add_input_options(sweep_cmd, sweep.in);
  sweep_cmd->add_option("--h-grid", sweep.h_grid, "number of h grid points");
  sweep_cmd->add_option("--x-grid", sweep.x_grid, "number of x grid points");
  add_format(sweep_cmd, sweep.format);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "certquad: validation: " << e.what() << "\n";
    return kValidationExit;
  }

  if (app.got_subcommand(integrate))
    return run_guarded([&] { return run_integrate(integ); });
  if (app.got_subcommand(prob)) {
    if (prob->got_subcommand(prob_cdf))
      return run_guarded([&] { return run_prob_cdf(prob_opts); });
    if (prob->got_subcommand(prob_exp))
      return run_guarded([&] { return run_prob_expectation(prob_opts); });
    if (prob->got_subcommand(prob_check))
      return run_guarded([&] { return run_prob_midpoint_check(prob_opts); });
  }
  if (app.got_subcommand(sweep_cmd))
    return run_guarded([&] { return run_sweep(sweep); });
  std::cerr << "certquad: validation: no subcommand\n";
  return kValidationExit;
}
