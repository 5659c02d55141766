// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "eldan/error.hpp"
#include "eldan/gaussian_geometry.hpp"
#include "eldan/localization.hpp"
#include "eldan/montecarlo.hpp"
#include "eldan/rng.hpp"

namespace eldan {

namespace {

// Diagnostics CSVs are written for this many leading paths; the invariant
// summary always covers every path.
constexpr std::int64_t kCsvPaths = 16;

const PolynomialMap& need_map(const ExperimentConfig& c) {
  if (!c.map) fail(ErrorKind::validation, "config has no map", "/map");
  return *c.map;
}

Json header(const std::string& command, const ExperimentConfig& c) {
  return {{"experiment", c.experiment},
          {"command", command},
          {"seed", c.seed},
          {"config_hash", config_hash(c)}};
}

std::string provenance_comment(const ExperimentConfig& c) {
  return "# config_hash=" + config_hash(c) + " seed=" + std::to_string(c.seed) +
         "\n";
}

// JSON cannot carry infinities; clamp them to the largest double.
double finite(double x) {
  if (std::isnan(x)) return x;
  return std::clamp(x, -std::numeric_limits<double>::max(),
                    std::numeric_limits<double>::max());
}

struct Check {
  std::string name;
  bool pass = true;
  double worst;
  void update(bool ok, double value, bool larger_is_worse) {
    if (!ok) pass = false;
    worst = larger_is_worse ? std::max(worst, value) : std::min(worst, value);
  }
  Json to_json() const { return {{"pass", pass}, {"worst", finite(worst)}}; }
};

// ---------------------------------------------------------------- localize

struct PathSummary {
  bool aborted = false;
  std::string reason;
  double max_pre = 0.0;
  double max_post = 0.0;
  double min_lambda = std::numeric_limits<double>::infinity();
  double max_trace_ratio = 0.0;  // Tr B / (n e^t)
  double min_growth_ratio = std::numeric_limits<double>::infinity();
  double max_accum_excess = -std::numeric_limits<double>::infinity();
  bool collapse_ok = true;
  double collapse_ratio = 0.0;
  std::string csv;
};

std::string diagnostics_csv(const std::vector<DiagnosticRow>& rows,
                            const std::string& comment) {
  std::string out = comment;
  out += "t,fiber_residual,lambda_min_B,lambda_k1_B,trace_B,accum_gap\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t,
                  r.fiber_residual, r.lambda_min_b, r.lambda_k1_b, r.trace_b,
                  r.accum_gap);
    out += buf;
  }
  return out;
}

PathSummary summarize_path(const PathResult& res, const PolynomialMap& f,
                           double h_eff, double rank_tol) {
  PathSummary s;
  const double n = f.n();
  const int k = f.k();
  for (const auto& r : res.rows) {
    s.max_pre = std::max(s.max_pre, r.fiber_residual);
    s.max_post = std::max(s.max_post, r.post_residual);
    s.min_lambda = std::min(s.min_lambda, r.lambda_min_b);
    s.max_trace_ratio = std::max(s.max_trace_ratio, r.trace_b / (n * std::exp(r.t)));
    if (k < f.n() && r.t > 0.0)
      s.min_growth_ratio =
          std::min(s.min_growth_ratio, r.lambda_k1_b / (r.t / (n * (k + 1))));
  }
  const auto& st = res.state;
  // The Euler sum of Sigma Sigma* equals (1 + h/n)(Id - B^{-1}).
  double accum_max = hermitian_eig(st.sigma_accum).values.maxCoeff();
  s.max_accum_excess = accum_max - (1.0 + h_eff / n);
  try {
    terminal_gaussian(st, rank_tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::invariant) throw;
    s.collapse_ok = false;
  }
  if (k < f.n() && st.t > 0.0)
    s.collapse_ratio = collapsing_covariance_eigenvalue(st) /
                       (2.0 * n * (k + 1) / st.t);
  return s;
}

ExperimentResult run_localize(const ExperimentConfig& c, const RunOptions& o) {
  const PolynomialMap& f = need_map(c);
  const std::int64_t steps = step_count(c.horizon, c.h);
  const double h_eff = c.horizon / static_cast<double>(steps);
  PathOptions po{c.horizon, c.h, c.record_stride};
  const std::string comment = provenance_comment(c);

  std::vector<PathSummary> sums(static_cast<std::size_t>(c.paths));
  parallel_for(c.paths, o.threads, [&](std::int64_t i) {
    auto stream = StreamId::of(c.seed, StreamPurpose::path,
                               static_cast<std::uint64_t>(i));
    PathSummary& s = sums[static_cast<std::size_t>(i)];
    try {
      PathResult res = run_path(f, po, stream);
      s = summarize_path(res, f, h_eff, c.rank_tol);
      if (i < kCsvPaths) s.csv = diagnostics_csv(res.rows, comment);
    } catch (const PathAbort& e) {
      s.aborted = true;
      s.reason = e.what();
      if (i < kCsvPaths) s.csv = diagnostics_csv(e.partial().rows, comment);
    }
  });

  Check residual{"fiber_residual_post", true, 0.0};
  Check lambda{"lambda_min_B", true, std::numeric_limits<double>::infinity()};
  Check trace{"trace_bound", true, 0.0};
  Check growth{"eigenvalue_growth", true, std::numeric_limits<double>::infinity()};
  Check accum{"sigma_accum_bound", true, -std::numeric_limits<double>::infinity()};
  Check collapse{"rank_collapse_bound", true, 0.0};
  const bool growth_applies = c.h <= 1e-3 && f.k() < f.n();
  std::int64_t aborted = 0;
  double max_pre = 0.0;
  Json aborts = Json::array();
  ExperimentResult out;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    const auto& s = sums[i];
    if (!s.csv.empty())
      out.files.emplace_back("localize_path_" + std::to_string(i) + ".csv", s.csv);
    if (s.aborted) {
      ++aborted;
      aborts.push_back({{"path", i}, {"reason", s.reason}});
      continue;
    }
    max_pre = std::max(max_pre, s.max_pre);
    residual.update(s.max_post <= kFiberTol, s.max_post, true);
    lambda.update(s.min_lambda >= 1.0 - 1e-8, s.min_lambda, false);
    trace.update(s.max_trace_ratio <= 1.0 + 1e-6, s.max_trace_ratio, true);
    if (growth_applies)
      growth.update(s.min_growth_ratio >= 0.95, s.min_growth_ratio, false);
    accum.update(s.max_accum_excess <= 1e-6, s.max_accum_excess, true);
    collapse.update(s.collapse_ok, s.collapse_ratio, true);
  }

  Json checks = Json::object();
  for (const Check* ch : {&residual, &lambda, &trace, &accum, &collapse})
    checks[ch->name] = ch->to_json();
  if (growth_applies) checks[growth.name] = growth.to_json();
  bool ok = aborted == 0;
  for (auto it = checks.begin(); it != checks.end(); ++it)
    ok = ok && (*it)["pass"].get<bool>();

  out.summary = header("localize", c);
  out.summary["paths"] = c.paths;
  out.summary["aborted"] = aborted;
  out.summary["aborts"] = std::move(aborts);
  out.summary["T"] = c.horizon;
  out.summary["h"] = h_eff;
  out.summary["max_pre_projection_residual"] = max_pre;
  out.summary["checks"] = std::move(checks);
  out.summary["verdict"] = ok ? "pass" : "fail";
  out.verdict_ok = ok;
  out.files.emplace_back("localize_summary.json", out.summary.dump(2) + "\n");
  return out;
}

// -------------------------------------------------------------------- tube

struct DistanceInfo {
  double d;
  std::string source;
};

DistanceInfo distance_of(const ExperimentConfig& c, const PolynomialMap& f) {
  if (c.distance) return {*c.distance, "config"};
  auto starts = default_distance_starts(f, c.seed);
  return {distance_to_origin(f, starts).distance, "optimizer_upper_bound"};
}

std::string plot_header(const ExperimentConfig& c, const std::string& cols) {
  return provenance_comment(c) + "# " + cols + "\n";
}

ExperimentResult run_tube(const ExperimentConfig& c, const RunOptions& o) {
  const PolynomialMap& f = need_map(c);
  DistanceInfo dist = distance_of(c, f);
  TubeOptions to;
  to.samples = c.samples;
  to.seed = c.seed;
  to.threads = o.threads;
  to.norm.weights = c.weights;

  std::function<double(double)> baseline;
  if (c.weights.empty()) {
    baseline = [&](double r) { return affine_tube_measure(f.n(), f.k(), dist.d, r); };
  } else {
    if (f.k() != 1)
      fail(ErrorKind::unsupported, "circled-norm tubes need a hypersurface (k = 1)");
    // Translate of z0^perp at distance d: |z - w|_K reduces to
    // w_max |z_j* - d|, a one-dimensional disc of radius r r_K.
    CircledGeometry geo = circled_norm_geometry(CircledNormSpec{c.weights});
    const double rk = geo.r_k;
    baseline = [&, rk](double r) { return disc_measure(1, dist.d, r * rk); };
  }

  TubeSweep sweep = estimate_tube_sweep(f, c.r_grid, to);
  Json rows = Json::array();
  std::string plot = plot_header(c, "r p_hat baseline stderr");
  bool ok = true;
  char buf[128];
  for (const auto& e : sweep.rows) {
    double base = baseline(e.r);
    double margin = e.p_hat - base;
    bool pass = margin >= -3.0 * e.stderr_;
    ok = ok && pass;
    rows.push_back({{"r", e.r},
                    {"p_hat", e.p_hat},
                    {"stderr", e.stderr_},
                    {"baseline", base},
                    {"margin", margin},
                    {"verdict", pass ? "pass" : "fail"},
                    {"n_samples", e.n_samples},
                    {"n_hits", e.n_hits}});
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", e.r, e.p_hat,
                  base, e.stderr_);
    plot += buf;
  }
  ExperimentResult out;
  out.summary = header("tube", c);
  out.summary["norm"] = to.norm.label();
  out.summary["distance"] = dist.d;
  out.summary["distance_source"] = dist.source;
  out.summary["rows"] = std::move(rows);
  out.summary["optimizer_failures"] = sweep.optimizer_failures;
  out.verdict_ok = ok;
  out.files.emplace_back("tube.json", out.summary.dump(2) + "\n");
  out.files.emplace_back("tube_plot.dat", plot);
  return out;
}

ExperimentResult run_baseline(const ExperimentConfig& c, const RunOptions&) {
  const PolynomialMap& f = need_map(c);
  DistanceInfo dist = distance_of(c, f);
  Json rows = Json::array();
  std::string plot = plot_header(c, "r baseline");
  char buf[96];
  for (double r : c.r_grid) {
    double b = affine_tube_measure(f.n(), f.k(), dist.d, r);
    rows.push_back({{"r", r}, {"baseline", b}});
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", r, b);
    plot += buf;
  }
  ExperimentResult out;
  out.summary = header("baseline", c);
  out.summary["n"] = f.n();
  out.summary["k"] = f.k();
  out.summary["distance"] = dist.d;
  out.summary["distance_source"] = dist.source;
  out.summary["rows"] = std::move(rows);
  out.files.emplace_back("baseline.json", out.summary.dump(2) + "\n");
  out.files.emplace_back("baseline_plot.dat", plot);
  return out;
}

// ------------------------------------------------------ mixture, centerlaw

PathBatchOptions batch_of(const ExperimentConfig& c, const RunOptions& o) {
  return {c.horizon, c.h, c.paths, c.seed, o.threads};
}

std::vector<TestFunctional> default_functionals(int n) {
  ComplexVec e1 = ComplexVec::Zero(n);
  e1(0) = 1.0;
  return {functional::One{}, functional::SquaredNorm{},
          functional::HalfSpace{e1, 0.0}};
}

ExperimentResult run_mixture(const ExperimentConfig& c, const RunOptions& o) {
  const PolynomialMap& f = need_map(c);
  auto functionals =
      c.functionals.empty() ? default_functionals(f.n()) : c.functionals;
  MixtureReport rep =
      mixture_check(f, batch_of(c, o), functionals, c.density_points);
  Json rows = Json::array();
  bool ok = rep.valid();
  for (const auto& r : rep.rows) {
    bool pass = std::abs(r.z_score) <= 3.0;
    ok = ok && pass;
    rows.push_back({{"functional", r.tag},
                    {"mixture_mean", r.mixture_mean},
                    {"reference", r.reference},
                    {"stderr", r.stderr_},
                    {"z_score", finite(r.z_score)},
                    {"verdict", pass ? "pass" : "fail"}});
  }
  ExperimentResult out;
  out.summary = header("mixture", c);
  out.summary["rows"] = std::move(rows);
  out.summary["n_paths"] = rep.n_paths;
  out.summary["aborted"] = rep.aborted;
  out.summary["valid"] = rep.valid();
  out.summary["T"] = rep.horizon;
  out.summary["h"] = rep.h;
  out.verdict_ok = ok;
  out.files.emplace_back("mixture.json", out.summary.dump(2) + "\n");
  return out;
}

Json moment_json(const Moment& m) {
  return {{"mean", m.mean}, {"stderr", m.stderr_}};
}

bool is_linear(const PolynomialMap& f) {
  for (const auto& comp : f.components())
    for (const auto& m : comp) {
      int deg = 0;
      for (int e : m.exps) deg += e;
      if (deg > 1) return false;
    }
  return true;
}

ExperimentResult run_centerlaw(const ExperimentConfig& c, const RunOptions& o) {
  const PolynomialMap& f = need_map(c);
  CenterLaw law = center_law_sample(f, batch_of(c, o));
  const int n = f.n();

  std::string csv = provenance_comment(c) + "path";
  for (int j = 1; j <= n; ++j)
    csv += ",re_" + std::to_string(j) + ",im_" + std::to_string(j);
  csv += "\n";
  char buf[64];
  for (std::size_t i = 0; i < law.samples.size(); ++i) {
    csv += std::to_string(i);
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", law.samples[i](j).real(),
                    law.samples[i](j).imag());
      csv += buf;
    }
    csv += "\n";
  }

  Json coords = Json::array();
  for (int j = 0; j < n; ++j) {
    auto u = static_cast<std::size_t>(j);
    coords.push_back({{"re_mean", moment_json(law.re_mean[u])},
                      {"im_mean", moment_json(law.im_mean[u])},
                      {"abs2", moment_json(law.abs2[u])},
                      {"re_square", moment_json(law.re_square[u])},
                      {"im_square", moment_json(law.im_square[u])}});
  }
  const double bound = 2.0 * n + 3.0 * law.squared_norm.stderr_;
  const bool second_ok = law.squared_norm.mean <= bound;
  const bool valid = law.aborted * 100 <=
                     static_cast<std::int64_t>(law.samples.size()) + law.aborted;

  ExperimentResult out;
  out.summary = header("centerlaw", c);
  out.summary["n_paths"] = law.samples.size();
  out.summary["aborted"] = law.aborted;
  out.summary["linear_fiber"] = is_linear(f);
  out.summary["max_fiber_residual"] = law.max_fiber_residual;
  out.summary["squared_norm"] = moment_json(law.squared_norm);
  out.summary["squared_norm_bound"] = bound;
  out.summary["coordinates"] = std::move(coords);
  out.summary["verdict"] = second_ok && valid ? "pass" : "fail";
  out.verdict_ok = second_ok && valid;
  out.files.emplace_back("centerlaw_samples.csv", csv);
  out.files.emplace_back("centerlaw.json", out.summary.dump(2) + "\n");
  return out;
}

// -------------------------------------------------------------------- tilt

struct TiltInstance {
  std::vector<double> b;
  ComplexVec v;
  double radius;
};

TiltInstance draw_tilt_instance(const TiltSweepConfig& t, std::uint64_t seed,
                                std::uint64_t index) {
  CounterRng rng(StreamId::of(seed, StreamPurpose::tilt_instance, index));
  TiltInstance inst;
  for (int j = 0; j < t.k; ++j) inst.b.push_back(1.0 + t.b_extra_max * rng.uniform());
  ComplexVec dir = standard_complex_gaussian(rng, t.k);
  inst.v = dir.normalized() * (t.v_max * rng.uniform());
  inst.radius = t.r_min + (t.r_max - t.r_min) * rng.uniform();
  return inst;
}

ExperimentResult run_tilt(const ExperimentConfig& c, const RunOptions& o) {
  const auto& t = c.tilt;
  std::vector<Json> rows(static_cast<std::size_t>(t.instances));
  std::vector<char> holds(rows.size());
  parallel_for(t.instances, o.threads, [&](std::int64_t i) {
    TiltInstance inst = draw_tilt_instance(t, c.seed, static_cast<std::uint64_t>(i));
    TiltCheck chk =
        tilt_inequality_check(HermitianMatrix::diagonal(inst.b), inst.v, inst.radius);
    holds[static_cast<std::size_t>(i)] = chk.holds;
    rows[static_cast<std::size_t>(i)] = {{"b_diag", inst.b},
                                         {"v", vec_to_json(inst.v)},
                                         {"R", inst.radius},
                                         {"lhs", chk.lhs},
                                         {"rhs", chk.rhs},
                                         {"holds", chk.holds}};
  });
  bool ok = std::all_of(holds.begin(), holds.end(), [](char h) { return h != 0; });
  ExperimentResult out;
  out.summary = header("tilt", c);
  out.summary["k"] = t.k;
  out.summary["instances"] = t.instances;
  out.summary["rows"] = rows;
  out.summary["verdict"] = ok ? "pass" : "fail";
  out.verdict_ok = ok;
  out.files.emplace_back("tilt.json", out.summary.dump(2) + "\n");
  return out;
}

// ---------------------------------------------------------------- selftest

// A compact version of the invariant suite that runs in seconds.
ExperimentResult run_selftest(const ExperimentConfig& c, const RunOptions& o) {
  Json checks = Json::array();
  bool ok = true;
  auto record = [&](const std::string& name, bool pass, double value) {
    ok = ok && pass;
    checks.push_back({{"name", name}, {"pass", pass}, {"value", finite(value)}});
  };

  // Philox known-answer test.
  {
    PhiloxBlock b = philox4x32({0, 0, 0, 0}, {0, 0});
    bool pass = b == PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
    record("philox_known_answer", pass, 0.0);
  }

  // Hermitian algebra on random matrices.
  {
    CounterRng rng(StreamId::of(c.seed, StreamPurpose::selftest, 0));
    double worst_proj = 0.0, worst_root = 0.0, worst_eig = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const int n = 2 + trial % 4;
      ComplexMat g(n, n);
      for (int r = 0; r < n; ++r)
        for (int col = 0; col < n; ++col) g(r, col) = rng.complex_normal(0.5);
      HermitianMatrix b = HermitianMatrix::symmetrized(
          g * g.adjoint() + ComplexMat::Identity(n, n));
      auto e = hermitian_eig(b);
      ComplexMat rec = e.vectors * e.values.cast<Complex>().asDiagonal() *
                       e.vectors.adjoint();
      worst_eig = std::max(worst_eig, (rec - b.matrix()).norm() / b.matrix().norm());
      RootPair roots = pd_roots(b);
      worst_root = std::max(
          worst_root, (roots.sqrt.matrix() * roots.inv_sqrt.matrix() -
                       ComplexMat::Identity(n, n)).norm());
      auto q = SubspaceBasis::orthonormalize(g.leftCols(1), 1e-12);
      ComplexMat p = proj_with_kernel(q).matrix();
      worst_proj = std::max({worst_proj, (p * p - p).norm(), (p * q.columns()).norm()});
    }
    record("eig_reconstruction", worst_eig <= 1e-10, worst_eig);
    record("root_inverse_product", worst_root <= 1e-10, worst_root);
    record("projection_idempotent", worst_proj <= 1e-12, worst_proj);
  }

  // Disc measures: central closed form and monotonicity.
  {
    double worst = 0.0;
    bool mono = true;
    for (int k = 1; k <= 3; ++k) {
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
          double rho = 0.5 * i, radius = 0.25 + 0.5 * j;
          double v = disc_measure(k, rho, radius);
          if (i && v > disc_measure(k, rho - 0.5, radius) + 1e-15) mono = false;
          if (j && v < disc_measure(k, rho, radius - 0.5) - 1e-15) mono = false;
        }
      }
      double y = 0.5, partial = 0.0, term = 1.0;
      for (int j = 0; j < k; ++j) {
        partial += term;
        term *= y / (j + 1);
      }
      double closed = 1.0 - std::exp(-y) * partial;
      worst = std::max(worst, std::abs(disc_measure(k, 0.0, 1.0) - closed));
    }
    record("disc_central_closed_form", worst <= 1e-12, worst);
    record("disc_monotone", mono, 0.0);
  }

  // Short localization paths on a curved fiber.
  {
    std::vector<Component> comps{{{Complex(1.0), {0, 1}}, {Complex(-1.0), {2, 0}}}};
    PolynomialMap f(2, comps, ComplexVec::Zero(2));
    PathBatchOptions po{1.0, 1e-3, 8, c.seed, o.threads};
    auto outcomes = simulate_paths(f, po);
    double worst_res = 0.0, worst_lambda = std::numeric_limits<double>::infinity();
    bool all_done = true;
    for (const auto& oc : outcomes) {
      if (!oc.state) {
        all_done = false;
        continue;
      }
      worst_res = std::max(worst_res, oc.max_post_residual);
      worst_lambda = std::min(worst_lambda, hermitian_eig(oc.state->b).values(0));
    }
    record("paths_finish", all_done, 0.0);
    record("fiber_confinement", worst_res <= kFiberTol, worst_res);
    record("lambda_min_B", worst_lambda >= 1.0 - 1e-8, worst_lambda);
  }

  // Tilt inequality on a few random instances.
  {
    TiltSweepConfig t;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 5; ++i) {
      TiltInstance inst = draw_tilt_instance(t, c.seed, static_cast<std::uint64_t>(i));
      TiltCheck chk = tilt_inequality_check(HermitianMatrix::diagonal(inst.b),
                                            inst.v, inst.radius);
      worst = std::min(worst, chk.lhs - chk.rhs);
    }
    record("tilt_inequality", worst >= -1e-6, worst);
  }

  // Wilson interval sanity.
  {
    Interval ci = confidence_interval(50, 100);
    record("confidence_interval",
           std::abs(ci.stderr_ - 0.05) < 1e-15 && ci.wilson_low < 0.5 &&
               ci.wilson_high > 0.5,
           ci.stderr_);
  }

  ExperimentResult out;
  out.summary = header("selftest", c);
  out.summary["checks"] = std::move(checks);
  out.summary["verdict"] = ok ? "pass" : "fail";
  out.verdict_ok = ok;
  out.files.emplace_back("selftest.json", out.summary.dump(2) + "\n");
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> cmds{
      "localize", "tube", "baseline", "mixture", "centerlaw", "tilt", "selftest"};
  return cmds;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

ExperimentResult run_experiment(const std::string& command,
                                const ExperimentConfig& config,
                                const RunOptions& opts) {
  if (command == "localize") return run_localize(config, opts);
  if (command == "tube") return run_tube(config, opts);
  if (command == "baseline") return run_baseline(config, opts);
  if (command == "mixture") return run_mixture(config, opts);
  if (command == "centerlaw") return run_centerlaw(config, opts);
  if (command == "tilt") return run_tilt(config, opts);
  if (command == "selftest") return run_selftest(config, opts);
  fail(ErrorKind::validation, "unknown command '" + command + "'");
}

}  // namespace eldan
