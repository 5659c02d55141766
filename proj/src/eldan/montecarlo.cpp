// Copyright 2026 The eldan authors.
// SPDX-License-Identifier: Apache-2.0

#include "eldan/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "eldan/error.hpp"
#include "eldan/rng.hpp"

namespace eldan {

void parallel_for(std::int64_t count, int threads,
                  const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  std::int64_t workers = threads > 0 ? threads : static_cast<int>(hw);
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      if (stop.load(std::memory_order_relaxed)) return;
      std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
        stop = true;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::int64_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

Interval confidence_interval(std::int64_t hits, std::int64_t n) {
  if (n < 1) fail(ErrorKind::validation, "sample count must be >= 1");
  if (hits < 0 || hits > n)
    fail(ErrorKind::validation, "hits must lie in [0, N]");
  constexpr double z = 3.0;
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(hits) / nn;
  const double se = std::sqrt(p * (1.0 - p) / nn);
  const double denom = 1.0 + z * z / nn;
  const double mid = (p + z * z / (2.0 * nn)) / denom;
  const double half =
      z / denom * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn));
  double lo = hits == 0 ? 0.0 : std::max(0.0, mid - half);
  double hi = hits == n ? 1.0 : std::min(1.0, mid + half);
  return {p, se, lo, hi};
}

std::string NormTag::label() const {
  if (euclidean()) return "euclidean";
  std::ostringstream os;
  os.precision(17);
  os << "circled(";
  for (std::size_t j = 0; j < weights.size(); ++j)
    os << (j ? "," : "") << weights[j];
  os << ")";
  return os.str();
}

namespace {

bool recoverable(const Error& e) {
  return e.kind() == ErrorKind::projection ||
         e.kind() == ErrorKind::singularity;
}

struct HitOutcome {
  double best = std::numeric_limits<double>::infinity();
  bool failed = true;  // no start produced a fiber point
};

// Closest fiber point to u over the sample itself and `perturbations`
// Gaussian perturbations of it. Exploration stops once a point within
// `r_min` is known, since every radius of the grid is then a hit.
HitOutcome hit_test(const PolynomialMap& g, const ComplexVec& u, double r_min,
                    int perturbations, CounterRng& rng) {
  HitOutcome out;
  ClosestPointOptions opts;
  opts.stop_within = r_min;
  // Hit decisions only compare distances with the grid radii.
  opts.opt_tol = 1e-7;

  // The perturbation scale is the distance to the first projection, so it
  // does not depend on the radius grid.
  double scale = 1.0;
  std::optional<ComplexVec> first;
  try {
    FiberPoint fp = project_to_fiber(g, u);
    scale = std::max((fp.point - u).norm(), 1e-3);
    first = std::move(fp.point);
  } catch (const Error& e) {
    if (!recoverable(e)) throw;
  }
  const int n = g.n();
  const double per_coord = scale / std::sqrt(2.0 * n);

  for (int s = 0; s <= perturbations; ++s) {
    ComplexVec start;
    if (s == 0) {
      if (!first) continue;
      start = *first;
    } else {
      start = u + per_coord * standard_complex_gaussian(rng, n);
    }
    try {
      auto res = closest_point(g, u, start, opts);
      out.failed = false;
      out.best = std::min(out.best, res.distance);
    } catch (const Error& e) {
      if (!recoverable(e)) throw;
    }
    if (out.best <= r_min) break;
  }
  return out;
}

}  // namespace

TubeSweep estimate_tube_sweep(const PolynomialMap& f,
                              std::span<const double> r_grid,
                              const TubeOptions& opts) {
  if (opts.samples < 1) fail(ErrorKind::validation, "N must be >= 1");
  if (r_grid.empty()) fail(ErrorKind::validation, "radius grid is empty");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] >= 0.0) || !std::isfinite(r_grid[i]))
      fail(ErrorKind::validation, "radii must be finite and >= 0");
    if (i && !(r_grid[i] > r_grid[i - 1]))
      fail(ErrorKind::validation, "radius grid must be strictly increasing");
  }
  if (opts.perturbations < 0)
    fail(ErrorKind::validation, "perturbation count must be >= 0");

  const int n = f.n();
  std::vector<double> w = opts.norm.weights;
  if (!w.empty()) {
    if (static_cast<int>(w.size()) != n)
      fail(ErrorKind::validation, "norm weights must have length n");
    validate(CircledNormSpec{w});
  }
  // |W(x - z)| for f equals the Euclidean distance for f o W^{-1} at W z.
  const PolynomialMap g = w.empty() ? f : f.with_coordinate_scaling(w);
  RealVec wv = RealVec::Ones(n);
  for (int j = 0; j < static_cast<int>(w.size()); ++j) wv(j) = w[static_cast<std::size_t>(j)];

  const double r_min = r_grid.front();
  std::vector<double> best(static_cast<std::size_t>(opts.samples));
  std::vector<char> failed(static_cast<std::size_t>(opts.samples));
  parallel_for(opts.samples, opts.threads, [&](std::int64_t i) {
    CounterRng rng(StreamId::of(opts.seed, StreamPurpose::tube_sample,
                                static_cast<std::uint64_t>(i)));
    ComplexVec z = standard_complex_gaussian(rng, n);
    ComplexVec u = wv.cast<Complex>().cwiseProduct(z);
    HitOutcome h = hit_test(g, u, r_min, opts.perturbations, rng);
    best[static_cast<std::size_t>(i)] = h.best;
    failed[static_cast<std::size_t>(i)] = h.failed;
  });

  TubeSweep out;
  for (char c : failed) out.optimizer_failures += c ? 1 : 0;
  for (double r : r_grid) {
    std::int64_t hits = 0;
    // r = 0: the fiber is Lebesgue-null, so no sample counts.
    if (r > 0.0)
      for (double d : best) hits += d <= r ? 1 : 0;
    Interval ci = confidence_interval(hits, opts.samples);
    out.rows.push_back({r, ci.p_hat, ci.stderr_, opts.samples, hits, opts.norm});
  }
  return out;
}

TubeEstimate estimate_tube_measure(const PolynomialMap& f, double r,
                                   const TubeOptions& opts) {
  const double grid[] = {r};
  return estimate_tube_sweep(f, grid, opts).rows.front();
}

bool WaistTable::pass() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const WaistRow& r) { return r.pass; });
}

WaistTable waist_check(const PolynomialMap& f, std::span<const double> r_grid,
                       double distance, const TubeOptions& opts) {
  if (!(distance >= 0.0) || !std::isfinite(distance))
    fail(ErrorKind::validation, "distance must be finite and >= 0");
  TubeSweep sweep = estimate_tube_sweep(f, r_grid, opts);
  WaistTable table;
  table.optimizer_failures = sweep.optimizer_failures;
  for (const auto& e : sweep.rows) {
    double base = affine_tube_measure(f.n(), f.k(), distance, e.r);
    double margin = e.p_hat - base;
    table.rows.push_back(
        {e.r, e.p_hat, e.stderr_, base, margin, margin >= -3.0 * e.stderr_});
  }
  return table;
}

std::vector<PathOutcome> simulate_paths(const PolynomialMap& f,
                                        const PathBatchOptions& opts) {
  if (opts.paths < 1) fail(ErrorKind::validation, "path count must be >= 1");
  step_count(opts.horizon, opts.h);  // validates T and h
  PathOptions po{opts.horizon, opts.h, std::numeric_limits<int>::max()};
  std::vector<PathOutcome> out(static_cast<std::size_t>(opts.paths));
  parallel_for(opts.paths, opts.threads, [&](std::int64_t i) {
    auto stream = StreamId::of(opts.seed, StreamPurpose::path,
                               static_cast<std::uint64_t>(i));
    PathOutcome& o = out[static_cast<std::size_t>(i)];
    try {
      PathResult r = run_path(f, po, stream);
      o.max_post_residual = f.eval(r.state.a).norm();
      o.state = std::move(r.state);
    } catch (const PathAbort& e) {
      o.abort_reason = e.what();
    }
  });
  return out;
}

Moment sample_moment(std::span<const double> xs) {
  const auto m = static_cast<double>(xs.size());
  if (xs.empty()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / m;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (m - 1.0) / m)};
}

namespace {

MixtureRow mixture_row(std::string tag, std::span<const double> values,
                       double reference) {
  Moment m = sample_moment(values);
  double diff = m.mean - reference;
  double z;
  if (m.stderr_ > 0.0)
    z = diff / m.stderr_;
  else
    z = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(reference))
            ? 0.0
            : std::copysign(std::numeric_limits<double>::max(), diff);
  return {std::move(tag), m.mean, reference, m.stderr_, z};
}

}  // namespace

MixtureReport mixture_report(std::span<const PathOutcome> outcomes,
                             std::span<const TestFunctional> functionals,
                             std::span<const ComplexVec> density_points,
                             double horizon, double h) {
  MixtureReport rep;
  rep.horizon = horizon;
  rep.h = h;
  std::vector<const LocalizationState*> done;
  for (const auto& o : outcomes) {
    if (o.state)
      done.push_back(&*o.state);
    else
      ++rep.aborted;
  }
  rep.n_paths = static_cast<std::int64_t>(done.size());
  if (done.size() < 2)
    fail(ErrorKind::state, "mixture report needs at least two finished paths");
  const int n = static_cast<int>(done.front()->a.size());
  const ComplexGaussian reference = ComplexGaussian::standard(n);

  // The untruncated covariance keeps the identity exact at finite T.
  std::vector<ComplexGaussian> terminal;
  terminal.reserve(done.size());
  for (const auto* s : done) terminal.push_back(terminal_gaussian(*s, 0.0));

  std::vector<double> vals(done.size());
  for (const auto& phi : functionals) {
    for (std::size_t i = 0; i < done.size(); ++i)
      vals[i] = gaussian_expectation(terminal[i], phi);
    rep.rows.push_back(mixture_row(functional_tag(phi), vals,
                                   gaussian_expectation(reference, phi)));
  }
  for (std::size_t p = 0; p < density_points.size(); ++p) {
    const ComplexVec& z = density_points[p];
    if (z.size() != n)
      fail(ErrorKind::validation, "density point has wrong dimension");
    for (std::size_t i = 0; i < done.size(); ++i)
      vals[i] = std::exp(-done[i]->potential()(z));
    rep.rows.push_back(mixture_row("density[" + std::to_string(p) + "]", vals,
                                   std::exp(-0.5 * z.squaredNorm())));
  }
  return rep;
}

namespace {

void require_origin_base(const PolynomialMap& f) {
  if (f.base_point().norm() > 1e-12)
    fail(ErrorKind::validation,
         "this experiment needs f(0) = 0 with the base point at the origin",
         "/map/base_point");
}

}  // namespace

MixtureReport mixture_check(const PolynomialMap& f,
                            const PathBatchOptions& opts,
                            std::span<const TestFunctional> functionals,
                            std::span<const ComplexVec> density_points) {
  require_origin_base(f);
  auto outcomes = simulate_paths(f, opts);
  return mixture_report(outcomes, functionals, density_points, opts.horizon,
                        opts.h);
}

CenterLaw center_law_from(const PolynomialMap& f,
                          std::span<const PathOutcome> outcomes) {
  CenterLaw law;
  for (const auto& o : outcomes) {
    if (!o.state) {
      ++law.aborted;
      continue;
    }
    law.samples.push_back(o.state->a);
    law.max_fiber_residual = std::max(law.max_fiber_residual, o.max_post_residual);
  }
  if (law.samples.size() < 2)
    fail(ErrorKind::state, "center law needs at least two finished paths");
  if (law.max_fiber_residual > kFiberTol) {
    std::ostringstream msg;
    msg << "terminal center off the fiber: " << law.max_fiber_residual;
    fail(ErrorKind::invariant, msg.str());
  }
  const std::size_t m = law.samples.size();
  std::vector<double> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = law.samples[i].squaredNorm();
  law.squared_norm = sample_moment(v);
  for (int j = 0; j < f.n(); ++j) {
    auto coord = [&](auto fn) {
      for (std::size_t i = 0; i < m; ++i) v[i] = fn(law.samples[i](j));
      return sample_moment(v);
    };
    law.re_mean.push_back(coord([](Complex c) { return c.real(); }));
    law.im_mean.push_back(coord([](Complex c) { return c.imag(); }));
    law.abs2.push_back(coord([](Complex c) { return std::norm(c); }));
    law.re_square.push_back(coord([](Complex c) { return (c * c).real(); }));
    law.im_square.push_back(coord([](Complex c) { return (c * c).imag(); }));
  }
  return law;
}

CenterLaw center_law_sample(const PolynomialMap& f,
                            const PathBatchOptions& opts) {
  require_origin_base(f);
  auto outcomes = simulate_paths(f, opts);
  return center_law_from(f, outcomes);
}

}  // namespace eldan
