#pragma once

// Seeded Monte Carlo harness: trial runner, scaling fits and per-round
// diagnostics for stripping near the core threshold.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "kcore/depth.hpp"
#include "kcore/hypergraph.hpp"
#include "kcore/numeric.hpp"
#include "kcore/rng.hpp"
#include "kcore/stripping.hpp"
#include "kcore/thresholds.hpp"

namespace kcore {

enum class CMode { CriticalPlusNDelta, CriticalMinusNDelta, Absolute };
enum class GraphSampler { Direct, APRejection };

struct ExperimentConfig {
  ParamsRK params{3, 2};
  double delta = 0.4;
  std::vector<std::uint64_t> n_grid;
  std::uint32_t trials_per_n = 1;
  std::uint64_t seed = 1;
  CMode c_mode = CMode::CriticalPlusNDelta;
  double c_absolute = 0;
  std::string trials_path;       // empty: not written
  std::string fit_path;
  std::string diagnostics_path;
  std::uint64_t trace_stride = 1;

  GraphSampler sampler = GraphSampler::Direct;
  bool compute_depth = false;     // fill max_R_size from the deepest stratum
  bool record_series = false;     // keep per-round |S_i|
  bool diagnostics = false;
  bool record_wall_time = true;   // false writes wall_ms = 0 for byte-stable output
  std::uint32_t bootstrap_resamples = 200;
  std::uint32_t diagnostic_round_B = 20;
  std::uint32_t threads = 0;      // 0: KCORE_THREADS or hardware concurrency

  // Optional acceptance thresholds, checked by `experiment --assert`.
  std::optional<std::pair<double, double>> accept_exponent_range;
  std::optional<double> accept_ci_covers;

  void validate() const {
    params.validate();
    if (n_grid.empty()) throw DomainError("config: n_grid is empty");
    if (!std::is_sorted(n_grid.begin(), n_grid.end())) throw DomainError("config: n_grid must be sorted");
    if (trials_per_n < 1) throw DomainError("config: trials_per_n must be >= 1");
    if (c_mode != CMode::Absolute && !(delta > 0.0 && delta < 0.5)) throw DomainError("config: delta must lie in (0, 1/2)");
    if (c_mode == CMode::Absolute && !(c_absolute > 0.0)) throw DomainError("config: absolute c must be > 0");
    if (trace_stride < 1) throw DomainError("config: trace_stride must be >= 1");
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    const auto& p = j.at("params");
    c.params = {p.at("r").get<int>(), p.at("k").get<int>()};
    c.delta = j.value("delta", c.delta);
    c.n_grid = j.at("n_grid").get<std::vector<std::uint64_t>>();
    c.trials_per_n = j.value("trials_per_n", c.trials_per_n);
    c.seed = j.value("seed", c.seed);
    const auto& mode = j.at("c_mode");
    if (mode.is_string()) {
      const auto s = mode.get<std::string>();
      if (s == "critical_plus_ndelta")
        c.c_mode = CMode::CriticalPlusNDelta;
      else if (s == "critical_minus_ndelta")
        c.c_mode = CMode::CriticalMinusNDelta;
      else
        throw DomainError("config: unknown c_mode '" + s + "'");
    } else {
      c.c_mode = CMode::Absolute;
      c.c_absolute = mode.at("absolute").get<double>();
    }
    if (j.contains("outputs")) {
      const auto& o = j["outputs"];
      c.trials_path = o.value("trials", "");
      c.fit_path = o.value("fit", "");
      c.diagnostics_path = o.value("diagnostics", "");
    }
    c.trace_stride = j.value("trace_stride", c.trace_stride);
    const auto sampler = j.value("sampler", std::string("direct"));
    if (sampler == "direct")
      c.sampler = GraphSampler::Direct;
    else if (sampler == "ap_rejection")
      c.sampler = GraphSampler::APRejection;
    else
      throw DomainError("config: unknown sampler '" + sampler + "'");
    c.compute_depth = j.value("compute_depth", c.compute_depth);
    c.record_series = j.value("record_series", c.record_series);
    c.diagnostics = j.value("diagnostics", c.diagnostics);
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    c.bootstrap_resamples = j.value("bootstrap_resamples", c.bootstrap_resamples);
    c.diagnostic_round_B = j.value("diagnostic_round_B", c.diagnostic_round_B);
    c.threads = j.value("threads", c.threads);
    if (j.contains("acceptance")) {
      const auto& a = j["acceptance"];
      if (a.contains("exponent_range")) {
        const auto r = a["exponent_range"].get<std::vector<double>>();
        if (r.size() != 2) throw DomainError("config: exponent_range needs two values");
        c.accept_exponent_range = std::make_pair(r[0], r[1]);
      }
      if (a.contains("ci_covers")) c.accept_ci_covers = a["ci_covers"].get<double>();
    }
    c.validate();
    return c;
  }
};

struct TrialRecord {
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  std::uint32_t trial = 0;
  std::uint32_t rounds = 0;
  std::uint64_t tau = 0;
  std::uint64_t core_vertices = 0;
  std::uint64_t core_edges = 0;
  std::uint32_t max_lower_depth = 0;
  std::optional<std::uint64_t> max_R_size;
  double wall_ms = 0;
  std::vector<std::uint64_t> strata_sizes;  // only with record_series

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct ScalingFit {
  double exponent_estimate = 0;  // slope of log(mean s / log n) on log n
  double intercept = 0;
  double r_squared = 0;
  double raw_exponent = 0;       // slope of log(mean s) on log n
  std::uint64_t n_min = 0;
  std::uint64_t n_max = 0;
  double target_exponent = 0;
  double ci_low = 0;             // bootstrap percentile interval (2.5%, 97.5%)
  double ci_high = 0;
  std::uint32_t points = 0;
};

struct DiagnosticRow {
  std::uint64_t n = 0;
  std::uint32_t trial = 0;
  std::uint32_t i = 0;
  std::uint64_t size_Si = 0;
  std::uint64_t size_next = 0;
  double ratio = 0;                   // |S_{i+1}| / |S_i|
  double contraction_normalized = 0;  // (1 - ratio) / max(n^{-delta/2}, sqrt(|S_i|/n))
  double tail_ratio = 0;              // sum_{j>=i} |S_j| / (|S_i| n^{delta/2})
  bool qualifies = false;             // |S_i| >= n^delta log^2 n
  bool accounting_ok = false;
  std::uint32_t max_dminus = 0;
  double log_n = 0;
  double ab_sum = 0;                  // sum over a >= 2 of a b M^{a,b}
  double ab_ratio = 0;                // ab_sum / (|S_i|^2 / n + log^2 n)
  std::uint64_t L_start = 0;
  double zeta_start = 0;              // D/N at t(i)
  std::optional<double> br;           // -1 + (r-1)(k-1) psi(zeta_t(i))
};

struct DiagnosticsReport {
  std::vector<DiagnosticRow> rows;
  bool accounting_ok = true;
  std::optional<double> br_at_B;  // br at t(B)
  std::uint32_t max_dminus = 0;

  double qualifying_fraction_in_band(double lo, double hi) const {
    std::size_t q = 0, in = 0;
    for (const auto& r : rows) {
      if (!r.qualifies) continue;
      ++q;
      in += r.contraction_normalized >= lo && r.contraction_normalized <= hi;
    }
    return q == 0 ? 1.0 : static_cast<double>(in) / static_cast<double>(q);
  }
  std::size_t qualifying_rounds() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.qualifies; }));
  }
};

struct ScalingResult {
  std::vector<TrialRecord> records;  // ordered by (n, trial)
  ScalingFit fit;
  std::optional<ScalingFit> depth_fit;  // fitted on max_R_size, when computed
  std::vector<DiagnosticRow> diagnostics;
};

inline double edge_density(const ExperimentConfig& cfg, const CriticalPoint& crit, std::uint64_t n) {
  switch (cfg.c_mode) {
    case CMode::CriticalPlusNDelta: return crit.c_rk + std::pow(static_cast<double>(n), -cfg.delta);
    case CMode::CriticalMinusNDelta: return crit.c_rk - std::pow(static_cast<double>(n), -cfg.delta);
    case CMode::Absolute: return cfg.c_absolute;
  }
  return cfg.c_absolute;
}

inline std::uint64_t edge_count(double c, std::uint64_t n) {
  return static_cast<std::uint64_t>(std::floor(c * static_cast<double>(n) + 0.5));
}

inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t trial) {
  return derive_seed(seed, {n, trial});
}

inline SimpleHypergraph sample_graph(GraphSampler sampler, std::uint64_t n, std::uint64_t m, std::uint32_t r,
                                     std::uint64_t seed) {
  if (sampler == GraphSampler::APRejection)
    return sample_simple_via_ap(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m), r, seed).first;
  return sample_simple(static_cast<std::uint32_t>(n), m, r, seed);
}

// Per-round diagnostics of one run at c = c_rk + n^{-delta}.
inline DiagnosticsReport lsi_diagnostics(const StripTrace& trace, const std::vector<RoundStats>& stats,
                                         const CriticalPoint& crit, double delta, std::uint64_t n,
                                         std::uint32_t B = 20) {
  DiagnosticsReport rep;
  const double nd = static_cast<double>(n);
  const double log_n = std::log(nd);
  const double qualify = std::pow(nd, delta) * log_n * log_n;
  const double r = crit.params.r;
  const double k = crit.params.k;
  const auto accounting = audit_round_stats(stats, crit.params.r);
  rep.accounting_ok = accounting.empty();

  std::vector<std::uint64_t> tail(stats.size() + 1, 0);
  for (std::size_t i = stats.size(); i-- > 0;) tail[i] = tail[i + 1] + stats[i].d_plus.size();

  const auto br_of = [&](double zeta) -> std::optional<double> {
    if (!(zeta >= k)) return std::nullopt;
    // All heavy vertices at degree exactly k: every heavy copy sits in a degree-k bin.
    const double p = zeta == k ? 1.0 : psi(crit.params.k, zeta);
    return -1.0 + (r - 1.0) * (k - 1.0) * p;
  };

  for (std::size_t idx = 0; idx < stats.size(); ++idx) {
    const RoundStats& rs = stats[idx];
    DiagnosticRow row;
    row.n = n;
    row.i = rs.round;
    row.log_n = log_n;
    row.size_Si = rs.d_plus.size();
    row.size_next = idx + 1 < stats.size() ? stats[idx + 1].d_plus.size() : 0;
    const double s = static_cast<double>(row.size_Si);
    row.ratio = s > 0 ? static_cast<double>(row.size_next) / s : 0.0;
    row.contraction_normalized = (1.0 - row.ratio) / std::max(std::pow(nd, -delta / 2.0), std::sqrt(s / nd));
    row.tail_ratio = s > 0 ? static_cast<double>(tail[idx]) / (s * std::pow(nd, delta / 2.0)) : 0.0;
    row.qualifies = s >= qualify;
    row.accounting_ok = audit_round_stats({rs}, crit.params.r).empty();
    for (const auto& [u, d] : rs.d_minus) row.max_dminus = std::max(row.max_dminus, d);
    rep.max_dminus = std::max(rep.max_dminus, row.max_dminus);
    double ab = 0;
    for (const auto& [key, count] : rs.M)
      if (key.first >= 2) ab += double(key.first) * key.second * static_cast<double>(count);
    row.ab_sum = ab;
    row.ab_ratio = ab / (s * s / nd + log_n * log_n);
    if (idx < trace.round_starts.size()) {
      const StepRecord& st = trace.round_starts[idx];
      row.L_start = st.L;
      row.zeta_start = st.zeta();
      row.br = br_of(row.zeta_start);
    }
    rep.rows.push_back(row);
  }
  if (B >= 1 && B <= trace.round_starts.size()) rep.br_at_B = br_of(trace.round_starts[B - 1].zeta());
  return rep;
}

struct TrialOutput {
  TrialRecord record;
  std::vector<DiagnosticRow> diagnostics;
};

inline TrialOutput run_trial_full(const ExperimentConfig& cfg, const CriticalPoint& crit, std::uint64_t n,
                                  std::uint32_t trial_index) {
  const auto start = std::chrono::steady_clock::now();
  TrialOutput out;
  TrialRecord& rec = out.record;
  rec.n = n;
  rec.trial = trial_index;
  rec.seed = trial_seed(cfg.seed, n, trial_index);
  rec.m = edge_count(edge_density(cfg, crit, n), n);

  const auto r = static_cast<std::uint32_t>(cfg.params.r);
  const SimpleHypergraph g = sample_graph(cfg.sampler, n, rec.m, r, rec.seed);
  SlowStripOptions opt;
  opt.stride = cfg.trace_stride;
  opt.record_steps = false;
  const StripTrace trace = slow_strip(g, cfg.params.k, derive_seed(rec.seed, {1}), opt);
  rec.rounds = trace.rounds;
  rec.tau = trace.tau;
  rec.core_vertices = trace.core.vertices.size();
  rec.core_edges = trace.core.edges.size();
  rec.max_lower_depth = trace.rounds;
  if (cfg.record_series)
    for (const auto& s : trace.strata) rec.strata_sizes.push_back(s.size());

  if (cfg.compute_depth || cfg.diagnostics) {
    const Stratification st = parallel_strip(g, cfg.params.k);
    if (cfg.compute_depth && st.rounds > 0) {
      CertificateBuilder builder(g.graph(), st);
      std::uint64_t best = 0;
      for (Vertex v : st.strata.back()) best = std::max(best, builder.build(v).upper_bound);
      rec.max_R_size = best;
    } else if (cfg.compute_depth) {
      rec.max_R_size = 0;
    }
    if (cfg.diagnostics) {
      const auto stats = round_stats(g.graph(), st);
      auto rep = lsi_diagnostics(trace, stats, crit, cfg.delta, n, cfg.diagnostic_round_B);
      for (auto& row : rep.rows) row.trial = trial_index;
      out.diagnostics = std::move(rep.rows);
    }
  }
  if (cfg.record_wall_time)
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

inline TrialRecord run_trial(const ExperimentConfig& cfg, std::uint64_t n, std::uint32_t trial_index) {
  return run_trial_full(cfg, solve_critical(cfg.params), n, trial_index).record;
}

inline unsigned worker_count(std::uint32_t requested, std::size_t cells) {
  unsigned t = requested;
  if (t == 0) {
    if (const char* env = std::getenv("KCORE_THREADS")) t = static_cast<unsigned>(std::max(1L, std::strtol(env, nullptr, 10)));
  }
  if (t == 0) t = std::max(1U, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(cells, 1)));
}

// Runs `task(i)` for i in [0, count) on a pool; results land at index i.
template <class Task>
auto parallel_map(std::size_t count, unsigned threads, Task task) {
  using Result = decltype(task(std::size_t{0}));
  std::vector<Result> results(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    for (std::size_t i; !failed && (i = next.fetch_add(1)) < count;) {
      try {
        results[i] = task(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return results;
}

namespace detail {

struct LineFit {
  double slope = 0, intercept = 0, r_squared = 0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double nn = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nn;
  my /= nn;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

inline double percentile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

}  // namespace detail

// Fits log(mean(value) / log n) against log n over the grid; `value` picks
// the per-trial quantity. Bootstrap resamples trials within each n.
template <class Value>
ScalingFit fit_scaling(const std::vector<TrialRecord>& records, Value value, double target, std::uint32_t resamples,
                       std::uint64_t seed) {
  std::vector<std::uint64_t> ns;
  for (const auto& r : records)
    if (ns.empty() || ns.back() != r.n) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.size() < 4) throw DomainError("fit_scaling: need at least 4 grid points");
  if (std::log10(double(ns.back()) / double(ns.front())) < 1.5 - 1e-9)
    throw DomainError("fit_scaling: n grid must span at least 1.5 decades");

  std::vector<std::vector<double>> groups(ns.size());
  for (const auto& r : records) {
    const auto at = std::lower_bound(ns.begin(), ns.end(), r.n) - ns.begin();
    groups[static_cast<std::size_t>(at)].push_back(value(r));
  }
  const auto fit_means = [&](const std::vector<double>& means) {
    std::vector<double> x, y, yr;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double ln = std::log(double(ns[i]));
      x.push_back(ln);
      y.push_back(std::log(means[i] / ln));
      yr.push_back(std::log(means[i]));
    }
    return std::make_pair(detail::least_squares(x, y), detail::least_squares(x, yr));
  };
  std::vector<double> means(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    double s = 0;
    for (double v : groups[i]) s += v;
    means[i] = s / static_cast<double>(groups[i].size());
  }
  const auto [main_fit, raw_fit] = fit_means(means);

  ScalingFit fit;
  fit.exponent_estimate = main_fit.slope;
  fit.intercept = main_fit.intercept;
  fit.r_squared = main_fit.r_squared;
  fit.raw_exponent = raw_fit.slope;
  fit.n_min = ns.front();
  fit.n_max = ns.back();
  fit.target_exponent = target;
  fit.points = static_cast<std::uint32_t>(ns.size());

  Rng rng = Rng::stream(seed, {0x424F4F54 /* "BOOT" */});
  std::vector<double> slopes;
  for (std::uint32_t b = 0; b < resamples; ++b) {
    std::vector<double> bm(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
      double s = 0;
      for (std::size_t j = 0; j < groups[i].size(); ++j) s += groups[i][rng.below(groups[i].size())];
      bm[i] = s / static_cast<double>(groups[i].size());
    }
    slopes.push_back(fit_means(bm).first.slope);
  }
  if (!slopes.empty()) {
    fit.ci_low = detail::percentile(slopes, 0.025);
    fit.ci_high = detail::percentile(slopes, 0.975);
  } else {
    fit.ci_low = fit.ci_high = fit.exponent_estimate;
  }
  return fit;
}

inline ScalingResult run_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  const CriticalPoint crit = solve_critical(cfg.params);
  struct Cell {
    std::uint64_t n;
    std::uint32_t trial;
  };
  std::vector<Cell> cells;
  for (auto n : cfg.n_grid)
    for (std::uint32_t t = 0; t < cfg.trials_per_n; ++t) cells.push_back({n, t});

  auto outputs = parallel_map(cells.size(), worker_count(cfg.threads, cells.size()),
                              [&](std::size_t i) { return run_trial_full(cfg, crit, cells[i].n, cells[i].trial); });

  ScalingResult res;
  for (auto& o : outputs) {
    res.records.push_back(std::move(o.record));
    res.diagnostics.insert(res.diagnostics.end(), o.diagnostics.begin(), o.diagnostics.end());
  }
  const double target = cfg.c_mode == CMode::Absolute ? 0.0 : cfg.delta / 2.0;
  res.fit = fit_scaling(
      res.records, [](const TrialRecord& r) { return static_cast<double>(r.rounds); }, target, cfg.bootstrap_resamples,
      cfg.seed);
  if (cfg.compute_depth) {
    res.depth_fit = fit_scaling(
        res.records, [](const TrialRecord& r) { return static_cast<double>(r.max_R_size.value_or(0)); }, target,
        cfg.bootstrap_resamples, derive_seed(cfg.seed, {2}));
  }
  return res;
}

// ---- emission -------------------------------------------------------------

inline constexpr const char* kTrialsHeader = "n,m,seed,trial,rounds,tau,core_v,core_e,max_lower_depth,wall_ms";

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << kTrialsHeader << '\n';
  for (const auto& r : records) {
    std::ostringstream ms;
    ms.setf(std::ios::fixed);
    ms.precision(3);
    ms << r.wall_ms;
    out << r.n << ',' << r.m << ',' << r.seed << ',' << r.trial << ',' << r.rounds << ',' << r.tau << ','
        << r.core_vertices << ',' << r.core_edges << ',' << r.max_lower_depth << ',' << ms.str() << '\n';
  }
}

// Schema check for trials.csv; returns one message per bad row.
inline std::vector<std::string> validate_trials_csv(std::istream& in) {
  std::vector<std::string> errors;
  std::string line;
  if (!std::getline(in, line) || line != kTrialsHeader) {
    errors.push_back("bad header");
    return errors;
  }
  for (std::size_t row = 1; std::getline(in, line); ++row) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
    const auto bad = [&](const std::string& why) { errors.push_back("row " + std::to_string(row) + ": " + why); };
    if (cols.size() != 10) {
      bad("expected 10 columns");
      continue;
    }
    std::vector<unsigned long long> ints;
    bool ok = true;
    for (std::size_t i = 0; i < 9 && ok; ++i) {
      if (cols[i].empty() || cols[i].find_first_not_of("0123456789") != std::string::npos) {
        bad("column " + std::to_string(i) + " not a non-negative integer");
        ok = false;
      } else {
        ints.push_back(std::stoull(cols[i]));
      }
    }
    if (!ok) continue;
    char* end = nullptr;
    const double wall = std::strtod(cols[9].c_str(), &end);
    if (end == cols[9].c_str() || *end != '\0' || wall < 0) bad("wall_ms not a non-negative real");
    if (ints[6] > ints[0]) bad("core_v > n");
    if (ints[7] > ints[1]) bad("core_e > m");
    if (ints[5] > ints[1]) bad("tau > m");
    if (ints[5] + ints[7] != ints[1]) bad("tau + core_e != m");
  }
  return errors;
}

inline nlohmann::json to_json(const ScalingFit& f) {
  return {{"exponent_estimate", f.exponent_estimate},
          {"intercept", f.intercept},
          {"r_squared", f.r_squared},
          {"raw_exponent", f.raw_exponent},
          {"n_range", {f.n_min, f.n_max}},
          {"target_exponent", f.target_exponent},
          {"ci_low", f.ci_low},
          {"ci_high", f.ci_high},
          {"points", f.points}};
}

inline nlohmann::json to_json(const DiagnosticRow& r) {
  nlohmann::json j = {{"n", r.n},
                      {"trial", r.trial},
                      {"i", r.i},
                      {"size_Si", r.size_Si},
                      {"size_next", r.size_next},
                      {"ratio", r.ratio},
                      {"contraction_normalized", r.contraction_normalized},
                      {"tail_ratio", r.tail_ratio},
                      {"qualifies", r.qualifies},
                      {"accounting_ok", r.accounting_ok},
                      {"max_dminus", r.max_dminus},
                      {"log_n", r.log_n},
                      {"ab_sum", r.ab_sum},
                      {"ab_ratio", r.ab_ratio},
                      {"L_start", r.L_start},
                      {"zeta_start", r.zeta_start}};
  j["br"] = r.br ? nlohmann::json(*r.br) : nlohmann::json(nullptr);
  return j;
}

// Checks configured acceptance thresholds; returns the failures.
inline std::vector<std::string> check_acceptance(const ExperimentConfig& cfg, const ScalingFit& fit) {
  std::vector<std::string> fails;
  if (cfg.accept_exponent_range) {
    const auto [lo, hi] = *cfg.accept_exponent_range;
    if (!(fit.exponent_estimate >= lo && fit.exponent_estimate <= hi))
      fails.push_back("exponent " + std::to_string(fit.exponent_estimate) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  if (cfg.accept_ci_covers) {
    const double x = *cfg.accept_ci_covers;
    if (!(fit.ci_low <= x && x <= fit.ci_high))
      fails.push_back("bootstrap CI [" + std::to_string(fit.ci_low) + ", " + std::to_string(fit.ci_high) +
                      "] does not cover " + std::to_string(x));
  }
  return fails;
}

inline void write_outputs(const ExperimentConfig& cfg, const ScalingResult& res) {
  const auto open = [](const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
  };
  if (!cfg.trials_path.empty()) {
    auto f = open(cfg.trials_path);
    write_trials_csv(f, res.records);
  }
  if (!cfg.fit_path.empty()) {
    auto f = open(cfg.fit_path);
    nlohmann::json j = to_json(res.fit);
    if (res.depth_fit) j["depth_fit"] = to_json(*res.depth_fit);
    f << j.dump(2) << '\n';
  }
  if (!cfg.diagnostics_path.empty()) {
    auto f = open(cfg.diagnostics_path);
    for (const auto& row : res.diagnostics) f << to_json(row).dump() << '\n';
  }
}

}  // namespace kcore
