// kcore: thresholds, sampling, stripping, depth certificates and experiments.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "kcore/kcore.hpp"

using namespace kcore;
using nlohmann::json;

namespace {

json to_json(const ParamsRK& p) { return {{"r", p.r}, {"k", p.k}}; }

json to_json(const CriticalPoint& c) {
  return {{"params", to_json(c.params)}, {"mu_rk", c.mu_rk},   {"c_rk", c.c_rk},         {"alpha", c.alpha},
          {"beta", c.beta},              {"zeta", c.zeta},     {"p_star", c.p_star},     {"rho_bar", c.rho_bar},
          {"k1", c.k1},                  {"k2_approx", c.k2_approx}, {"k3_approx", c.k3_approx}};
}

json to_json(const SupercriticalPoint& s) {
  return {{"params", to_json(s.params)}, {"c", s.c}, {"mu_c", s.mu_c}, {"alpha_c", s.alpha_c}, {"beta_c", s.beta_c}};
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return f;
}

struct GraphSource {
  std::string in;
  std::string format = "hypergraph";
  std::string model;
  std::uint32_t n = 0, r = 3;
  std::uint64_t m = 0, seed = 1;

  void add_options(CLI::App* cmd, bool allow_sample) {
    auto* in_opt = cmd->add_option("--in", in, "Input file");
    cmd->add_option("--format", format, "Input format")->check(CLI::IsMember({"hypergraph", "configuration"}));
    if (!allow_sample) {
      in_opt->required();
      return;
    }
    auto* s = cmd->add_option("--sample", model, "Sample a graph instead of reading one")
                  ->check(CLI::IsMember({"simple", "ap"}));
    in_opt->excludes(s);
    cmd->add_option("--n", n, "Vertices (with --sample)");
    cmd->add_option("--m", m, "Edges (with --sample)");
    cmd->add_option("--r", r, "Edge arity (with --sample)");
    cmd->add_option("--sample-seed", seed, "Sampler seed (with --sample)");
  }

  Hypergraph load() const {
    if (!model.empty()) {
      if (model == "simple") return sample_simple(n, m, r, seed).graph();
      return sample_ap(n, static_cast<std::uint32_t>(m), r, seed).contract();
    }
    if (in.empty()) throw std::runtime_error("one of --in or --sample is required");
    auto f = open_in(in);
    if (format == "configuration") return io::read_configuration(f).contract();
    return io::read_hypergraph(f);
  }
};

int cmd_thresholds(int r, int k, std::optional<double> c, std::optional<double> avg_degree, bool as_json) {
  const ParamsRK p{r, k};
  const auto cp = solve_critical(p);
  if (avg_degree) c = *avg_degree / r;
  json out = to_json(cp);
  if (c) out["supercritical"] = to_json(solve_supercritical(cp, *c));
  if (as_json) {
    std::cout << out.dump(2) << '\n';
    return 0;
  }
  std::cout.precision(12);
  std::cout << "r=" << r << " k=" << k << "\n"
            << "  mu_rk   " << cp.mu_rk << "\n  c_rk    " << cp.c_rk << "\n  alpha   " << cp.alpha << "\n  beta    "
            << cp.beta << "\n  zeta    " << cp.zeta << "\n  p_star  " << cp.p_star << "\n  rho_bar " << cp.rho_bar
            << "\n  k1      " << cp.k1 << "\n";
  if (c) {
    const auto sp = solve_supercritical(cp, *c);
    std::cout << "c=" << sp.c << "\n  mu_c    " << sp.mu_c << "\n  alpha_c " << sp.alpha_c << "\n  beta_c  " << sp.beta_c
              << "\n";
  }
  return 0;
}

int cmd_sample(const std::string& model, std::uint32_t n, std::uint64_t m, std::uint32_t r, std::uint64_t seed,
               const std::string& out) {
  auto f = open_out(out);
  if (model == "simple")
    io::write_hypergraph(f, sample_simple(n, m, r, seed).graph());
  else
    io::write_configuration(f, sample_ap(n, static_cast<std::uint32_t>(m), r, seed));
  return 0;
}

int cmd_strip(const GraphSource& src, int k, const std::string& engine, std::uint64_t seed, const std::string& trace_out,
              std::uint64_t stride) {
  const Hypergraph g = src.load();
  const Stratification st = parallel_strip(g, k);
  json summary = {{"n", g.n}, {"m", g.m()}, {"r", g.r}, {"k", k}, {"engine", engine}};
  std::optional<StripTrace> trace;
  if (engine == "slow") {
    SlowStripOptions opt;
    opt.stride = stride;
    opt.record_steps = !trace_out.empty();
    trace = slow_strip(g, k, seed, opt);
    summary["seed"] = seed;
    summary["tau"] = trace->tau;
  }
  summary["rounds"] = st.rounds;
  summary["core_v"] = st.core.vertices.size();
  summary["core_e"] = st.core.edges.size();
  if (!trace_out.empty()) {
    const auto stats = round_stats(g, st);
    auto f = open_out(trace_out);
    json header = summary;
    header["trace_stride"] = stride;
    io::write_trace_jsonl(f, header, trace ? &*trace : nullptr, stats);
  }
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_depth(const GraphSource& src, int k, std::optional<std::uint32_t> vertex, bool exact, bool as_json) {
  const Hypergraph g = src.load();
  const Stratification st = parallel_strip(g, k);
  CertificateBuilder builder(g, st);
  std::vector<Vertex> targets;
  if (vertex) {
    targets.push_back(*vertex);
  } else {
    for (Vertex v = 0; v < g.n; ++v)
      if (st.level[v] != 0) targets.push_back(v);
  }
  int status = 0;
  for (Vertex v : targets) {
    const auto cert = builder.build(v);
    const auto check = builder.validate(cert);
    json row = {{"v", v},
                {"level", cert.level},
                {"R_size", cert.union_R.size()},
                {"lower", cert.lower_bound},
                {"upper", cert.upper_bound},
                {"sequence_valid", check.ok}};
    if (!check.ok) status = 1;
    if (exact) {
      try {
        row["exact"] = exact_depth(g, k, v);
      } catch (const BudgetExceeded&) {
        row["exact"] = nullptr;
      }
    }
    if (as_json) {
      std::cout << row.dump() << '\n';
    } else {
      std::cout << "v=" << v << " level=" << cert.level << " |R|=" << cert.union_R.size();
      if (exact) std::cout << " exact=" << (row["exact"].is_null() ? std::string("budget") : row["exact"].dump());
      std::cout << (check.ok ? "" : " INVALID-SEQUENCE") << '\n';
    }
  }
  return status;
}

int cmd_experiment(const std::string& config_path, bool assert_thresholds) {
  auto f = open_in(config_path);
  const auto cfg = ExperimentConfig::from_json(json::parse(f));
  const auto res = run_scaling(cfg);
  write_outputs(cfg, res);
  json fit = kcore::to_json(res.fit);
  if (res.depth_fit) fit["depth_fit"] = kcore::to_json(*res.depth_fit);
  std::cout << fit.dump(2) << '\n';
  if (assert_thresholds) {
    const auto fails = check_acceptance(cfg, res.fit);
    for (const auto& msg : fails) std::cerr << "acceptance: " << msg << '\n';
    if (!fails.empty()) return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-core stripping on random hypergraphs"};
  app.require_subcommand(1);

  int th_r = 0, th_k = 0;
  std::optional<double> th_c, th_avg;
  bool th_json = false;
  auto* th = app.add_subcommand("thresholds", "Solve the critical and supercritical systems");
  th->add_option("--r", th_r, "Edge arity")->required();
  th->add_option("--k", th_k, "Core threshold")->required();
  auto* c_opt = th->add_option("--c", th_c, "Edge density m/n for the supercritical point");
  th->add_option("--avg-degree", th_avg, "Average degree r*c instead of --c")->excludes(c_opt);
  th->add_flag("--json", th_json, "Print one JSON object");

  std::string sa_model = "simple", sa_out;
  std::uint32_t sa_n = 0, sa_r = 3;
  std::uint64_t sa_m = 0, sa_seed = 1;
  auto* sa = app.add_subcommand("sample", "Sample a hypergraph or configuration");
  sa->add_option("--model", sa_model, "Model")->check(CLI::IsMember({"simple", "ap"}));
  sa->add_option("--n", sa_n, "Vertices")->required();
  sa->add_option("--m", sa_m, "Edges")->required();
  sa->add_option("--r", sa_r, "Edge arity");
  sa->add_option("--seed", sa_seed, "Seed");
  sa->add_option("--out", sa_out, "Output path")->required();

  GraphSource st_src;
  int st_k = 2;
  std::string st_engine = "parallel", st_trace;
  std::uint64_t st_seed = 1, st_stride = 1;
  auto* stc = app.add_subcommand("strip", "Run parallel stripping or SLOW-STRIP");
  st_src.add_options(stc, true);
  stc->add_option("--k", st_k, "Core threshold")->required();
  stc->add_option("--engine", st_engine, "Engine")->check(CLI::IsMember({"parallel", "slow"}));
  stc->add_option("--seed", st_seed, "SLOW-STRIP seed");
  stc->add_option("--trace-out", st_trace, "JSON-lines trace output");
  stc->add_option("--trace-stride", st_stride, "Keep every s-th step")->check(CLI::PositiveNumber);

  GraphSource de_src;
  int de_k = 2;
  std::optional<std::uint32_t> de_vertex;
  bool de_all = false, de_exact = false, de_json = false;
  auto* de = app.add_subcommand("depth", "Depth certificates for non-core vertices");
  de_src.add_options(de, false);
  de->add_option("--k", de_k, "Core threshold")->required();
  auto* v_opt = de->add_option("--vertex", de_vertex, "Single vertex");
  de->add_flag("--all", de_all, "All non-core vertices (default)")->excludes(v_opt);
  de->add_flag("--exact-oracle", de_exact, "Also run the exhaustive depth search (n <= 64)");
  de->add_flag("--json", de_json, "One JSON object per vertex");

  std::string ex_config;
  bool ex_assert = false;
  auto* ex = app.add_subcommand("experiment", "Run a scaling experiment from a JSON config");
  ex->add_option("--config", ex_config, "Config path")->required()->check(CLI::ExistingFile);
  ex->add_flag("--assert", ex_assert, "Exit 2 when configured acceptance thresholds fail");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*th) return cmd_thresholds(th_r, th_k, th_c, th_avg, th_json);
    if (*sa) return cmd_sample(sa_model, sa_n, sa_m, sa_r, sa_seed, sa_out);
    if (*stc) return cmd_strip(st_src, st_k, st_engine, st_seed, st_trace, st_stride);
    if (*de) return cmd_depth(de_src, de_k, de_vertex, de_exact, de_json);
    if (*ex) return cmd_experiment(ex_config, ex_assert);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
