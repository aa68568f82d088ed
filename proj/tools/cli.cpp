#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "pvisit/bad_center.hpp"
#include "pvisit/bound.hpp"
#include "pvisit/config.hpp"
#include "pvisit/errors.hpp"
#include "pvisit/io.hpp"
#include "pvisit/markov.hpp"
#include "pvisit/numeric.hpp"
#include "pvisit/pmf.hpp"
#include "pvisit/sampling.hpp"
#include "pvisit/scan.hpp"
#include "pvisit/system.hpp"

namespace pvisit {

namespace {

unsigned worker_count() {
  if (const char* env = std::getenv("PVISIT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 1024)
      throw ValidationError("PVISIT_WORKERS must be an integer in [1, 1024]");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string mc_json(const McEstimate& e) {
  return "{\"value\": " + format_double(e.value) + ", \"std_error\": " + format_double(e.std_error) +
         ", \"lower_bound\": " + (e.lower_bound ? "true" : "false") + "}";
}

std::string breakdown_json(const BoundInputs& in, const BoundBreakdown& b, const std::string& extra) {
  std::string s = "{\"eps\": " + format_double(in.eps) + ", \"N\": " + std::to_string(in.N) +
                  ", \"p\": " + std::to_string(in.p) + ", \"M\": " + std::to_string(in.M) +
                  ", \"r1\": " + format_double(b.r1) + ", \"r2\": " + format_double(b.r2) +
                  ", \"r3\": " + format_double(b.r3) + ", \"total\": " + format_double(b.total) +
                  ", \"r1_provenance\": \"" + std::string(to_string(b.r1_provenance)) + "\"" +
                  ", \"r2_provenance\": \"" + std::string(to_string(b.r2_provenance)) + "\"";
  return s + extra + "}\n";
}

struct BoundArgs {
  double eps = -1.0;
  std::size_t N = 0, p = 0, M = 0;
  bool iid = false;
  bool full_grid = false;
  std::vector<std::string> series;
  std::string model;
};

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  std::optional<MarkovBinaryModel> model;
  if (!a.model.empty()) model.emplace(read_model_file(a.model));
  BoundInputs in{a.eps, a.N, a.p, a.M};
  if (model && a.eps < 0) in.eps = model->eps();
  if (in.eps < 0) throw ValidationError("--eps is required unless --model is given");
  in.validate();
  if (a.iid) {
    const CorrelationTerms t = iid_terms(in);
    out << breakdown_json(in, assemble_total(t.r1, t.r2, in, Provenance::iid_analytic, Provenance::iid_analytic), "");
  } else if (model) {
    if (std::abs(model->eps() - in.eps) > 1e-12) throw ValidationError("--eps disagrees with the model's stationary hit probability");
    const CorrelationTerms t = exact_correlation_terms(*model, in.N, in.p);
    out << breakdown_json(in, assemble_total(t.r1, t.r2, in), "");
  } else {
    std::vector<HitSeries> series;
    for (const auto& path : a.series) series.push_back(hit_series_from_json(read_text_file(path)));
    const McEstimate r1 = estimate_r1_mc(series, in, a.full_grid ? full_r1_grid(in) : default_r1_grid(in));
    const McEstimate r2 = estimate_r2_mc(series, in.p);
    const BoundBreakdown b = assemble_total(r1.value, r2.value, in, Provenance::monte_carlo, Provenance::monte_carlo);
    out << breakdown_json(in, b, ", \"r1_estimate\": " + mc_json(r1) + ", \"r2_estimate\": " + mc_json(r2));
  }
  return kExitOk;
}

int cmd_oracle(const std::string& path, std::size_t N, bool check, std::ostream& out, std::ostream& err) {
  const MarkovBinaryModel model = read_model_file(path);
  const Pmf dp = exact_count_distribution(model, N);
  if (!check) {
    out << pmf_to_json(dp) << '\n';
    return kExitOk;
  }
  const Pmf en = enumerate_count_distribution(model, N);
  double enum_diff = 0.0;
  for (std::size_t k = 0; k <= N; ++k)
    enum_diff = std::max(enum_diff, std::abs(dp.at(k) - en.at(k)));
  const std::vector<double> res = telescoping_residuals(model, N);
  const double max_res = *std::max_element(res.begin(), res.end());
  const bool ok = enum_diff <= 1e-12 && max_res <= 1e-10;
  out << "{\"pmf\": " << pmf_to_json(dp) << ", \"enumeration_max_diff\": " << format_double(enum_diff)
      << ", \"max_telescoping_residual\": " << format_double(max_res) << ", \"ok\": " << (ok ? "true" : "false")
      << "}\n";
  if (!ok) err << "oracle: check failed (enumeration diff " << enum_diff << ", residual " << max_res << ")\n";
  return ok ? kExitOk : kExitValidation;
}

struct SimulateArgs {
  std::string system = "cat";
  std::string center;
  double r = 0.05;
  double t = 1.0;
  std::size_t n_samples = 10000;
  std::uint64_t gap = 1024;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t measure_iterations = 10'000'000;
  std::size_t hits = 0;
  std::string y0;
};

int cmd_simulate(const SimulateArgs& a, unsigned workers, std::ostream& out, std::ostream& err) {
  if (!a.seed_set) throw ValidationError("--seed is required");
  const System system = make_system(a.system);
  Point center = a.center.empty() ? Point(system.spec().start) : point_from_text(a.center);
  if (system.has_geometry()) center = system.canonical(center);
  const BallTarget target{center, a.r};
  if (a.hits > 0) {
    const Point y0 = a.y0.empty() ? center : point_from_text(a.y0);
    out << hit_series_to_json(orbit_hits(system, target, y0, a.hits, a.seed)) << '\n';
    return kExitOk;
  }
  VisitSamplingOptions opts;
  opts.measure_iterations = a.measure_iterations;
  opts.workers = workers;
  const VisitSample s = sample_visit_counts(system, target, a.t, a.n_samples, a.gap, a.seed, opts);
  err << "simulate: eps_hat " << format_double(s.eps_hat.value) << " +- " << format_double(s.eps_hat.std_error)
      << ", N_used " << s.N_used << ", samples " << s.n_samples << ", escapes " << s.escapes << '\n';
  if (s.low_sample_warning) err << "simulate: warning: fewer than 100 samples\n";
  out << "{\"N_used\": " << s.N_used << ", \"n_samples\": " << s.n_samples
      << ", \"eps_hat\": " << format_double(s.eps_hat.value) << ", \"eps_se\": " << format_double(s.eps_hat.std_error)
      << ", \"tv_to_poisson\": " << format_double(tv_distance(s.empirical, poisson_pmf(a.t)))
      << ", \"pmf\": " << pmf_to_json(s.empirical) << "}\n";
  return kExitOk;
}

int cmd_badcenters(const std::string& system_name, double r, const std::vector<std::string>& centers,
                   std::ostream& out) {
  const System system = make_system(system_name);
  out << "center,radius,flagged,first_bad_k,margin,horizon,note\n";
  for (const auto& text : centers) {
    const BadCenterReport rep = detect_bad_center(system, BallTarget{point_from_text(text), r});
    out << point_to_text(point_from_text(text), ';') << ',' << format_double(r) << ',' << (rep.flagged ? 1 : 0)
        << ',' << rep.first_bad_k << ',' << (std::isnan(rep.margin) ? std::string() : format_double(rep.margin))
        << ',' << rep.horizon << ',' << rep.note << '\n';
  }
  return kExitOk;
}

int cmd_scan(const std::string& path, std::optional<std::size_t> row, const std::string& output_override,
             unsigned workers, std::ostream& out, std::ostream& err) {
  ExperimentConfig config = load_config(path);
  if (!output_override.empty()) config.output_path = output_override;
  const ScanResult result = run_scan(config, workers, row);
  for (const auto& r : result.rows) {
    err << "scan: row " << r.row << (r.skipped ? " skipped (" + r.skip_reason + ")" : std::string(" done"))
        << " in " << r.wall_seconds << " s\n";
  }
  if (config.output_path.empty() || config.output_path == "-")
    out << scan_rows_csv(result);
  else
    write_scan_outputs(result, config.output_path);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poisson approximation for visit counts: bounds, exact oracles and map simulations"};
  app.name("pvisit");
  app.require_subcommand(1);

  std::string tv_a, tv_b;
  auto* tv = app.add_subcommand("tv", "Total variation distance between two PMF files");
  tv->add_option("a", tv_a)->required();
  tv->add_option("b", tv_b)->required();

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "Bound breakdown for (eps, N, p, M)");
  bound->add_option("--eps", bound_args.eps, "P(X_1 = 1); defaults to the model's value with --model");
  bound->add_option("--N", bound_args.N)->required();
  bound->add_option("--p", bound_args.p)->required();
  bound->add_option("--M", bound_args.M)->required();
  auto* iid_flag = bound->add_flag("--iid", bound_args.iid, "Closed-form i.i.d. correlation terms");
  auto* series_opt = bound->add_option("--series", bound_args.series, "HitSeries JSON files (Monte-Carlo terms)");
  auto* model_opt = bound->add_option("--model", bound_args.model, "Markov model JSON (exact terms)");
  bound->add_flag("--full-grid", bound_args.full_grid, "Monte-Carlo r1 over every (j, q)");
  iid_flag->excludes(series_opt)->excludes(model_opt);
  series_opt->excludes(model_opt);

  std::string oracle_model;
  std::size_t oracle_N = 0;
  bool oracle_check = false;
  auto* oracle = app.add_subcommand("oracle", "Exact law of the hit count of a Markov model");
  oracle->add_option("model", oracle_model)->required();
  oracle->add_option("--N", oracle_N)->required();
  oracle->add_flag("--check", oracle_check, "Cross-check against path enumeration and the telescoping identity");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample visit counts (or one hit series) for a ball");
  simulate->add_option("--system", sim.system, "cat, henon, lozi, doubling, iid:<eps>, markov:<file>");
  simulate->add_option("--center", sim.center, "x,y");
  simulate->add_option("--r", sim.r);
  simulate->add_option("--t", sim.t);
  simulate->add_option("--n-samples", sim.n_samples);
  simulate->add_option("--gap", sim.gap);
  simulate->add_option("--seed", sim.seed)->each([&](const std::string&) { sim.seed_set = true; });
  simulate->add_option("--measure-iterations", sim.measure_iterations);
  simulate->add_option("--hits", sim.hits, "Emit the hit series of one orbit of this length instead");
  simulate->add_option("--y0", sim.y0, "Orbit start for --hits (defaults to the center)");

  std::string scan_config, scan_output;
  std::optional<std::size_t> scan_row;
  auto* scan = app.add_subcommand("scan", "Run an experiment config");
  scan->add_option("config", scan_config)->required();
  scan->add_option("--row", scan_row, "Recompute a single row");
  scan->add_option("--output", scan_output, "Override output.path ('-' for stdout)");

  std::string bc_system = "cat";
  double bc_r = 0.0;
  std::vector<std::string> bc_centers;
  auto* bad = app.add_subcommand("badcenters", "Bad-center flags for a list of centers");
  bad->add_option("--system", bc_system);
  bad->add_option("--r", bc_r)->required();
  bad->add_option("--center", bc_centers, "x,y (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*tv) {
      out << format_double(tv_distance(read_pmf_file(tv_a), read_pmf_file(tv_b))) << '\n';
      return kExitOk;
    }
    if (*bound) return cmd_bound(bound_args, out);
    if (*oracle) return cmd_oracle(oracle_model, oracle_N, oracle_check, out, err);
    if (*simulate) return cmd_simulate(sim, worker_count(), out, err);
    if (*scan) return cmd_scan(scan_config, scan_row, scan_output, worker_count(), out, err);
    if (*bad) return cmd_badcenters(bc_system, bc_r, bc_centers, out);
  } catch (const ResourceLimitError& e) {
    err << "pvisit: resource limit: " << e.what() << '\n';
    return kExitResourceLimit;
  } catch (const std::exception& e) {
    err << "pvisit: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace pvisit
