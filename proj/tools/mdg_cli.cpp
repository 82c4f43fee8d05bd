#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mdg/analysis.hpp"
#include "mdg/closed_form.hpp"
#include "mdg/io.hpp"
#include "mdg/oracle.hpp"
#include "mdg/samplers.hpp"
#include "mdg/validate.hpp"

namespace fs = std::filesystem;
using namespace mdg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;

struct Options {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool oracle = false;
  bool validate = false;
  bool quick = false;
  bool inject_fault = false;
  std::string scheme = "exact-event";
  int n = 100000;
  int steps = 50;
};

struct Loaded {
  Scenario scenario;
  MixtureModel mixture;
  int guided;
};

Loaded load(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config <scenario.json> is required");
  Scenario sc = load_scenario_file(opt.config);
  if (opt.seed_set) sc.seed = opt.seed;
  if (!opt.out.empty()) sc.out_dir = opt.out;
  MixtureModel m = load_mixture_file(sc.mixture_path);
  const int guided = m.class_by_label(sc.guided_class);
  fs::create_directories(sc.out_dir);
  return {std::move(sc), std::move(m), guided};
}

std::string tag(double v) {
  std::ostringstream ss;
  ss << v;
  std::string s = ss.str();
  for (char& ch : s) {
    if (ch == '.') ch = 'p';
    if (ch == '-') ch = 'm';
  }
  return s;
}

DenseDistribution closed_form_density(const MixtureModel& m, const GuidanceConfig& g, double T,
                                      double t) {
  if (m.space().dims() == 1) return solve_1d_guided(m, g, T, t);
  if (m.space().dims() == 2) return solve_2d_guided(m, g, T, t);
  throw ConfigError("closed-form mode supports D in {1,2}; use --oracle for higher D");
}

int cmd_evolve(const Options& opt) {
  const Loaded L = load(opt);
  const Scenario& sc = L.scenario;
  for (double w : sc.w) {
    const GuidanceConfig g(L.guided, w);
    OracleSolution oracle_sol{{}, {}, OracleMethod::MatrixExponential, 0.0};
    if (opt.oracle || opt.validate) {
      oracle_sol = evolve_exact(guided_reverse(L.mixture, g), sc.T, sc.times,
                                DenseDistribution::delta(L.mixture.space(),
                                                         L.mixture.space().size() - 1));
    }
    for (std::size_t k = 0; k < sc.times.size(); ++k) {
      const double t = sc.times[k];
      const DenseDistribution q =
          opt.oracle ? oracle_sol.densities[k] : closed_form_density(L.mixture, g, sc.T, t);
      if (opt.validate && !opt.oracle) {
        const double gap = (q.probs() - oracle_sol.densities[k].probs()).cwiseAbs().maxCoeff();
        if (gap > 1e-6) {
          std::cerr << "validation failed: closed form vs oracle drift " << gap << " at t = " << t
                    << ", w = " << w << "\n";
          return kExitValidation;
        }
      }
      std::ofstream csv(sc.out_dir + "/density_w" + tag(w) + "_t" + tag(t) + ".csv");
      write_density_csv(csv, q, w, t);
    }
    const DenseDistribution terminal =
        opt.oracle ? evolve_exact(guided_reverse(L.mixture, g), sc.T, {sc.T},
                                  DenseDistribution::delta(L.mixture.space(),
                                                           L.mixture.space().size() - 1))
                         .densities[0]
                   : closed_form_density(L.mixture, g, sc.T, sc.T);
    std::ofstream svg(sc.out_dir + "/terminal_w" + tag(w) + ".svg");
    const std::string title = "terminal density, w = " + tag(w);
    if (L.mixture.space().dims() == 1) {
      svg_bar_chart(svg, terminal, title);
    } else if (L.mixture.space().dims() == 2) {
      svg_heatmap(svg, terminal, title);
    }
  }
  return kExitOk;
}

int cmd_tv_curve(const Options& opt) {
  const Loaded L = load(opt);
  const Scenario& sc = L.scenario;
  const int D = L.mixture.space().dims();
  if (D != 1 && D != 2) throw ConfigError("tv-curve supports D in {1,2}");
  std::vector<TVCurve> curves;
  for (double w : sc.w) {
    const GuidanceConfig g(L.guided, w);
    curves.push_back(D == 1 ? tv_curve_1d_closed(L.mixture, g, sc.T, sc.times)
                            : tv_curve_2d(L.mixture, g, sc.T, sc.times));
  }
  std::ofstream csv(sc.out_dir + "/tv.csv");
  write_tv_csv(csv, curves);

  // TV against w at the middle grid time.
  const std::size_t mid = sc.times.size() / 2;
  std::vector<double> ws, log_tvs;
  for (const TVCurve& c : curves) {
    ws.push_back(c.w);
    log_tvs.push_back(c.log_values[mid]);
  }
  std::ofstream svg(sc.out_dir + "/tv_vs_w.svg");
  svg_tv_vs_w(svg, ws, log_tvs, "ln TV at t = " + tag(sc.times[mid]));

  std::ofstream report(sc.out_dir + "/decay_fit.txt");
  try {
    const DecayFit fit = decay_exponent_fit(curves, mid);
    report << "slope " << format_double(fit.slope) << "\nintercept "
           << format_double(fit.intercept) << "\nmax_residual " << format_double(fit.max_residual)
           << "\npoints_used " << fit.points_used << "\n";
  } catch (const DegenerateInput& e) {
    report << "fit unavailable: " << e.what() << "\n";
  }
  return kExitOk;
}

int cmd_regions(const Options& opt) {
  const Loaded L = load(opt);
  const Scenario& sc = L.scenario;
  if (L.mixture.space().dims() != 2) throw ConfigError("regions requires D = 2");
  const double w = sc.w.empty() ? 1.0 : sc.w.front();
  const RegionDecomposition rd = region_decomposition_2d(L.mixture, L.guided, w);
  std::ofstream json(sc.out_dir + "/regions.json");
  json << region_report_json(rd);
  std::ofstream svg(sc.out_dir + "/regions.svg");
  svg_region_map(svg, rd, "region decomposition");
  std::ofstream csv(sc.out_dir + "/limit_distribution.csv");
  write_density_csv(csv, limit_distribution_2d(rd, L.mixture), w, sc.T);
  return kExitOk;
}

int cmd_sample(const Options& opt) {
  const Loaded L = load(opt);
  const Scenario& sc = L.scenario;
  const double w = sc.w.empty() ? 0.0 : sc.w.front();
  const GuidanceConfig g(L.guided, w);
  const ReverseGenerator gen = guided_reverse(L.mixture, g);

  SampleBatch batch{L.mixture.space(), {}, sc.seed, ""};
  if (opt.scheme == "exact-event") {
    batch = sample_exact_event(gen, sc.T, opt.n, sc.seed);
  } else if (opt.scheme == "tau-leaping") {
    batch = sample_tau_leaping(gen, sc.T, opt.steps, opt.n, sc.seed);
  } else {
    throw ConfigError("unknown scheme '" + opt.scheme + "' (use exact-event or tau-leaping)");
  }
  std::ofstream csv(sc.out_dir + "/samples.csv");
  write_samples_csv(csv, batch);

  const int D = L.mixture.space().dims();
  DenseDistribution exact =
      D == 1 ? solve_1d_guided(L.mixture, g, sc.T, sc.T)
      : D == 2
          ? sampled_distribution_2d(L.mixture, g)
          : evolve_exact(gen, sc.T, {sc.T},
                         DenseDistribution::delta(L.mixture.space(), L.mixture.space().size() - 1))
                .densities[0];
  std::ofstream report(sc.out_dir + "/sample_report.txt");
  report << "scheme " << batch.scheme << "\nn " << batch.samples.size() << "\nseed " << batch.seed
         << "\nempirical_tv " << format_double(tv(empirical_distribution(batch), exact))
         << "\ndiscarded_events " << batch.discarded_events << "\nwall_time "
         << format_double(batch.wall_time) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"masked discrete diffusion with classifier-free guidance: exact solvers, "
               "samplers and validation"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--config", opt.config, "scenario JSON path");
  app.add_option("--out", opt.out, "output directory");
  auto* seed_opt = app.add_option("--seed", opt.seed, "RNG seed override");
  app.add_flag("--oracle", opt.oracle, "use the brute-force oracle instead of closed forms");
  app.add_flag("--validate", opt.validate, "cross-check closed forms against the oracle");
  app.add_flag("--quick", opt.quick, "reduced-size validation corpus");

  auto* evolve = app.add_subcommand("evolve", "emit densities along the reverse dynamics");
  auto* tv_curve = app.add_subcommand("tv-curve", "emit TV curves and the decay fit");
  auto* regions = app.add_subcommand("regions", "emit the region decomposition report");
  auto* sample = app.add_subcommand("sample", "draw terminal samples");
  sample->add_option("--scheme", opt.scheme, "exact-event | tau-leaping");
  sample->add_option("--n", opt.n, "number of particles");
  sample->add_option("--steps", opt.steps, "tau-leaping step count");
  auto* validate = app.add_subcommand("validate", "run the acceptance suite");
  validate->add_flag("--inject-fault", opt.inject_fault,
                     "negative control: corrupt one computed value");
  // Let common options (--config, --out, ...) appear after the subcommand.
  for (CLI::App* sub : {evolve, tv_curve, regions, sample, validate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  opt.seed_set = seed_opt->count() > 0;

  try {
    if (evolve->parsed()) return cmd_evolve(opt);
    if (tv_curve->parsed()) return cmd_tv_curve(opt);
    if (regions->parsed()) return cmd_regions(opt);
    if (sample->parsed()) return cmd_sample(opt);
    if (validate->parsed()) {
      return run_acceptance(opt.quick, opt.inject_fault, std::cout) ? kExitOk : kExitValidation;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitConfig;
}
