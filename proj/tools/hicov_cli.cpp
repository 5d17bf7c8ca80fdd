#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hicov/hicov.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailed = 1;
constexpr int kExitReject = 3;
constexpr int kExitUsage = 64;
constexpr int kExitRegime = 65;
constexpr int kExitSingular = 66;

constexpr std::uint64_t kDefaultSeed = 20130917;

std::uint64_t effective_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> config) {
  if (flag) return *flag;
  if (config) return *config;
  if (const char* env = std::getenv("HICOV_SEED"); env != nullptr && *env != '\0') {
    return hicov::parse_u64(env);
  }
  return kDefaultSeed;
}

unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const hicov::InvalidRegime& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRegime;
  } catch (const hicov::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRegime;
  } catch (const hicov::NotPositiveDefinite& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSingular;
  } catch (const hicov::NotPsd& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSingular;
  } catch (const hicov::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const hicov::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

struct TestArgs {
  std::string file;
  std::string test;
  double alpha = 0.05;
  double delta = 0.0;
};

int cmd_test(const TestArgs& args) {
  std::ifstream in(args.file);
  if (!in) throw hicov::ParseError("cannot open data file '" + args.file + "'");
  const hicov::DataMatrix x = hicov::read_data_csv(in);
  const auto kind = hicov::parse_test_kind(args.test);
  if (!kind) throw hicov::ParseError("unknown test '" + args.test + "'");
  const hicov::TestOutcome o = hicov::run_test(*kind, x, args.alpha, args.delta);

  std::cout << std::setprecision(10);
  std::cout << "test          " << hicov::test_name(o.test) << '\n'
            << "n             " << x.samples() << '\n'
            << "p             " << x.dim() << '\n'
            << "alpha         " << o.alpha << '\n'
            << "raw           " << o.raw << '\n'
            << "standardized  " << o.standardized << '\n'
            << "threshold     " << o.threshold << '\n'
            << "decision      " << (o.reject ? "reject H0: Sigma = I" : "do not reject H0") << '\n';
  return o.reject ? kExitReject : kExitOk;
}

struct PowerArgs {
  std::optional<double> y;
  double alpha = 0.05;
  std::optional<double> b;
  std::optional<double> h;
  std::optional<double> rho;
  std::optional<std::size_t> p;
  std::optional<std::size_t> n;
};

int cmd_power(const PowerArgs& args) {
  const int given = (args.b ? 1 : 0) + (args.h ? 1 : 0) + (args.rho ? 1 : 0);
  if (given != 1) throw hicov::InvalidInput("give exactly one of --b, --h, --rho");
  std::cout << std::fixed << std::setprecision(4);
  if (args.rho) {
    if (!args.p || !args.n) throw hicov::InvalidInput("--rho requires --p and --n");
    if (args.y) throw hicov::InvalidInput("--rho takes y from --p/--n; drop --y");
    if (*args.p >= *args.n) throw hicov::InvalidRegime("power theory requires p < n");
    const double y = static_cast<double>(*args.p) / static_cast<double>(*args.n);
    const double b = hicov::likelihood_distance(
        hicov::CovarianceModel::diagonal_spike(*args.p, *args.rho));
    std::cout << "b          " << std::setprecision(7) << b << '\n'
              << std::setprecision(4) << "lrt_power  " << hicov::lrt_power(b, y, args.alpha) << '\n';
    return kExitOk;
  }
  if (!args.y) throw hicov::InvalidInput("--b and --h require --y");
  if (args.b) {
    std::cout << "lrt_power  " << hicov::lrt_power(*args.b, *args.y, args.alpha) << '\n';
    return kExitOk;
  }
  std::cout << "lrt_power        " << hicov::lrt_spiked_power(*args.h, *args.y, args.alpha) << '\n'
            << "quadratic_power  " << hicov::quadratic_spiked_power(*args.h, args.alpha) << '\n';
  return kExitOk;
}

struct SimulateArgs {
  std::optional<std::string> config;
  std::optional<std::string> preset;
  std::optional<std::size_t> n;
  std::optional<std::string> p;
  std::optional<double> alpha;
  std::optional<std::size_t> reps;
  std::optional<std::string> law;
  std::optional<std::string> mean;
  std::optional<std::string> tests;
  std::vector<std::string> grid;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> out;
  std::optional<std::string> plot_script;
};

void print_summary(std::ostream& os, const std::vector<hicov::PowerCurve>& curves) {
  os << std::left << std::setw(6) << "p" << std::setw(12) << "grid" << std::setw(6) << "test"
     << std::setw(10) << "rate" << std::setw(10) << "stderr" << "theory\n";
  os << std::fixed;
  for (const auto& c : curves) {
    for (const auto& pt : c.points) {
      for (const auto& r : pt.rates) {
        os << std::setw(6) << c.config.p << std::setw(12)
           << (pt.grid_param ? hicov::format_number(*pt.grid_param) : std::string("-"))
           << std::setw(6) << hicov::test_name(r.test) << std::setprecision(4) << std::setw(10)
           << r.rate << std::setw(10) << r.mc_stderr;
        if (r.theory) {
          os << *r.theory;
        } else {
          os << "-";
        }
        os << '\n';
      }
    }
  }
}

int cmd_simulate(const SimulateArgs& args) {
  hicov::CampaignPlan base;
  if (args.preset) {
    auto p = hicov::preset(*args.preset);
    if (!p) throw hicov::ParseError("unknown preset '" + *args.preset + "'");
    base = *p;
  }
  if (args.config) {
    std::ifstream in(*args.config);
    if (!in) throw hicov::ParseError("cannot open config file '" + *args.config + "'");
    base = hicov::parse_config(in, std::move(base));
  }
  hicov::PlanBuilder builder(std::move(base));
  if (args.n) builder.set("n", std::to_string(*args.n));
  if (args.p) builder.set("p", *args.p);
  if (args.alpha) builder.set("alpha", hicov::format_number(*args.alpha));
  if (args.reps) builder.set("reps", std::to_string(*args.reps));
  if (args.law) builder.set("law", *args.law);
  if (args.mean) builder.set("mean", *args.mean);
  if (args.tests) builder.set("tests", *args.tests);
  for (const auto& g : args.grid) builder.set("grid", g);
  const hicov::CampaignPlan& plan = builder.plan();

  const std::uint64_t seed = effective_seed(args.seed, plan.seed);
  const unsigned workers = args.workers.value_or(plan.workers.value_or(default_workers()));
  std::cout << "campaign " << plan.name << ", seed " << seed << ", workers " << workers << '\n';

  std::vector<hicov::PowerCurve> curves;
  for (const auto& cfg : plan.expand(seed, workers)) curves.push_back(hicov::run_campaign(cfg));

  const std::string out_path = args.out.value_or(plan.name + ".csv");
  {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw hicov::ParseError("cannot write '" + out_path + "'");
    hicov::write_power_csv(out, curves);
  }
  if (args.plot_script) {
    std::ofstream script(*args.plot_script, std::ios::binary);
    if (!script) throw hicov::ParseError("cannot write '" + *args.plot_script + "'");
    hicov::write_plot_script(script, curves, "Empirical power: " + plan.name,
                             plan.name + ".png");
  }
  print_summary(std::cout, curves);
  std::cout << "wrote " << out_path << '\n';
  return kExitOk;
}

struct ValidateArgs {
  std::string suite;
  std::optional<std::size_t> reps;
  std::size_t n = 200;
  std::size_t p = 50;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

int cmd_validate(const ValidateArgs& args) {
  const std::uint64_t seed = effective_seed(args.seed, std::nullopt);
  const unsigned workers = args.workers.value_or(default_workers());
  std::cout << "suite " << args.suite << ", seed " << seed << '\n';

  hicov::ValidationReport report;
  if (args.suite == "lemma1") {
    report = hicov::log_inequality_suite(args.reps.value_or(200000), seed);
  } else if (args.suite == "czz-oracle") {
    report = hicov::czz_oracle_suite(args.reps.value_or(100), seed);
  } else if (args.suite == "null-clt") {
    report = hicov::null_clt_suite(args.n, args.p, args.reps.value_or(10000), seed, workers);
  } else if (args.suite == "epsilon") {
    report = hicov::epsilon_suite(args.n, args.p, args.reps.value_or(10000), seed, workers);
  } else {
    throw hicov::InvalidInput("unknown suite '" + args.suite + "'");
  }

  std::cout << std::scientific << std::setprecision(4);
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS  " : "FAIL  ") << c.name << ": measured " << c.measured
              << ", bound " << c.bound << ", margin " << c.margin << '\n';
  }
  std::cout << (report.passed() ? "suite passed" : "suite FAILED") << '\n';
  return report.passed() ? kExitOk : kExitValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"High-dimensional tests of Sigma = I: corrected LRT, CM and CZZ"};
  app.require_subcommand(1);

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Run one test on a headerless CSV (rows = observations)");
  test->add_option("file", test_args.file, "data file")->required();
  test->add_option("--test", test_args.test, "lrt | cm | czz")->required();
  test->add_option("--alpha", test_args.alpha, "level");
  test->add_option("--delta", test_args.delta, "excess kurtosis of the innovations (LRT)");

  PowerArgs power_args;
  auto* power = app.add_subcommand("power", "Theoretical power of the LRT (and quadratic-loss tests)");
  power->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  power->add_option("--y", power_args.y, "dimension ratio p/n");
  power->add_option("--alpha", power_args.alpha, "level");
  power->add_option("--b", power_args.b, "likelihood distance tr(S) - log|S| - p");
  power->add_option("--h", power_args.h, "rank-one spike strength");
  power->add_option("--rho", power_args.rho, "diagonal spike diag(rho,1,...,1)");
  power->add_option("--p", power_args.p, "dimension (with --rho)");
  power->add_option("--n", power_args.n, "sample size (with --rho)");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power campaign to CSV");
  simulate->add_option("--config", sim_args.config, "key=value config file");
  simulate->add_option("--preset", sim_args.preset, "figure1 | figure2 | smoke");
  simulate->add_option("--n", sim_args.n, "sample size");
  simulate->add_option("--p", sim_args.p, "dimension(s), comma separated");
  simulate->add_option("--alpha", sim_args.alpha, "level");
  simulate->add_option("--reps", sim_args.reps, "replications per grid point");
  simulate->add_option("--law", sim_args.law, "gaussian | gamma");
  simulate->add_option("--mean", sim_args.mean, "zero | random");
  simulate->add_option("--tests", sim_args.tests, "comma list of lrt, cm, czz");
  simulate->add_option("--grid", sim_args.grid, "grid entries: identity, rho:<v>, h:<v>");
  simulate->add_option("--seed", sim_args.seed, "master seed (default: $HICOV_SEED)");
  simulate->add_option("--workers", sim_args.workers, "worker threads");
  simulate->add_option("--out", sim_args.out, "CSV output path");
  simulate->add_option("--plot-script", sim_args.plot_script, "write a matplotlib script here");

  ValidateArgs val_args;
  auto* validate = app.add_subcommand("validate", "Run a validation suite");
  validate->add_option("--suite", val_args.suite, "null-clt | epsilon | lemma1 | czz-oracle")
      ->required();
  validate->add_option("--reps", val_args.reps, "replications / samples");
  validate->add_option("--n", val_args.n, "sample size");
  validate->add_option("--p", val_args.p, "dimension");
  validate->add_option("--seed", val_args.seed, "master seed (default: $HICOV_SEED)");
  validate->add_option("--workers", val_args.workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*test) return guarded([&] { return cmd_test(test_args); });
  if (*power) return guarded([&] { return cmd_power(power_args); });
  if (*simulate) return guarded([&] { return cmd_simulate(sim_args); });
  return guarded([&] { return cmd_validate(val_args); });
}
