#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "coupled/algebra.hpp"
#include "coupled/distributions.hpp"
#include "coupled/entropy.hpp"
#include "coupled/errors.hpp"
#include "coupled/independent_equals.hpp"
#include "coupled/maxent.hpp"
#include "coupled/sde.hpp"
#include "json.hpp"
#include "output.hpp"

using namespace coupled;
using coupled::cli::csv_number;
using coupled::cli::FlagSet;
using coupled::cli::RunInfo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr std::uint64_t kDefaultSeed = 42;

// Options of one subcommand, remembered so the manifest can list every
// flag with its effective value.
class Command {
 public:
  Command(CLI::App& app, std::string name, std::string help)
      : sub_(app.add_subcommand(name, std::move(help))), name_(std::move(name)) {}

  CLI::App* app() const { return sub_; }
  const std::string& name() const { return name_; }

  CLI::Option* add(const std::string& flag, double& v, const std::string& help) {
    record(flag, [&v] { return csv_number(v); });
    return sub_->add_option(flag, v, help)->capture_default_str();
  }
  CLI::Option* add(const std::string& flag, std::uint64_t& v, const std::string& help) {
    record(flag, [&v] { return std::to_string(v); });
    return sub_->add_option(flag, v, help)->capture_default_str();
  }
  CLI::Option* add(const std::string& flag, std::string& v, const std::string& help) {
    record(flag, [&v] { return v; });
    return sub_->add_option(flag, v, help)->capture_default_str();
  }
  CLI::Option* add(const std::string& flag, std::vector<double>& v, const std::string& help) {
    record(flag, [&v] {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + csv_number(v[i]);
      return s;
    });
    return sub_->add_option(flag, v, help)->delimiter(',');
  }
  CLI::Option* add(const std::string& flag, std::optional<std::uint64_t>& v,
                   const std::string& help) {
    record(flag, [&v] { return v ? std::to_string(*v) : std::string("default"); });
    return sub_->add_option(flag, v, help);
  }

  RunInfo run_info(std::uint64_t seed) const {
    RunInfo r{name_, {}, seed};
    for (const auto& [flag, fmt] : flags_) r.flags[flag] = fmt();
    return r;
  }

 private:
  void record(const std::string& flag, std::function<std::string()> f) {
    flags_.emplace_back(flag.substr(0, flag.find(',')), std::move(f));
  }

  CLI::App* sub_;
  std::string name_;
  std::vector<std::pair<std::string, std::function<std::string()>>> flags_;
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::string entropy_table(double kmin, double kmax, std::uint64_t steps, double sigma) {
  if (!(kmin >= 0.0) || !(kmax > kmin)) throw DomainError("need 0 <= kappa-min < kappa-max");
  if (steps < 2) throw DomainError("need steps >= 2");
  if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
  std::string csv =
      "kappa,shannon,tsallis,normalized_tsallis,coupled,shannon_numeric,tsallis_numeric,"
      "normalized_tsallis_numeric,coupled_numeric\n";
  for (double k : linspace(kmin, kmax, steps)) {
    const EntropyReport c = closed_form_entropies_gpd(sigma, k);
    const DensityFunction f = as_density(CoupledExponential{0.0, sigma, k});
    const CouplingContext ctx(k);
    // A column whose quadrature fails is reported as nan.
    auto numeric = [](auto&& compute) {
      try {
        return compute();
      } catch (const Error&) {
        return static_cast<double>(NAN);
      }
    };
    const EntropyReport n{numeric([&] { return shannon(f); }),
                          numeric([&] { return tsallis(f, ctx); }),
                          numeric([&] { return normalized_tsallis(f, ctx); }),
                          numeric([&] { return coupled_entropy_I(f, ctx); })};
    csv += fmt::format("{},{},{},{},{},{},{},{},{}\n", csv_number(k), csv_number(c.shannon),
                       csv_number(c.tsallis), csv_number(c.normalized_tsallis),
                       csv_number(c.coupled), csv_number(n.shannon), csv_number(n.tsallis),
                       csv_number(n.normalized_tsallis), csv_number(n.coupled));
  }
  return csv;
}

// gpd members are GPD(0, s, kappa). qexp members keep beta_q fixed, so a
// listed scale s fixes the shape instead: kappa_s = beta_q s - 1.
std::string scale_family(const std::string& family, const std::vector<double>& scales,
                         double kappa, double beta_q, double x_max, std::uint64_t points) {
  if (family != "gpd" && family != "qexp") throw DomainError("family must be gpd or qexp");
  if (scales.empty()) throw DomainError("need at least one scale");
  for (double s : scales) {
    if (!(s > 0.0)) throw DomainError("scales must be positive");
  }
  if (!(x_max > 0.0) || points < 2) throw DomainError("need x-max > 0 and points >= 2");
  if (!(beta_q > 0.0)) throw DomainError("beta-q must be positive");
  std::string csv = "family,scale,kappa,x,pdf,z,scaled_pdf\n";
  const auto grid = linspace(0.0, x_max, points);
  for (double s : scales) {
    const double k = family == "gpd" ? kappa : beta_q * s - 1.0;
    std::function<double(double)> pdf;
    if (family == "gpd") {
      const CoupledDistribution d = CoupledExponential{0.0, s, k};
      validate(d);
      pdf = [d](double x) { return density(d, x); };
    } else {
      const double q = 1.0 + k / (1.0 + k);
      pdf = [beta_q, q](double x) { return q_exponential_density(x, beta_q, q); };
    }
    for (double x : grid) {
      csv += fmt::format("{},{},{},{},{},{},{}\n", family, csv_number(s), csv_number(k),
                         csv_number(x), csv_number(pdf(x)), csv_number(x),
                         csv_number(s * pdf(s * x)));
    }
  }
  return csv;
}

struct SdeOutputs {
  std::string csv;
  std::string report;
};

SdeOutputs sde_run(const SdeConfig& cfg, std::uint64_t bins, double range) {
  if (bins < 1 || !(range > 0.0)) throw DomainError("need bins >= 1 and range > 0");
  const TheoryParams th = theoretical_params(cfg);
  const auto samples = simulate(cfg);
  const CoupledDistribution g = CoupledGaussian{0.0, th.sigma, th.kappa};
  const double half = range * th.sigma;
  const Histogram h = make_histogram(samples, -half, half, bins);
  std::string csv = "bin_center,density,theory_density\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    csv += fmt::format("{},{},{}\n", csv_number(h.center(i)), csv_number(h.density(i)),
                       csv_number(density(g, h.center(i))));
  }

  nlohmann::ordered_json r;
  r["schema"] = 1;
  r["kappa_theory"] = th.kappa;
  r["sigma_theory"] = th.sigma;
  r["n_samples"] = samples.size();
  if (cfg.multiplicative > 0.0) {
    const SlopeFit fit = stationary_log_density_slope(samples, cfg);
    r["slope_fit"] = fit.slope;
    r["slope_stderr"] = fit.stderr_slope;
    r["slope_expected"] = expected_log_density_slope(cfg);
  } else {
    r["slope_fit"] = nullptr;
    r["slope_stderr"] = nullptr;
    r["slope_expected"] = nullptr;
  }
  const CouplingContext ctx(th.kappa);
  auto pdf = [&](double x) { return density(g, x); };
  r["ie_moment_errors"] = {
      {"first", ie_moment_empirical(samples, pdf, 1, ctx)},
      {"second", ie_moment_empirical(samples, pdf, 2, ctx) - th.sigma * th.sigma},
  };
  return {csv, r.dump(2) + "\n"};
}

std::string maxent_verify(double sigma, double kappa, std::uint64_t trials, std::uint64_t seed,
                          std::uint64_t n_points) {
  MaxentOptions opts;
  opts.n_points = n_points;
  const MaxentReport rep = maxent_check(sigma, kappa, trials, seed, opts);
  nlohmann::ordered_json r;
  r["schema"] = 1;
  r["sigma"] = sigma;
  r["kappa"] = kappa;
  r["trials"] = rep.trials;
  r["seed"] = seed;
  r["claim"] = rep.claim;
  r["violations"] = rep.violations;
  r["strict_decreases"] = rep.strict_decreases;
  r["strict_increases"] = rep.strict_increases;
  r["max_delta_H"] = rep.max_delta_h;
  r["min_delta_H"] = rep.min_delta_h;
  r["max_constraint_error"] = rep.max_constraint_error;
  if (kappa > 0.0) {
    r["stationarity_residual"] =
        stationarity_residual(sigma, kappa, linspace(0.0, rep.grid_upper, 2001));
  } else {
    // The multipliers are singular at kappa = 0 and the form is kappa > 0 only.
    r["stationarity_residual"] = nullptr;
  }
  r["passed"] = rep.passed();
  return r.dump(2) + "\n";
}

struct EvalArgs {
  std::string quantity;
  std::string family = "gpd";
  double mu = 0.0, sigma = 1.0, kappa = 0.0, alpha = 1.0, x = 0.0, u = 0.5, q = 1.5;
  double dim = 1.0, m = 1.0;
};

CoupledDistribution eval_family(const EvalArgs& a) {
  CoupledDistribution d;
  if (a.family == "gpd") {
    d = CoupledExponential{a.mu, a.sigma, a.kappa};
  } else if (a.family == "weibull") {
    d = CoupledWeibull{a.mu, a.sigma, a.kappa};
  } else if (a.family == "gaussian") {
    d = CoupledGaussian{a.mu, a.sigma, a.kappa};
  } else if (a.family == "stretched") {
    d = CoupledStretched{a.mu, a.sigma, a.kappa, a.alpha};
  } else {
    throw DomainError(fmt::format("unknown family '{}'", a.family));
  }
  validate(d);
  return d;
}

int as_int(double v, const char* what) {
  if (v != std::floor(v)) throw DomainError(fmt::format("{} must be an integer", what));
  return static_cast<int>(v);
}

double evaluate(const EvalArgs& a) {
  const std::string& k = a.quantity;
  if (k == "q-of") return q_of(CouplingContext(a.kappa, a.alpha, as_int(a.dim, "dim")));
  if (k == "kappa-of-q") return kappa_of_q(a.q);
  const CoupledDistribution d = eval_family(a);
  if (k == "density") return density(d, a.x);
  if (k == "survival") return survival(d, a.x);
  if (k == "quantile") return quantile(d, a.u);
  if (k == "ie-moment") return ie_moment(d, as_int(a.m, "m"));
  EntropyReport e;
  if (a.family == "gpd" && a.mu == 0.0) {
    e = closed_form_entropies_gpd(a.sigma, a.kappa);
  } else {
    e = numeric_entropies(d);
  }
  if (k == "shannon") return e.shannon;
  if (k == "tsallis") return e.tsallis;
  if (k == "normalized-tsallis") return e.normalized_tsallis;
  if (k == "coupled-entropy") return e.coupled;
  throw DomainError(fmt::format("unknown quantity '{}'", k));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coupled exponential family, entropies and the coupled Boltzmann-Gibbs ensemble"};
  app.require_subcommand(1);
  std::uint64_t seed = kDefaultSeed;
  auto add_seed = [&seed](Command& c) {
    c.add("--seed", seed, "RNG seed")->envname("COUPLED_SEED");
  };

  Command et(app, "entropy-table", "Closed-form and quadrature entropies of the coupled exponential");
  double kmin = 0.0, kmax = 5.0, et_sigma = 2.0;
  std::uint64_t steps = 51;
  std::string et_out;
  et.add("--kappa-min", kmin, "smallest coupling");
  et.add("--kappa-max", kmax, "largest coupling");
  et.add("--steps", steps, "number of couplings");
  et.add("--sigma", et_sigma, "scale");
  et.add("--out", et_out, "CSV path")->required();

  Command sf(app, "scale-family", "Raw and scale-normalized density curves");
  std::string family = "gpd", sf_out;
  std::vector<double> scales{0.5, 1.0, 2.0};
  double sf_kappa = 1.0, beta_q = 1.0, x_max = 10.0;
  std::uint64_t points = 201;
  sf.add("--family", family, "gpd or qexp")->check(CLI::IsMember({"gpd", "qexp"}));
  sf.add("--scales", scales, "comma-separated scales");
  sf.add("--kappa", sf_kappa, "coupling of the gpd members");
  sf.add("--beta-q", beta_q, "fixed beta_q of the qexp members");
  sf.add("--x-max", x_max, "grid end");
  sf.add("--points", points, "grid points");
  sf.add("--out", sf_out, "CSV path")->required();

  Command sr(app, "sde-run", "Simulate the multiplicative-noise process and fit its density");
  SdeConfig cfg;
  cfg.n_paths = 256;
  cfg.n_steps = 100000;
  std::uint64_t bins = 200;
  double range = 10.0;
  std::string sr_out, sr_report;
  sr.add("--A", cfg.additive, "additive amplitude");
  sr.add("--M", cfg.multiplicative, "multiplicative amplitude");
  sr.add("--tau", cfg.tau, "relaxation rate");
  sr.add("--dt", cfg.dt, "time step");
  sr.add("--steps", cfg.n_steps, "steps per path after burn-in");
  sr.add("--paths", cfg.n_paths, "independent paths");
  sr.add("--burn-in", cfg.burn_in, "discarded steps per path");
  sr.add("--thin", cfg.thin, "steps between retained states");
  sr.add("--bins", bins, "histogram bins");
  sr.add("--range", range, "histogram half-width in units of the theoretical scale");
  add_seed(sr);
  sr.add("--out", sr_out, "histogram CSV path")->required();
  sr.add("--report", sr_report, "JSON report path (default <out>.report.json)");

  Command mv(app, "maxent-verify", "Perturbation check of the maximum-entropy property");
  double mv_sigma = 1.0, mv_kappa = 0.5;
  std::uint64_t trials = 500, mv_points = 4096;
  std::string mv_out;
  mv.add("--sigma", mv_sigma, "scale");
  mv.add("--kappa", mv_kappa, "coupling");
  mv.add("--trials", trials, "feasible perturbations");
  mv.add("--points", mv_points, "grid points");
  add_seed(mv);
  mv.add("--out", mv_out, "JSON path")->required();

  Command ev(app, "eval", "Print one value");
  EvalArgs ea;
  ev.app()->add_option("quantity", ea.quantity,
                       "density | survival | quantile | ie-moment | shannon | tsallis | "
                       "normalized-tsallis | coupled-entropy | q-of | kappa-of-q")
      ->required()
      ->check(CLI::IsMember({"density", "survival", "quantile", "ie-moment", "shannon", "tsallis",
                             "normalized-tsallis", "coupled-entropy", "q-of", "kappa-of-q"}));
  ev.add("--family", ea.family, "gpd | weibull | gaussian | stretched")
      ->check(CLI::IsMember({"gpd", "weibull", "gaussian", "stretched"}));
  ev.add("--mu", ea.mu, "location");
  ev.add("--sigma", ea.sigma, "scale");
  ev.add("--kappa", ea.kappa, "coupling");
  ev.add("--alpha", ea.alpha, "stretch exponent");
  ev.add("--dim", ea.dim, "dimension");
  ev.add("--x", ea.x, "evaluation point");
  ev.add("--u", ea.u, "survival level for quantile");
  ev.add("--q", ea.q, "q for kappa-of-q");
  ev.add("--m", ea.m, "moment order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (app.exit(e) == 0) return kExitOk;
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*et.app()) {
      cli::write_output(et_out, entropy_table(kmin, kmax, steps, et_sigma), et.run_info(seed));
    } else if (*sf.app()) {
      cli::write_output(sf_out, scale_family(family, scales, sf_kappa, beta_q, x_max, points),
                        sf.run_info(seed));
    } else if (*sr.app()) {
      cfg.seed = seed;
      const SdeOutputs o = sde_run(cfg, bins, range);
      const RunInfo run = sr.run_info(seed);
      cli::write_output(sr_out, o.csv, run);
      cli::write_output(sr_report.empty() ? sr_out + ".report.json" : sr_report, o.report, run);
    } else if (*mv.app()) {
      cli::write_output(mv_out, maxent_verify(mv_sigma, mv_kappa, trials, seed, mv_points),
                        mv.run_info(seed));
    } else if (*ev.app()) {
      fmt::print("{:#.12g}\n", evaluate(ea));
    }
  } catch (const cli::OutputError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  }
  return kExitOk;
}
