#include "cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "hwm/constructor.hpp"
#include "hwm/dynamics.hpp"
#include "hwm/io.hpp"
#include "hwm/linalg.hpp"
#include "hwm/model.hpp"
#include "hwm/scattering.hpp"
#include "hwm/sobolev.hpp"
#include "hwm/spectral.hpp"

namespace hwm::cli {

namespace {

using io::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitDynamicalEvent = 3;
constexpr int kExitVerifyFailure = 4;

int thread_budget() {
  if (const char* env = std::getenv("HWM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::InvalidInput, "cannot open " + path);
  json j;
  f >> j;
  return j;
}

void emit(const std::string& dir, const std::string& name, const json& j) {
  io::write_file_atomic(dir + "/" + name, j.dump(2) + "\n");
}

// ---------------- construct ----------------

int cmd_construct(const std::string& config_path, const std::string& out_dir, double tol_override) {
  const json cfg = load_json(config_path);
  io::require_keys(cfg, {"targets", "tol", "max_iter"}, "construct config");
  if (!cfg.contains("targets")) fail(ErrorCode::InvalidInput, "construct config needs targets");
  const constructor::Targets targets = io::targets_from_json(cfg["targets"]);
  const double tol = tol_override > 0 ? tol_override : cfg.value("tol", 1e-12);
  const int max_iter = cfg.value("max_iter", 60);

  try {
    const constructor::BuildResult result = constructor::fixpoint(targets, tol, max_iter);
    emit(out_dir, "configuration.json", io::to_json(result.configuration));
    emit(out_dir, "build_report.json", io::to_json(result.report));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoConvergence) {
      std::cerr << e.what() << "\n";
      return kExitNoConvergence;
    }
    throw;
  }
  return kExitOk;
}

// ---------------- simulate ----------------

int cmd_simulate(const std::string& config_path, const std::string& out_dir, double t_end_override,
                 double tol_override) {
  const json cfg = load_json(config_path);
  io::require_keys(cfg, {"configuration", "trajectory"}, "simulate config");
  if (!cfg.contains("configuration"))
    fail(ErrorCode::InvalidInput, "simulate config needs a configuration");
  const model::Configuration configuration = io::configuration_from_json(cfg["configuration"]);
  dynamics::TrajectoryOptions opts;
  if (cfg.contains("trajectory")) opts = io::trajectory_options_from_json(cfg["trajectory"]);
  if (t_end_override != 0.0) opts.t_end = t_end_override;
  if (tol_override > 0) opts.rel_tol = tol_override;

  const dynamics::State initial = dynamics::State::from_configuration(configuration);
  const dynamics::Trajectory traj = dynamics::integrate(initial, configuration.m0, opts);
  io::write_file_atomic(out_dir + "/trajectory.csv", io::trajectory_csv(traj));
  emit(out_dir, "monitor.json", io::to_json(dynamics::monitor_report(traj)));
  if (traj.status == dynamics::TrajectoryStatus::PoleCollision ||
      traj.status == dynamics::TrajectoryStatus::ImaginaryFloor) {
    std::cerr << "integration stopped: " << dynamics::to_string(traj.status) << "\n";
    return kExitDynamicalEvent;
  }
  return kExitOk;
}

// ---------------- analyze ----------------

int cmd_analyze(const std::string& config_path, const std::string& out_dir, double t_end_override,
                double tol_override) {
  const json cfg = load_json(config_path);
  io::require_keys(cfg, {"configuration", "analysis"}, "analyze config");
  if (!cfg.contains("configuration"))
    fail(ErrorCode::InvalidInput, "analyze config needs a configuration");
  const model::Configuration configuration = io::configuration_from_json(cfg["configuration"]);
  json analysis = cfg.value("analysis", json::object());
  io::require_keys(analysis, {"gap_tol", "trajectory", "traveling"}, "analysis");
  const double gap_tol = analysis.value("gap_tol", 1e-9);

  const dynamics::State initial = dynamics::State::from_configuration(configuration);
  json report;
  report["constraints"] = io::to_json(model::constraint_residuals(configuration));
  const scattering::ScatterStats stats = scattering::alpha_stats(initial);
  report["alpha"] = io::to_json(stats);
  if (const auto w = scattering::witness_from_alpha(stats)) {
    report["witness"] = io::to_json(*w);
  } else {
    report["witness"] = nullptr;
  }

  const spectral::ExplicitData expl = spectral::make_explicit(configuration);
  report["sign"] = expl.sign;
  std::optional<scattering::AsymptoticData> asym;
  try {
    asym = scattering::asymptotic_data(expl, gap_tol);
    report["asymptotics"] = io::to_json(*asym);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularSpectrum) throw;
    report["asymptotics"] = nullptr;
    report["singular_spectrum"] = true;
  }

  std::optional<dynamics::Trajectory> traj;
  if (analysis.contains("trajectory")) {
    dynamics::TrajectoryOptions opts = io::trajectory_options_from_json(analysis["trajectory"]);
    if (t_end_override != 0.0) opts.t_end = t_end_override;
    if (tol_override > 0) opts.rel_tol = tol_override;
    traj = dynamics::integrate(initial, configuration.m0, opts);
    report["monitor"] = io::to_json(dynamics::monitor_report(*traj));
    if (report.contains("witness") && !report["witness"].is_null()) {
      const auto w = scattering::witness_from_alpha(stats);
      report["bounds"] = io::to_json(scattering::bounds_check(*traj, *w, initial));
    }
    if (asym) report["convergence"] = io::to_json(scattering::convergence_metrics(*traj, *asym, configuration.m0));
  }
  if (analysis.value("traveling", true)) {
    if (!traj) {
      dynamics::TrajectoryOptions opts;
      opts.t_end = t_end_override != 0.0 ? t_end_override : 2.0;
      opts.sample_stride = opts.t_end / 20.0;
      traj = dynamics::integrate(initial, configuration.m0, opts);
    }
    report["traveling"] = io::to_json(scattering::traveling_report(*traj));
  }

  emit(out_dir, "report.json", report);
  if (traj && (traj->status == dynamics::TrajectoryStatus::PoleCollision ||
               traj->status == dynamics::TrajectoryStatus::ImaginaryFloor))
    return kExitDynamicalEvent;
  return kExitOk;
}

// ---------------- verify ----------------

struct SuiteResult {
  std::string name;
  int checks = 0;
  std::vector<std::string> failures;
};

Vec3c random_spin(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return Vec3c(cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)));
}

void check(SuiteResult& r, bool ok, const std::string& what) {
  ++r.checks;
  if (!ok) r.failures.push_back(what);
}

SuiteResult suite_pauli(uint64_t seed) {
  SuiteResult r{"pauli"};
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 200; ++i) {
    const Vec3c s = random_spin(rng), t = random_spin(rng);
    const CMatrix a = model::to_pauli(s), b = model::to_pauli(t);
    const CMatrix lhs = a * b;
    const CMatrix rhs = bdot(s, t) * CMatrix::Identity(2, 2) +
                        cplx(0, 1) * model::to_pauli(cross(s, t));
    check(r, max_abs(lhs - rhs) <= 1e-12 * std::max(1.0, max_abs(lhs)),
          "product identity violated");
    check(r, std::abs((a * b).trace() - 2.0 * bdot(s, t)) <= 1e-12 * std::max(1.0, max_abs(a * b)),
          "trace identity violated");
    const Vec3c back = model::from_pauli(a);
    check(r, norm(Vec3c(back - s)) <= 1e-13 * std::max(1.0, norm(s)), "round trip drifted");
  }
  return r;
}

SuiteResult suite_cauchy(uint64_t seed) {
  SuiteResult r{"cauchy"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<cplx> a(n), b(n);
    bool ok = false;
    while (!ok) {
      for (auto& z : a) z = cplx(u(rng), u(rng));
      for (auto& z : b) z = cplx(u(rng), u(rng));
      ok = true;
      for (int i = 0; i < n && ok; ++i)
        for (int j = 0; j < n && ok; ++j) {
          if (std::abs(a[i] + b[j]) < 1e-3) ok = false;
          if (i < j && (std::abs(a[i] - a[j]) < 1e-3 || std::abs(b[i] - b[j]) < 1e-3)) ok = false;
        }
    }
    CMatrix c(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) c(i, j) = 1.0 / (a[i] + b[j]);
    const CMatrix inv = linalg::cauchy_inverse(a, b);
    check(r, max_abs(c * inv - CMatrix::Identity(n, n)) <= 1e-10, "C*inv(C) far from identity");
  }
  return r;
}

SuiteResult suite_gershgorin(uint64_t seed) {
  SuiteResult r{"gershgorin"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx(u(rng), u(rng));
    const auto discs = linalg::gershgorin(m);
    for (const cplx lambda : linalg::eigvals(m)) {
      bool inside = false;
      for (const auto& d : discs) inside = inside || std::abs(lambda - d.center) <= d.radius + 1e-12;
      check(r, inside, "eigenvalue escaped the disc union");
    }
  }
  return r;
}

constructor::BuildResult build_two_soliton(uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.3, 0.8);
  constructor::Targets t;
  const double w = u(rng);
  t.w = {-w, u(rng)};
  t.epsilon = 0.01;
  t.spacing = 1200.0;
  return constructor::fixpoint(t);
}

SuiteResult suite_isospectral(uint64_t base_seed, int n_seeds, bool sabotage) {
  SuiteResult r{"isospectral"};
  std::mutex mu;
  std::atomic<int> next{0};
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < n_seeds; i = next.fetch_add(1)) {
      const auto built = build_two_soliton(base_seed + i);
      const auto initial = dynamics::State::from_configuration(built.configuration);
      dynamics::TrajectoryOptions opts;
      opts.t_end = 5.0;
      opts.sample_stride = 1.0;
      opts.rel_tol = 1e-11;
      const auto traj = dynamics::integrate(initial, built.configuration.m0, opts);
      auto series = spectral::lax_series(traj);
      if (sabotage)  // negative control: break one off-diagonal sign mid-series
        series.back().L(0, 1) = -series.back().L(0, 1);
      const CVector ref = linalg::eigvals(series.front().L);
      double drift = 0.0;
      for (const auto& lax : series)
        drift = std::max(drift, (linalg::eigvals(lax.L) - ref).cwiseAbs().maxCoeff());
      std::lock_guard<std::mutex> lock(mu);
      check(r, drift <= 1e-7, "isospectrality drift " + io::format_double(drift) + " at seed " +
                                  std::to_string(base_seed + i));
    }
  };
  std::vector<std::future<void>> futures;
  const int workers = std::min(thread_budget(), n_seeds);
  for (int i = 0; i < workers; ++i) futures.push_back(std::async(std::launch::async, work));
  for (auto& f : futures) f.get();
  return r;
}

SuiteResult suite_sobolev(uint64_t seed) {
  SuiteResult r{"sobolev"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::uniform_real_distribution<double> im(0.1, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    sobolev::RationalProfile prof;
    const int n = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < n; ++j)
      prof.terms.push_back({random_spin(rng), cplx(u(rng), im(rng))});
    for (const sobolev::NormKind kind :
         {sobolev::NormKind(sobolev::L2Kind{}), sobolev::NormKind(sobolev::HalfDotKind{}),
          sobolev::NormKind(sobolev::HkKind{1 + static_cast<int>(rng() % 3)})}) {
      const double closed = sobolev::closed_norm(prof, kind);
      const double oracle = sobolev::quadrature_oracle(prof, kind, 1e-10);
      check(r, std::abs(closed - oracle) <= 1e-7 * std::max(1.0, std::abs(closed)),
            "closed/oracle disagreement " + io::format_double(closed - oracle));
    }
  }
  return r;
}

SuiteResult suite_constraints(uint64_t seed) {
  SuiteResult r{"constraints"};
  const auto built = build_two_soliton(seed);
  const auto initial = dynamics::State::from_configuration(built.configuration);
  dynamics::TrajectoryOptions opts;
  opts.t_end = 10.0;
  opts.sample_stride = 1.0;
  const auto traj = dynamics::integrate(initial, built.configuration.m0, opts);
  const auto summary = dynamics::monitor_report(traj);
  check(r, summary.max_constraint_residual <= 1e-8,
        "constraint drift " + io::format_double(summary.max_constraint_residual));
  return r;
}

int cmd_verify(const std::string& selector, uint64_t seed, const std::string& out_dir) {
  std::vector<SuiteResult> results;
  const bool all = selector == "all";
  if (all || selector == "pauli") results.push_back(suite_pauli(seed));
  if (all || selector == "cauchy") results.push_back(suite_cauchy(seed));
  if (all || selector == "gershgorin") results.push_back(suite_gershgorin(seed));
  if (all || selector == "isospectral") results.push_back(suite_isospectral(seed, 10, false));
  if (all || selector == "sobolev") results.push_back(suite_sobolev(seed));
  if (all || selector == "constraints") results.push_back(suite_constraints(seed));
  if (selector == "negative-control") {
    SuiteResult nc = suite_isospectral(seed, 2, true);
    SuiteResult wrapped{"negative-control"};
    check(wrapped, !nc.failures.empty(), "sign-flipped Lax matrix was not detected");
    results.push_back(wrapped);
  }
  if (results.empty()) {
    std::cerr << "unknown suite '" << selector << "'\n";
    return kExitInput;
  }

  json summary;
  summary["suites"] = json::array();
  bool any_failure = false;
  for (const auto& r : results) {
    json s;
    s["name"] = r.name;
    s["checks"] = r.checks;
    s["failures"] = r.failures;
    summary["suites"].push_back(s);
    any_failure = any_failure || !r.failures.empty();
    std::cout << (r.failures.empty() ? "PASS " : "FAIL ") << r.name << " (" << r.checks
              << " checks, " << r.failures.size() << " failures)\n";
  }
  summary["ok"] = !any_failure;
  if (!out_dir.empty()) emit(out_dir, "verify.json", summary);
  std::cout << summary.dump(2) << "\n";
  return any_failure ? kExitVerifyFailure : kExitOk;
}

}  // namespace

int run(std::vector<std::string> args) {
  CLI::App app{"rational half-wave-maps laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", suite = "all";
  uint64_t seed = 1;
  double t_end = 0.0, tol = 0.0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) cmd->add_option("--config", config_path, "input JSON")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "rng seed");
    cmd->add_option("--t-end", t_end, "override end time");
    cmd->add_option("--tol", tol, "override tolerance");
  };

  CLI::App* construct = app.add_subcommand("construct", "build N-soliton initial data");
  add_common(construct, true);
  CLI::App* simulate = app.add_subcommand("simulate", "integrate the spin/pole system");
  add_common(simulate, true);
  CLI::App* analyze = app.add_subcommand("analyze", "scattering / traveling analysis");
  add_common(analyze, true);
  CLI::App* verify = app.add_subcommand("verify", "run invariant suites");
  verify->add_option("suite", suite, "suite selector");
  add_common(verify, false);

  std::vector<const char*> argv;
  argv.push_back("hwm");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (construct->parsed()) return cmd_construct(config_path, out_dir, tol);
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, t_end, tol);
    if (analyze->parsed()) return cmd_analyze(config_path, out_dir, t_end, tol);
    if (verify->parsed()) return cmd_verify(suite, seed, out_dir);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    if (e.code() == ErrorCode::NoConvergence) return kExitNoConvergence;
    if (e.code() == ErrorCode::PoleCollision) return kExitDynamicalEvent;
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace hwm::cli
