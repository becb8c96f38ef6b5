#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "curvflow/dualflow.hpp"
#include "curvflow/errors.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/hypersurface.hpp"
#include "curvflow/identity_suite.hpp"
#include "curvflow/io.hpp"
#include "curvflow/quermass.hpp"
#include "json.hpp"

namespace curvflow::cli {

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FlowFlags {
  int n = 0, k = 0;
  std::size_t N = 0;
  std::string shape;
  double dtMax = 0, cfl = 0, tMax = 0, convTol = 0, checkpointEvery = 0, sampleInterval = 0;
  std::uint64_t seed = 0;
  std::string config;
  std::string out = "out";
  std::string sweep;

  std::vector<std::pair<CLI::Option*, std::function<void(flow::FlowConfig&)>>> overlays;
};

void add_flow_flags(CLI::App* app, FlowFlags& f, bool withSweep) {
  auto over = [&](CLI::Option* o, std::function<void(flow::FlowConfig&)> apply) {
    f.overlays.emplace_back(o, std::move(apply));
  };
  over(app->add_option("--n", f.n, "hypersurface dimension"), [&f](auto& c) { c.n = f.n; });
  over(app->add_option("--k", f.k, "flow index, 0 <= k <= n-1"), [&f](auto& c) { c.k = f.k; });
  over(app->add_option("--N", f.N, "polar grid nodes"), [&f](auto& c) { c.N = f.N; });
  over(app->add_option("--shape", f.shape, "sphere:R | perturbed:R0,EPS,M | random:R0,EPS,MODES"),
       [&f](auto& c) { c.initialShape = flow::InitialShape::parse(f.shape); });
  over(app->add_option("--dt-max", f.dtMax, "largest time step"), [&f](auto& c) { c.dtPolicy.dtMax = f.dtMax; });
  over(app->add_option("--cfl", f.cfl, "step factor in (0, 1]"), [&f](auto& c) { c.dtPolicy.cflFactor = f.cfl; });
  over(app->add_option("--t-max", f.tMax, "final time"), [&f](auto& c) { c.tMax = f.tMax; });
  over(app->add_option("--conv-tol", f.convTol, "stop when max |f| falls below this"),
       [&f](auto& c) { c.convergenceTol = f.convTol; });
  over(app->add_option("--checkpoint-every", f.checkpointEvery, "checkpoint interval in t (0: final only)"),
       [&f](auto& c) { c.checkpointEvery = f.checkpointEvery; });
  over(app->add_option("--sample-interval", f.sampleInterval, "trace sampling interval in t"),
       [&f](auto& c) { c.sampleInterval = f.sampleInterval; });
  over(app->add_option("--seed", f.seed, "seed for randomized shapes"), [&f](auto& c) { c.seed = f.seed; });
  app->add_option("--config", f.config, "JSON config (FlowConfig field names); flags override it");
  app->add_option("--out", f.out, "output directory")->capture_default_str();
  if (withSweep)
    app->add_option("--sweep", f.sweep,
                    "JSON array of config overlays; runs them concurrently into OUT/sweep_NNN");
}

flow::FlowConfig resolve_config(const FlowFlags& f) {
  flow::FlowConfig c;
  try {
    if (!f.config.empty()) io::apply_config_json(c, io::read_file(f.config));
    for (const auto& [opt, apply] : f.overlays)
      if (opt->count() > 0) apply(c);
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  }
  return c;
}

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

std::string checkpoint_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "checkpoint_t%012.6f.json", t);
  return buf;
}

// One primal or dual run into `dir`; returns the summary line.
std::string execute(const flow::FlowConfig& c, const fs::path& dir, bool dual) {
  fs::create_directories(dir);
  io::write_file(dir / "config.json", io::config_to_json(c));
  std::ostringstream os;
  try {
    if (!dual) {
      auto sink = [&](const RadialProfile& p, double t) {
        io::write_file(dir / checkpoint_name(t), io::checkpoint_json(p, c.k, t, c.seed));
      };
      const auto result = flow::run(c, sink);
      const auto& tr = result.trace;
      io::write_file(dir / "trace.csv", io::trace_csv(c, tr));
      io::write_file(dir / "final.json", io::checkpoint_json(result.finalProfile, c.k, tr.finalTime, c.seed));
      const auto& last = tr.records.back();
      os << "run: " << flow::to_string(tr.reason) << " t=" << fmt("%.6g", tr.finalTime)
         << " steps=" << tr.acceptedSteps << " rejected=" << tr.rejectedSteps
         << " violations=" << tr.total_violations() << " drift=" << fmt("%.3e", tr.maxConservationDrift)
         << " spread=" << fmt("%.3e", last.maxRho - last.minRho) << " seed=" << c.seed;
      if (!tr.detail.empty()) os << " (" << tr.detail << ")";
    } else {
      const auto result = dual::dual_run(c);
      const auto& tr = result.trace;
      io::write_file(dir / "dual_trace.csv", io::dual_trace_csv(c, tr));
      io::write_file(dir / "final.json",
                     io::checkpoint_json(dual::export_profile(result.finalState, c.N), c.k, tr.finalTime, c.seed));
      std::size_t violations = 0;
      for (const auto& [code, count] : tr.violationCounts) violations += count;
      os << "dual-run: " << flow::to_string(tr.reason) << " t=" << fmt("%.6g", tr.finalTime)
         << " steps=" << tr.acceptedSteps << " rejected=" << tr.rejectedSteps << " violations=" << violations
         << " minEigW=" << fmt("%.6g", tr.minWMargin) << " breakdown="
         << (tr.breakdownTime ? fmt("%.6g", *tr.breakdownTime) : std::string("none")) << " seed=" << c.seed;
      if (!tr.detail.empty()) os << " (" << tr.detail << ")";
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return os.str();
}

int run_command(const FlowFlags& f, bool dual, std::ostream& out, std::ostream& err) {
  const flow::FlowConfig base = resolve_config(f);
  if (f.sweep.empty()) {
    out << execute(base, f.out, dual) << '\n';
    return kOk;
  }

  std::vector<flow::FlowConfig> configs;
  try {
    const auto doc = nlohmann::json::parse(io::read_file(f.sweep));
    if (!doc.is_array() || doc.empty()) throw UsageError("sweep: expected a non-empty JSON array");
    for (const auto& item : doc) {
      flow::FlowConfig c = base;
      io::apply_config_json(c, item.dump());
      c.validate();
      configs.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("sweep: ") + e.what());
  } catch (const io::FormatError& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  // independent runs, each into its own subdirectory
  std::vector<std::string> summaries(configs.size());
  std::vector<int> codes(configs.size(), kOk);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < configs.size();) {
      char name[32];
      std::snprintf(name, sizeof name, "sweep_%03zu", i);
      try {
        summaries[i] = std::string(name) + " " + execute(configs[i], fs::path(f.out) / name, dual);
      } catch (const std::exception& e) {
        summaries[i] = std::string(name) + " error: " + e.what();
        codes[i] = kUsage;
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(configs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();

  int code = kOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    (codes[i] == kOk ? out : err) << summaries[i] << '\n';
    code = std::max(code, codes[i]);
  }
  return code;
}

int audit_command(const std::string& checkpoint, std::optional<int> k, std::optional<std::uint64_t> seed,
                  const std::string& outPath, std::ostream& out) {
  io::Checkpoint cp = [&] {
    try {
      return io::read_checkpoint(checkpoint);
    } catch (const io::FormatError& e) {
      throw UsageError(e.what());
    }
  }();
  const int flowK = k.value_or(cp.k);
  if (flowK < 0 || flowK > cp.profile.n() - 1) throw UsageError("audit: k must lie in [0, n-1]");
  const auto state = hypersurface::geometry(cp.profile, flowK);
  const auto q = quermass::quermass_vector(state, cp.profile);
  const auto report = quermass::audit_inequalities(q, flowK);
  const std::string doc = io::audit_json(report, cp.profile.n(), seed.value_or(cp.seed));
  if (outPath.empty())
    out << doc;
  else
    io::write_file(outPath, doc);
  return kOk;
}

int identity_command(const identity::SuiteConfig& cfg, const std::string& outPath, std::ostream& out) {
  identity::SuiteReport report;
  try {
    report = identity::run_suite(cfg);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::ostringstream os;
  os << "# seed=" << cfg.seed << " n=" << cfg.nMin << ".." << cfg.nMax << " samples=" << cfg.samples << '\n';
  os << identity::summarize(report);
  os << (report.passed() ? "PASS" : "FAIL") << " identity-suite failures=" << report.total_failures() << '\n';
  if (!outPath.empty()) io::write_file(outPath, os.str());
  out << os.str();
  return report.passed() ? kOk : kInvariantViolation;
}

std::vector<std::size_t> parse_levels(const std::string& text) {
  std::vector<std::size_t> levels;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 9) throw std::invalid_argument(item);
      levels.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError("levels: expected comma-separated grid sizes >= 9, got '" + text + "'");
    }
  }
  if (levels.size() < 2) throw UsageError("levels: need at least two grid sizes");
  return levels;
}

int convergence_command(const FlowFlags& f, const std::string& levelText, std::ostream& out) {
  const flow::FlowConfig base = resolve_config(f);
  const auto levels = parse_levels(levelText);
  const int n = base.n, k = base.k;

  struct Row {
    std::size_t N;
    double h, dt;
    std::vector<double> minkowski;
    double u, F, functional, decomposition, transport;
  };
  std::vector<Row> rows;
  try {
    for (std::size_t N : levels) {
      flow::FlowConfig c = base;
      c.N = N;
      const auto p = flow::initial_profile(c);
      const auto s = hypersurface::geometry(p, k);
      Row r{N, p.spacing(), 0.5 * flow::stable_dt(s, {c.dtPolicy.cflFactor, 1.0}), {}, 0, 0, 0, 0, 0};
      for (int m = 0; m <= n - 1; ++m) r.minkowski.push_back(hypersurface::minkowski_residual(s, m));
      const auto next = flow::step(p, r.dt, k, hypersurface::PoleRule::operatorLimit);
      const auto ev = flow::evolution_residuals(p, next, r.dt, k);
      r.u = ev.u;
      r.F = ev.F;
      r.functional = flow::functional_derivative_residual(p, next, r.dt, k);
      r.decomposition = dual::decomposition_residual(p);
      r.transport = dual::speed_transport_residual(p, k, N);
      rows.push_back(std::move(r));
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  auto order = [&](std::size_t i, auto get) -> std::string {
    if (i == 0) return "";
    const double a = get(rows[i - 1]), b = get(rows[i]);
    return io::format_double(std::log(a / b) / std::log(rows[i - 1].h / rows[i].h));
  };
  std::ostringstream os;
  os << "# seed=" << base.seed << " n=" << n << " k=" << k << " shape=" << base.initialShape.describe()
     << " cfl=" << io::format_double(base.dtPolicy.cflFactor) << " dt=0.5*stable\n";
  os << "N,h,dt";
  for (int m = 0; m <= n - 1; ++m) os << ",minkowski_" << m << ",order_minkowski_" << m;
  os << ",residual_u,order_u,residual_F,order_F,functional_derivative,order_functional_derivative"
        ",decomposition,speed_transport,order_speed_transport\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << r.N << ',' << io::format_double(r.h) << ',' << io::format_double(r.dt);
    for (int m = 0; m <= n - 1; ++m)
      os << ',' << io::format_double(r.minkowski[m]) << ','
         << order(i, [m](const Row& x) { return x.minkowski[m]; });
    os << ',' << io::format_double(r.u) << ',' << order(i, [](const Row& x) { return x.u; }) << ','
       << io::format_double(r.F) << ',' << order(i, [](const Row& x) { return x.F; }) << ','
       << io::format_double(r.functional) << ',' << order(i, [](const Row& x) { return x.functional; })
       << ',' << io::format_double(r.decomposition) << ',' << io::format_double(r.transport) << ','
       << order(i, [](const Row& x) { return x.transport; }) << '\n';
  }
  fs::create_directories(f.out);
  io::write_file(fs::path(f.out) / "convergence.csv", os.str());
  out << os.str();
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"curvflow: constrained curvature flow laboratory"};
  app.require_subcommand(1);

  FlowFlags runFlags, dualFlags, studyFlags;
  auto* run = app.add_subcommand("run", "evolve a radial graph; writes trace.csv and checkpoints");
  add_flow_flags(run, runFlags, true);
  auto* dualRun = app.add_subcommand("dual-run", "evolve the Euclidean support function; writes dual_trace.csv");
  add_flow_flags(dualRun, dualFlags, true);

  auto* audit = app.add_subcommand("audit", "quermassintegral inequality report for a checkpoint");
  std::string auditCheckpoint, auditOut;
  int auditK = 0;
  std::uint64_t auditSeed = 0;
  audit->add_option("--checkpoint", auditCheckpoint, "checkpoint JSON")->required();
  auto* auditKOpt = audit->add_option("--k", auditK, "flow index (default: from the checkpoint)");
  auto* auditSeedOpt = audit->add_option("--seed", auditSeed, "seed recorded in the report");
  audit->add_option("--out", auditOut, "report file (default: stdout)");

  auto* ids = app.add_subcommand("identity-suite", "randomized symmetric-function property suite");
  identity::SuiteConfig suite;
  std::string suiteOut;
  ids->add_option("--n-min", suite.nMin)->capture_default_str();
  ids->add_option("--n-max", suite.nMax)->capture_default_str();
  ids->add_option("--samples", suite.samples)->capture_default_str();
  ids->add_option("--seed", suite.seed)->capture_default_str();
  ids->add_option("--rel-tol", suite.relTol, "tolerance for polynomial identities")->capture_default_str();
  ids->add_option("--quotient-tol", suite.quotientTol, "tolerance for quotient quantities")
      ->capture_default_str();
  ids->add_option("--out", suiteOut, "report file");

  auto* study = app.add_subcommand("convergence-study", "residual orders under joint h, dt refinement");
  add_flow_flags(study, studyFlags, false);
  std::string levels = "65,129,257";
  study->add_option("--levels", levels, "comma-separated grid sizes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return kUsage;
  }

  try {
    if (run->parsed()) return run_command(runFlags, false, out, err);
    if (dualRun->parsed()) return run_command(dualFlags, true, out, err);
    if (audit->parsed())
      return audit_command(auditCheckpoint, auditKOpt->count() ? std::optional<int>(auditK) : std::nullopt,
                           auditSeedOpt->count() ? std::optional<std::uint64_t>(auditSeed) : std::nullopt,
                           auditOut, out);
    if (ids->parsed()) return identity_command(suite, suiteOut, out);
    if (study->parsed()) return convergence_command(studyFlags, levels, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io::FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConeViolation& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace curvflow::cli
