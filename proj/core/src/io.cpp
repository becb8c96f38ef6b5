#include "curvflow/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "curvflow/errors.hpp"
#include "json.hpp"

namespace curvflow::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << contents;
  if (!out) throw FormatError("write failed: " + path.string());
}

std::string checkpoint_json(const RadialProfile& profile, int k, double t, std::uint64_t seed) {
  ordered_json j;
  j["seed"] = seed;
  j["n"] = profile.n();
  j["k"] = k;
  j["t"] = t;
  j["theta"] = profile.theta();
  j["rho"] = profile.rho();
  return j.dump(1) + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
  try {
    const json j = json::parse(text);
    for (const char* key : {"n", "k", "t", "theta", "rho"})
      if (!j.contains(key)) throw FormatError(std::string("checkpoint: missing field '") + key + "'");
    RadialProfile p(j.at("n").get<int>(), j.at("theta").get<std::vector<double>>(),
                    j.at("rho").get<std::vector<double>>());
    return Checkpoint{j.at("k").get<int>(), j.at("t").get<double>(),
                      j.value("seed", std::uint64_t{0}), std::move(p)};
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  } catch (const InvalidProfile& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  return parse_checkpoint(read_file(path));
}

namespace {

std::string header_line(const flow::FlowConfig& c, flow::Termination reason, const std::string& detail) {
  std::ostringstream os;
  os << "# seed=" << c.seed << " n=" << c.n << " k=" << c.k << " N=" << c.N
     << " shape=" << c.initialShape.describe() << " cfl=" << format_double(c.dtPolicy.cflFactor)
     << " dtMax=" << format_double(c.dtPolicy.dtMax) << " tMax=" << format_double(c.tMax)
     << " convTol=" << format_double(c.convergenceTol) << " reason=" << flow::to_string(reason);
  if (!detail.empty()) os << " detail=\"" << detail << '"';
  os << '\n';
  return os.str();
}

void column_header(std::ostream& os, int n) {
  os << 't';
  for (int l = -1; l <= n; ++l) os << ",A_" << l;
  os << ",minU,minRho,maxRho,minF,maxF,minLambda,maxLambda,maxSpeed,violationFlags";
}

void record_row(std::ostream& os, const flow::FlowRecord& r) {
  os << format_double(r.t);
  for (double a : r.A.values()) os << ',' << format_double(a);
  for (double v : {r.minU, r.minRho, r.maxRho, r.minF, r.maxF, r.minLambda, r.maxLambda, r.maxSpeed})
    os << ',' << format_double(v);
  os << ',';
  for (std::size_t i = 0; i < r.violations.size(); ++i) os << (i ? ";" : "") << r.violations[i];
}

}  // namespace

std::string trace_csv(const flow::FlowConfig& config, const flow::FlowTrace& trace) {
  std::ostringstream os;
  os << header_line(config, trace.reason, trace.detail);
  column_header(os, config.n);
  os << '\n';
  for (const auto& r : trace.records) {
    record_row(os, r);
    os << '\n';
  }
  return os.str();
}

std::string dual_trace_csv(const flow::FlowConfig& config, const dual::DualTrace& trace) {
  std::ostringstream os;
  os << header_line(config, trace.reason, trace.detail);
  column_header(os, config.n);
  os << ",minEigW,maxEigW,breakdownTime\n";
  const std::string breakdown = trace.breakdownTime ? format_double(*trace.breakdownTime) : "";
  for (const auto& r : trace.records) {
    record_row(os, r.base);
    os << ',' << format_double(r.minEigW) << ',' << format_double(r.maxEigW) << ',' << breakdown << '\n';
  }
  return os.str();
}

std::string audit_json(const quermass::AuditReport& report, int n, std::uint64_t seed) {
  ordered_json j;
  j["seed"] = seed;
  j["n"] = n;
  j["flowK"] = report.flowK;
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) {
    ordered_json x;
    x["l"] = e.l;
    x["k"] = e.k;
    x["A_l"] = e.Al;
    if (e.error.empty()) {
      x["xi_value"] = e.xiValue;
      x["gap"] = e.gap;
    } else {
      x["xi_value"] = nullptr;
      x["gap"] = nullptr;
      x["error"] = e.error;
    }
    x["proven"] = e.proven;
    x["flagged"] = e.flagged;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j.dump(1) + "\n";
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw FormatError("config: " + where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.count(item.key())) throw FormatError("config: unknown field '" + where + item.key() + "'");
}

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

flow::InitialShape::Kind kind_from(const std::string& s) {
  using K = flow::InitialShape::Kind;
  if (s == "geodesicSphere" || s == "sphere") return K::geodesicSphere;
  if (s == "perturbed") return K::perturbed;
  if (s == "random") return K::random;
  if (s == "custom") return K::custom;
  throw FormatError("config: unknown initialShape kind '" + s + "'");
}

const char* kind_name(flow::InitialShape::Kind k) {
  using K = flow::InitialShape::Kind;
  switch (k) {
    case K::geodesicSphere: return "geodesicSphere";
    case K::perturbed: return "perturbed";
    case K::random: return "random";
    case K::custom: return "custom";
  }
  return "";
}

}  // namespace

void apply_config_json(flow::FlowConfig& c, const std::string& text) {
  try {
    const json j = json::parse(text);
    check_keys(j, {"n", "k", "N", "dtPolicy", "tMax", "convergenceTol", "monitorTolerances", "initialShape",
                   "sampleInterval", "checkpointEvery", "seed"},
               "");
    take(j, "n", c.n);
    take(j, "k", c.k);
    take(j, "N", c.N);
    take(j, "tMax", c.tMax);
    take(j, "convergenceTol", c.convergenceTol);
    take(j, "sampleInterval", c.sampleInterval);
    take(j, "checkpointEvery", c.checkpointEvery);
    take(j, "seed", c.seed);
    if (j.contains("dtPolicy")) {
      const auto& d = j.at("dtPolicy");
      check_keys(d, {"cflFactor", "dtMax"}, "dtPolicy.");
      take(d, "cflFactor", c.dtPolicy.cflFactor);
      take(d, "dtMax", c.dtPolicy.dtMax);
    }
    if (j.contains("monitorTolerances")) {
      const auto& m = j.at("monitorTolerances");
      check_keys(m, {"conservation", "signSlack", "barrierSlack", "fKappa", "blowupThreshold"},
                 "monitorTolerances.");
      auto& t = c.monitorTolerances;
      take(m, "conservation", t.conservation);
      take(m, "signSlack", t.signSlack);
      take(m, "barrierSlack", t.barrierSlack);
      take(m, "fKappa", t.fKappa);
      take(m, "blowupThreshold", t.blowupThreshold);
    }
    if (j.contains("initialShape")) {
      const auto& s = j.at("initialShape");
      if (s.is_string()) {
        c.initialShape = flow::InitialShape::parse(s.get<std::string>());
      } else {
        check_keys(s, {"kind", "r", "eps", "mode", "samples"}, "initialShape.");
        flow::InitialShape shape;
        if (s.contains("kind")) shape.kind = kind_from(s.at("kind").get<std::string>());
        take(s, "r", shape.r);
        take(s, "eps", shape.eps);
        take(s, "mode", shape.mode);
        take(s, "samples", shape.samples);
        c.initialShape = std::move(shape);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
}

flow::FlowConfig config_from_json(const std::string& text) {
  flow::FlowConfig c;
  apply_config_json(c, text);
  return c;
}

std::string config_to_json(const flow::FlowConfig& c) {
  ordered_json j;
  j["n"] = c.n;
  j["k"] = c.k;
  j["N"] = c.N;
  j["dtPolicy"] = {{"cflFactor", c.dtPolicy.cflFactor}, {"dtMax", c.dtPolicy.dtMax}};
  j["tMax"] = c.tMax;
  j["convergenceTol"] = c.convergenceTol;
  const auto& t = c.monitorTolerances;
  j["monitorTolerances"] = {{"conservation", t.conservation},
                            {"signSlack", t.signSlack},
                            {"barrierSlack", t.barrierSlack},
                            {"fKappa", t.fKappa},
                            {"blowupThreshold", t.blowupThreshold}};
  ordered_json s;
  s["kind"] = kind_name(c.initialShape.kind);
  s["r"] = c.initialShape.r;
  s["eps"] = c.initialShape.eps;
  s["mode"] = c.initialShape.mode;
  if (!c.initialShape.samples.empty()) s["samples"] = c.initialShape.samples;
  j["initialShape"] = std::move(s);
  j["sampleInterval"] = c.sampleInterval;
  j["checkpointEvery"] = c.checkpointEvery;
  j["seed"] = c.seed;
  return j.dump(1) + "\n";
}

}  // namespace curvflow::io
