#pragma once

// Serialization: profile checkpoints, trace CSVs, audit reports and the
// FlowConfig JSON schema. Every writer takes the run seed and puts it in the
// header (a leading comment line for CSV, a top-level field for JSON). Reals are
// written so they read back bit-for-bit.

#include <cstdint>
#include <filesystem>
#include <string>

#include "curvflow/dualflow.hpp"
#include "curvflow/flow.hpp"
#include "curvflow/profile.hpp"
#include "curvflow/quermass.hpp"

namespace curvflow::io {

/// Malformed input file or document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  int k = 0;
  double t = 0.0;
  std::uint64_t seed = 0;
  RadialProfile profile;
};

/// {"n","k","t","seed","theta":[...],"rho":[...]}.
std::string checkpoint_json(const RadialProfile& profile, int k, double t, std::uint64_t seed);
Checkpoint parse_checkpoint(const std::string& text);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// "# seed=S n=N k=K shape=... N=... reason=..." then the column header and
/// one row per record.
std::string trace_csv(const flow::FlowConfig& config, const flow::FlowTrace& trace);
/// Same schema plus minEigW, maxEigW and breakdownTime (empty if none; set on
/// every row otherwise).
std::string dual_trace_csv(const flow::FlowConfig& config, const dual::DualTrace& trace);

/// {"seed", "n", "flowK", "entries": [{l, k, A_l, xi_value, gap, ...}]}.
std::string audit_json(const quermass::AuditReport& report, int n, std::uint64_t seed);

/// Field names mirror FlowConfig. Missing fields keep their defaults; unknown
/// fields are an error. initialShape is either an object
/// {"kind","r","eps","mode","samples"} or the shorthand string of
/// InitialShape::parse.
flow::FlowConfig config_from_json(const std::string& text);
/// Overlay a JSON document onto an existing config.
void apply_config_json(flow::FlowConfig& config, const std::string& text);
std::string config_to_json(const flow::FlowConfig& config);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

}  // namespace curvflow::io
