#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "unwind/markov.hpp"
#include "unwind/models.hpp"

namespace unwind {

enum class ModelKind { SpinChain, ConvexMixture };

struct MixtureParams {
  Pauli first = Pauli::X;
  Pauli second = Pauli::Y;
  double lambda = 0.5;
  double inv_period = 1.0;
};

struct Axis {
  std::string name;  // E, omega, w, inv_T, gamma, lambda
  double min = 0.0;
  double max = 1.0;
  int count = 1;

  double value(int index) const;
};

struct Numerics {
  int n_steps = 2048;
  int n_t = 256;
  double tol_ccp = -1.0;  // negative: 1e-9 * d
  double tol_pair = 1e-7;
  double cond_max = 1e10;
  int x_cap = 64;
};

struct SweepConfig {
  ModelKind model = ModelKind::SpinChain;
  SpinChainParams chain;
  MixtureParams mixture;
  Axis axis1;
  Axis axis2;
  bool principal = false;
  bool unwound = false;
  std::optional<ModifiedParams> modified;
  std::optional<StandardParams> standard;
  Numerics numerics;
  std::string output_path;
  std::string format = "csv";
  int workers = 1;
  bool record_timing = true;
  nlohmann::json source;  // normalized input, hashed into the output header
};

/// Throws Error(ConfigInvalid) on schema or range violations.
SweepConfig parse_config(const nlohmann::json& doc);
SweepConfig load_config(const std::string& path);

/// FNV-1a over the normalized config document.
std::uint64_t config_hash(const SweepConfig& config);

/// Model parameters at grid point (i, j): the base model with axis1 = value(i)
/// and axis2 = value(j) applied.
struct PointParams {
  SpinChainParams chain;
  MixtureParams mixture;
  double period = 0.0;
};
PointParams point_params(const SweepConfig& config, int i, int j);

SampledMap build_sampled_map(const SweepConfig& config, const PointParams& params);
EvaluationConfig evaluation_config(const SweepConfig& config);

struct PointRecord {
  int idx1 = 0;
  int idx2 = 0;
  double value1 = 0.0;
  double value2 = 0.0;
  int n_c = 0;
  PointStatus status = PointStatus::Ok;
  std::string message;
  std::vector<MethodResult> methods;
  double mu_min = 0.0;
  double nu_min = 0.0;
  BranchVector best_branch;
  double seconds = 0.0;
};

PointRecord evaluate_grid_point(const SweepConfig& config, int i, int j);

/// Worker count: UNWIND_WORKERS when set, else config.workers (0 = hardware).
int resolve_workers(const SweepConfig& config);

/// Evaluates every grid point; the result is in row-major order (axis1 index
/// outer) regardless of worker count.
std::vector<PointRecord> run_grid(const SweepConfig& config, int workers);

const std::vector<std::string>& csv_columns(const SweepConfig& config);
void write_csv_header(std::ostream& out, const SweepConfig& config, const std::string& timestamp);
void write_csv_row(std::ostream& out, const PointRecord& record);

/// Post-pass: every ok row's mu_min equals the minimum of its method columns.
bool records_consistent(const std::vector<PointRecord>& records);

/// Runs the sweep and writes config.output_path. Returns 0, or 3 when every
/// point failed.
int run_sweep(const SweepConfig& config);

/// Diagnostic document for one grid point. Throws IndexOutOfRange.
nlohmann::json point_report(const SweepConfig& config, int i, int j, std::size_t max_candidates = 5000);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace unwind
