#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "unwind/branching.hpp"
#include "unwind/numkernel.hpp"
#include "unwind/propagate.hpp"

namespace unwind {

/// (1 - Sigma) choi(S) (1 - Sigma), Hermitized. Throws NotHermiticityPreserving
/// when the anti-Hermitian part of choi(S) exceeds tol_herm relative to
/// max(1, |choi(S)|_max).
Matrix ccp_matrix(const Matrix& s, double tol_herm = 1e-6);

struct CcpResult {
  bool ccp = false;
  double min_eigenvalue = 0.0;
};

inline double default_tol_ccp(Eigen::Index d) { return 1e-9 * static_cast<double>(d); }

/// Conditional complete positivity: min eigenvalue of ccp_matrix >= -tol_ccp.
/// A negative tol_ccp selects default_tol_ccp(d).
CcpResult ccp_check(const Matrix& s, double tol_ccp = -1.0);

/// Distance from Markovianity of one generator, max(0, -d * lambda_min).
/// Adding chi Z shifts the (1 - Sigma)-restricted Choi spectrum by chi / d.
double mu_branch(const Matrix& s);
double mu_from_min_eigenvalue(double min_eigenvalue, Eigen::Index d);

/// Trace norm of ccp_matrix(S): zero exactly for pure commutators.
double nu_branch(const Matrix& s);

/// mu, nu and the CCP eigenvalue from a single Hermitian diagonalization.
struct CandidateScore {
  double mu = 0.0;
  double nu = 0.0;
  double ccp_min_eigenvalue = 0.0;
};
CandidateScore score_generator(const Matrix& s);

enum class Method { Principal, Unwound, Modified, Standard };
std::string_view to_string(Method m);

enum class PointStatus {
  Ok,
  NonDiagonalizable,
  NegativeRealEigenvalue,
  NotInvertible,
  SingularEigenvalue,
  UnmatchedPair,
  Failed,
};
std::string_view to_string(PointStatus s);
PointStatus status_from_error(ErrorCode code);

struct ModifiedParams {
  double eta = 0.7;
  int n_b = 2;
  double budget = 1e7;
};

struct StandardParams {
  int radius = 1;
  double budget = 1e7;
};

struct EvaluationConfig {
  bool principal = true;
  bool unwound = true;
  std::optional<ModifiedParams> modified;
  std::optional<StandardParams> standard;
  SpectrumTolerances spectrum;
  double tol_ccp = -1.0;  // negative selects 1e-9 * d
  int x_cap = 64;
  bool keep_candidates = false;
  /// Invoked with every generator that gets scored.
  std::function<void(const GeneratorCandidate&)> observer;
};

struct MethodResult {
  Method method = Method::Principal;
  bool evaluated = false;      // false when the candidate set overflowed its budget
  std::string note;
  double mu = 0.0;
  double nu = 0.0;
  double ccp_min_eigenvalue = 0.0;
  std::uint64_t cardinality = 0;
  BranchVector best_branch;
};

struct CandidateRecord {
  Method method;
  BranchVector branch;
  CandidateScore score;
};

struct MarkovianityReport {
  PointStatus status = PointStatus::Ok;
  std::string message;
  Eigen::Index d = 0;
  int n_c = 0;
  double tol_ccp = 0.0;
  std::vector<MethodResult> methods;

  // Overall minimum over every evaluated method.
  double mu = 0.0;
  double nu = 0.0;
  double ccp_min_eigenvalue = 0.0;
  BranchVector best_branch;
  std::uint64_t candidates_tested = 0;

  // Diagnostics.
  std::optional<ChannelSpectrum> spectrum;
  std::optional<FourierProfile> profile;
  BranchVector x_max;
  double mu_unwound_only = 0.0;  // mu of S_unf alone
  std::vector<int> z;
  int n_tilde = 0;
  std::vector<CandidateRecord> candidates;

  bool ok() const { return status == PointStatus::Ok; }
  /// mu within the CCP tolerance band: equivalent to the best candidate
  /// passing ccp_check.
  bool lindbladian() const { return ok() && ccp_min_eigenvalue >= -tol_ccp; }
  const MethodResult* find(Method m) const;
};

MarkovianityReport evaluate_point(const SampledMap& sampled, const EvaluationConfig& config);

}  // namespace unwind
