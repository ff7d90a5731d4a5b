#include "unwind/markov.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "unwind/superop.hpp"

namespace unwind {

Matrix ccp_matrix(const Matrix& s, double tol_herm) {
  const Eigen::Index d = superop_dim(s);
  const Matrix c = choi(s);
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.adjoint()).cwiseAbs().maxCoeff() > tol_herm * scale)
    throw Error(ErrorCode::NotHermiticityPreserving, "Choi matrix is not Hermitian");
  const Matrix ch = 0.5 * (c + c.adjoint());

  // (1 - w w^dag) C (1 - w w^dag) with w = vec(1)/sqrt(d).
  const Vector w = vec(Matrix::Identity(d, d)) / std::sqrt(static_cast<double>(d));
  const Vector u = ch * w;
  const cplx a = w.dot(u);
  Matrix m = ch - w * u.adjoint() - u * w.adjoint() + a * (w * w.adjoint());
  return 0.5 * (m + m.adjoint());
}

namespace {

RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NotHermitian, "Hermitian eigensolver did not converge");
  return solver.eigenvalues();
}

}  // namespace

CcpResult ccp_check(const Matrix& s, double tol_ccp) {
  const Eigen::Index d = superop_dim(s);
  if (tol_ccp < 0.0) tol_ccp = default_tol_ccp(d);
  const double lmin = hermitian_eigenvalues(ccp_matrix(s))(0);
  return {lmin >= -tol_ccp, lmin};
}

double mu_from_min_eigenvalue(double min_eigenvalue, Eigen::Index d) {
  return std::max(0.0, -static_cast<double>(d) * min_eigenvalue);
}

double mu_branch(const Matrix& s) {
  const Eigen::Index d = superop_dim(s);
  return mu_from_min_eigenvalue(hermitian_eigenvalues(ccp_matrix(s))(0), d);
}

double nu_branch(const Matrix& s) {
  return trace_norm(ccp_matrix(s));
}

CandidateScore score_generator(const Matrix& s) {
  const Eigen::Index d = superop_dim(s);
  const RealVector ev = hermitian_eigenvalues(ccp_matrix(s));
  CandidateScore score;
  score.ccp_min_eigenvalue = ev(0);
  score.mu = mu_from_min_eigenvalue(ev(0), d);
  score.nu = ev.cwiseAbs().sum();
  return score;
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Principal: return "principal";
    case Method::Unwound: return "unwound";
    case Method::Modified: return "modified";
    case Method::Standard: return "standard";
  }
  return "unknown";
}

std::string_view to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Ok: return "ok";
    case PointStatus::NonDiagonalizable: return "non-diagonalizable";
    case PointStatus::NegativeRealEigenvalue: return "negative-real-eigenvalue";
    case PointStatus::NotInvertible: return "not-invertible";
    case PointStatus::SingularEigenvalue: return "singular-eigenvalue";
    case PointStatus::UnmatchedPair: return "unmatched-pair";
    case PointStatus::Failed: return "failed";
  }
  return "failed";
}

PointStatus status_from_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonDiagonalizable: return PointStatus::NonDiagonalizable;
    case ErrorCode::NegativeRealEigenvalue: return PointStatus::NegativeRealEigenvalue;
    case ErrorCode::NotInvertible: return PointStatus::NotInvertible;
    case ErrorCode::SingularEigenvalue: return PointStatus::SingularEigenvalue;
    case ErrorCode::UnmatchedPair: return PointStatus::UnmatchedPair;
    default: return PointStatus::Failed;
  }
}

const MethodResult* MarkovianityReport::find(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return &r;
  return nullptr;
}

namespace {

BranchTag tag_for(Method m) {
  switch (m) {
    case Method::Principal: return BranchTag::Principal;
    case Method::Unwound: return BranchTag::Unwound;
    case Method::Modified: return BranchTag::Modified;
    case Method::Standard: return BranchTag::Standard;
  }
  return BranchTag::Explicit;
}

// Smaller mu wins; exact ties go to the lexicographically smaller branch.
bool better(double mu, const BranchVector& x, double best_mu, const BranchVector& best_x) {
  if (mu != best_mu) return mu < best_mu;
  return x < best_x;
}

}  // namespace

MarkovianityReport evaluate_point(const SampledMap& sampled, const EvaluationConfig& config) {
  MarkovianityReport report;
  if (sampled.maps.empty()) throw Error(ErrorCode::DimensionMismatch, "sampled map is empty");
  const Matrix& monodromy = sampled.monodromy();
  report.d = superop_dim(monodromy);
  report.tol_ccp = config.tol_ccp < 0.0 ? default_tol_ccp(report.d) : config.tol_ccp;
  const double period = sampled.period;

  std::optional<BranchFamily> family;
  try {
    report.spectrum = spectral_decompose_channel(monodromy, config.spectrum);
    report.n_c = report.spectrum->n_c();
    family.emplace(*report.spectrum, period, config.x_cap);
    if (config.unwound || config.modified) {
      const ModeSeries modes = floquet_mode_samples(*report.spectrum, sampled);
      report.profile = fourier_profile(modes);
    }
  } catch (const Error& e) {
    report.status = status_from_error(e.code());
    report.message = e.what();
    return report;
  }
  bool unwind_capped = false;
  if (config.unwound) {
    try {
      report.x_max = unwind(*report.profile, *family).x_max;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CapExceeded) {
        report.status = status_from_error(e.code());
        report.message = e.what();
        return report;
      }
      unwind_capped = true;
    }
  }

  const auto n_c = static_cast<std::size_t>(report.n_c);
  auto score_set = [&](Method method, const BranchSet& set, MethodResult& result) {
    result.cardinality = set.size();
    bool first = true;
    set.for_each([&](const BranchVector& x) {
      GeneratorCandidate candidate = family->generator(x, tag_for(method));
      if (config.observer) config.observer(candidate);
      const CandidateScore s = score_generator(candidate.matrix);
      if (config.keep_candidates) report.candidates.push_back({method, x, s});
      if (first || better(s.mu, x, result.mu, result.best_branch)) {
        result.mu = s.mu;
        result.ccp_min_eigenvalue = s.ccp_min_eigenvalue;
        result.best_branch = x;
      }
      result.nu = first ? s.nu : std::min(result.nu, s.nu);
      first = false;
    });
    result.evaluated = true;
  };

  auto run = [&](Method method, const std::function<BranchSet()>& make_set) {
    MethodResult result;
    result.method = method;
    try {
      score_set(method, make_set(), result);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CardinalityOverflow && e.code() != ErrorCode::CapExceeded) {
        report.status = status_from_error(e.code());
        report.message = e.what();
      }
      result.evaluated = false;
      result.note = e.what();
    }
    report.methods.push_back(std::move(result));
  };

  if (config.principal)
    run(Method::Principal, [&] { return BranchSet(std::vector<std::vector<int>>(n_c, std::vector<int>{0}), false); });
  if (config.unwound) {
    run(Method::Unwound, [&] {
      if (unwind_capped) throw Error(ErrorCode::CapExceeded, "unwound branch index exceeds x_cap");
      std::vector<std::vector<int>> choices;
      for (int x : report.x_max.shifts) choices.push_back({x});
      return BranchSet(std::move(choices), !report.x_max.is_zero());
    });
    if (!unwind_capped)
      report.mu_unwound_only = score_generator(family->generator(report.x_max).matrix).mu;
  }
  if (config.modified) {
    run(Method::Modified, [&] {
      ModifiedBranchSet mod = modified_branch_set(*report.profile, config.modified->eta,
                                                  config.modified->n_b, config.modified->budget);
      report.z = mod.z;
      report.n_tilde = mod.n_tilde;
      return mod.set;
    });
  }
  if (config.standard)
    run(Method::Standard, [&] {
      return standard_branch_set(report.n_c, config.standard->radius, config.standard->budget);
    });

  if (!report.ok()) return report;

  bool any = false;
  for (const MethodResult& r : report.methods) {
    if (!r.evaluated) continue;
    report.candidates_tested += r.cardinality;
    if (!any || better(r.mu, r.best_branch, report.mu, report.best_branch)) {
      report.mu = r.mu;
      report.best_branch = r.best_branch;
      report.ccp_min_eigenvalue = r.ccp_min_eigenvalue;
    }
    report.nu = any ? std::min(report.nu, r.nu) : r.nu;
    any = true;
  }
  if (!any) {
    report.status = PointStatus::Failed;
    report.message = "no candidate set could be evaluated";
  }
  return report;
}

}  // namespace unwind
