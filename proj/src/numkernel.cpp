#include "unwind/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace unwind {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NonDiagonalizable: return "NonDiagonalizable";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::SingularEigenvalue: return "SingularEigenvalue";
    case ErrorCode::NegativeRealEigenvalue: return "NegativeRealEigenvalue";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::NotHermiticityPreserving: return "NotHermiticityPreserving";
    case ErrorCode::NotTracePreserving: return "NotTracePreserving";
    case ErrorCode::StepCountInvalid: return "StepCountInvalid";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::UnmatchedPair: return "UnmatchedPair";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::EtaOutOfRange: return "EtaOutOfRange";
    case ErrorCode::CardinalityOverflow: return "CardinalityOverflow";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
  }
  return "Unknown";
}

bool is_finite(const Matrix& a) {
  return a.allFinite();
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be a non-empty square matrix");
  if (!is_finite(a)) throw Error(ErrorCode::NonFinite, std::string(what) + " has non-finite entries");
}

cplx log_principal(cplx z) {
  cplx l = std::log(z);
  if (l.imag() <= -M_PI) l.imag(M_PI);
  return l;
}

bool is_negative_real(cplx z, double rel_tol) {
  return std::abs(z.imag()) < rel_tol * std::abs(z) && z.real() < 0.0;
}

EigenSystem eig_general(const Matrix& a, double cond_max) {
  require_square(a, "eig_general input");
  const Eigen::Index n = a.rows();

  Eigen::ComplexEigenSolver<Matrix> solver(a, true);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NonDiagonalizable, "complex Schur iteration did not converge");

  const Vector& vals = solver.eigenvalues();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto modulus_key = [&](Eigen::Index i) { return std::round(std::abs(vals(i)) * 1e10); };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    const double mx = modulus_key(x), my = modulus_key(y);
    if (mx != my) return mx > my;
    return std::arg(vals(x)) < std::arg(vals(y));
  });

  EigenSystem out;
  out.values.resize(n);
  out.right.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = vals(order[k]);
    Vector col = solver.eigenvectors().col(order[k]);
    const double nrm = col.norm();
    if (nrm > 0.0) col /= nrm;
    out.right.col(k) = col;
  }

  Eigen::BDCSVD<Matrix> svd(out.right);
  const RealVector& sv = svd.singularValues();
  const double smin = sv(n - 1);
  out.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
  if (!(out.condition <= cond_max))
    throw Error(ErrorCode::NonDiagonalizable,
                "eigenvector condition estimate " + std::to_string(out.condition) + " exceeds limit");

  out.left = out.right.partialPivLu().inverse();
  return out;
}

HermitianEigenSystem eig_hermitian(const Matrix& a, double tol_herm) {
  require_square(a, "eig_hermitian input");
  const Matrix anti = a - a.adjoint();
  if (anti.cwiseAbs().maxCoeff() >= tol_herm)
    throw Error(ErrorCode::NotHermitian, "input differs from its adjoint");
  const Matrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NotHermitian, "Hermitian eigensolver did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

namespace {

double one_norm(const Matrix& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Pade numerator/denominator pieces U (odd) and V (even) for exp(A).
void pade_low(const Matrix& a, const std::vector<double>& b, Matrix& u, Matrix& v) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  Matrix u_poly = b[1] * id;
  Matrix v_poly = b[0] * id;
  Matrix power = id;
  for (std::size_t k = 2; k < b.size(); k += 2) {
    power = power * a2;
    u_poly += b[k + 1] * power;
    v_poly += b[k] * power;
  }
  u = a * u_poly;
  v = v_poly;
}

void pade13(const Matrix& a, Matrix& u, Matrix& v) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  Matrix tmp = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
  tmp += b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
  u = a * tmp;
  v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
  v += b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace

Matrix expm(const Matrix& a) {
  require_square(a, "expm input");
  static const std::vector<double> b3 = {120.0, 60.0, 12.0, 1.0};
  static const std::vector<double> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  static const std::vector<double> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                         25200.0,    1512.0,    56.0,      1.0};
  static const std::vector<double> b9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                         30270240.0,    2162160.0,    110880.0,     3960.0,
                                         90.0,          1.0};
  // Higham (2005) thresholds for backward error below unit roundoff.
  constexpr double theta3 = 1.495585217958292e-2;
  constexpr double theta5 = 2.539398330063230e-1;
  constexpr double theta7 = 9.504178996162932e-1;
  constexpr double theta9 = 2.097847961257068e0;
  constexpr double theta13 = 5.371920351148152e0;

  const double norm = one_norm(a);
  Matrix u, v;
  int squarings = 0;
  if (norm <= theta3) {
    pade_low(a, b3, u, v);
  } else if (norm <= theta5) {
    pade_low(a, b5, u, v);
  } else if (norm <= theta7) {
    pade_low(a, b7, u, v);
  } else if (norm <= theta9) {
    pade_low(a, b9, u, v);
  } else {
    squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / theta13))));
    const Matrix scaled = a / std::ldexp(1.0, squarings);
    pade13(scaled, u, v);
  }
  Matrix result = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) result = result * result;
  if (!is_finite(result)) throw Error(ErrorCode::NonFinite, "matrix exponential overflowed");
  return result;
}

Matrix logm_principal(const Matrix& a, double tol, double cond_max) {
  const EigenSystem es = eig_general(a, cond_max);
  const Eigen::Index n = a.rows();
  Vector logs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx z = es.values(k);
    if (std::abs(z) < tol)
      throw Error(ErrorCode::SingularEigenvalue, "eigenvalue of modulus below tolerance");
    if (is_negative_real(z))
      throw Error(ErrorCode::NegativeRealEigenvalue, "eigenvalue on the negative real axis");
    logs(k) = log_principal(z);
  }
  return es.right * logs.asDiagonal() * es.left;
}

RealVector singular_values(const Matrix& a) {
  if (a.size() == 0) return RealVector();
  if (!is_finite(a)) throw Error(ErrorCode::NonFinite, "singular_values input has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(a);
  return svd.singularValues();
}

double trace_norm(const Matrix& a) {
  return singular_values(a).sum();
}

Matrix inverse(const Matrix& a) {
  require_square(a, "inverse input");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) throw Error(ErrorCode::NotInvertible, "matrix is singular");
  return lu.inverse();
}

}  // namespace unwind
