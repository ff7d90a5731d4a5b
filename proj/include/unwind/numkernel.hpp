#pragma once

#include <complex>

#include <Eigen/Dense>

#include "unwind/error.hpp"

namespace unwind {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

/// Diagonalization A = right * diag(values) * left, with left = right^{-1}.
struct EigenSystem {
  Vector values;
  Matrix right;  // eigenvectors as columns, unit 2-norm
  Matrix left;   // rows, biorthogonal to the columns of `right`
  double condition = 1.0;
};

struct HermitianEigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns
};

namespace kernel_defaults {
inline constexpr double cond_max = 1e10;
inline constexpr double tol_herm = 1e-10;
inline constexpr double tol_branch = 1e-10;
}  // namespace kernel_defaults

bool is_finite(const Matrix& a);
void require_square(const Matrix& a, const char* what);

/// General eigendecomposition. Eigenvalues come out sorted by descending
/// modulus, ties (modulus equal to ~1e-10) by ascending principal phase.
/// Throws NonDiagonalizable when the eigenvector matrix condition number
/// exceeds `cond_max`.
EigenSystem eig_general(const Matrix& a, double cond_max = kernel_defaults::cond_max);

/// Hermitian eigendecomposition of (A + A^dagger)/2; throws NotHermitian if
/// the anti-Hermitian part exceeds `tol_herm` in max norm.
HermitianEigenSystem eig_hermitian(const Matrix& a, double tol_herm = kernel_defaults::tol_herm);

/// Scaling and squaring with diagonal Pade approximants of degree 3..13.
Matrix expm(const Matrix& a);

/// Principal logarithm through the eigendecomposition. Eigenvalues of the
/// result have imaginary parts in (-pi, pi].
Matrix logm_principal(const Matrix& a, double tol = kernel_defaults::tol_branch,
                      double cond_max = kernel_defaults::cond_max);

RealVector singular_values(const Matrix& a);
double trace_norm(const Matrix& a);
Matrix inverse(const Matrix& a);

/// |Im z| < 1e-10 |z| and Re z < 0.
bool is_negative_real(cplx z, double rel_tol = 1e-10);

/// Principal logarithm with the branch cut placed so that the imaginary part
/// lies in (-pi, pi].
cplx log_principal(cplx z);

}  // namespace unwind
