#pragma once

#include <vector>

#include "unwind/numkernel.hpp"

// Superoperators act on row-major vectorized operators: |i><j| maps to the
// basis vector with index i*d + j. Under this convention rho -> A rho B is the
// Kronecker product A (x) B^T.

namespace unwind {

/// Hilbert-space dimension d of a d^2 x d^2 superoperator. Throws
/// DimensionMismatch when the size is not a perfect square.
Eigen::Index superop_dim(const Matrix& s);

Vector vec(const Matrix& rho);
Matrix unvec(const Vector& v, Eigen::Index d);

Matrix kron(const Matrix& a, const Matrix& b);

Matrix sandwich_superop(const Matrix& a, const Matrix& b);
Matrix commutator_superop(const Matrix& h);  // rho -> -i[H, rho]

struct JumpTerm {
  Matrix op;
  double rate = 1.0;
};

/// rate * (L rho L^dag - 1/2 {L^dag L, rho})
Matrix dissipator_superop(const Matrix& op, double rate = 1.0);

Matrix lindbladian_superop(const Matrix& h, const std::vector<JumpTerm>& jumps,
                           double tol_herm = kernel_defaults::tol_herm);

/// C[i*d+k, j*d+l] = S[i*d+j, k*d+l]. Involutive.
Matrix choi(const Matrix& s);

/// Projector onto (1/sqrt d) sum_j |j>|j>.
Matrix max_entangled_projector(Eigen::Index d);

/// Conjugation of S by the antilinear flip, i.e. rho -> (S[rho^dag])^dag.
Matrix flip_conjugate(const Matrix& s);
/// Antilinear flip on a vectorized operator: vec(X) -> vec(X^dag).
Vector flip_vector(const Vector& v, Eigen::Index d);

/// Generator of the depolarizing semigroup, Z = vec(1) vec(1)^dag / d - 1.
Matrix depolarizing_generator(Eigen::Index d);

/// max_k |(vec(1)^dag S)_k|: zero for trace-annihilating generators.
double trace_annihilation_defect(const Matrix& s);
/// max_k |(vec(1)^dag S)_k - vec(1)^dag_k|: zero for trace-preserving maps.
double trace_preservation_defect(const Matrix& v);
/// max-norm distance between S and its flip conjugate.
double hermiticity_defect(const Matrix& s);

/// Normalized generalized Gell-Mann matrices: off-diagonal symmetric ones for
/// pairs (j<k) in lexicographic order, then the antisymmetric ones in the same
/// order, then the d-1 diagonal ones. Tr(F_a^dag F_b) = delta_ab, Tr F_a = 0.
std::vector<Matrix> gell_mann_basis(Eigen::Index d);

struct KossakowskiForm {
  Matrix hamiltonian;          // traceless Hermitian d x d
  Matrix kossakowski;          // Hermitian (d^2-1) x (d^2-1)
  std::vector<Matrix> basis;   // gell_mann_basis(d)
};

KossakowskiForm gksl_decompose(const Matrix& s, double tol = 1e-8);
Matrix gksl_rebuild(const KossakowskiForm& form);

}  // namespace unwind
