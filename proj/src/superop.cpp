#include "unwind/superop.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>

namespace unwind {

Eigen::Index superop_dim(const Matrix& s) {
  if (s.rows() != s.cols())
    throw Error(ErrorCode::DimensionMismatch, "superoperator must be square");
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
  if (d * d != s.rows() || d == 0)
    throw Error(ErrorCode::DimensionMismatch,
                "superoperator size " + std::to_string(s.rows()) + " is not a perfect square");
  return d;
}

Vector vec(const Matrix& rho) {
  if (rho.rows() != rho.cols()) throw Error(ErrorCode::DimensionMismatch, "vec expects a square operator");
  const Eigen::Index d = rho.rows();
  Vector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

Matrix unvec(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) throw Error(ErrorCode::DimensionMismatch, "unvec length is not d^2");
  Matrix rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Matrix sandwich_superop(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw Error(ErrorCode::DimensionMismatch, "sandwich operands must be square of equal size");
  return kron(a, b.transpose());
}

Matrix commutator_superop(const Matrix& h) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  return -I_unit * (kron(h, id) - kron(id, h.transpose()));
}

Matrix dissipator_superop(const Matrix& op, double rate) {
  if (op.rows() != op.cols()) throw Error(ErrorCode::DimensionMismatch, "jump operator must be square");
  const Eigen::Index d = op.rows();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix ldl = op.adjoint() * op;
  return rate * (kron(op, op.conjugate()) - 0.5 * kron(ldl, id) - 0.5 * kron(id, ldl.transpose()));
}

Matrix lindbladian_superop(const Matrix& h, const std::vector<JumpTerm>& jumps, double tol_herm) {
  require_square(h, "Hamiltonian");
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() >= tol_herm)
    throw Error(ErrorCode::NotHermitian, "Hamiltonian is not Hermitian");
  Matrix s = commutator_superop(h);
  for (const auto& jump : jumps) {
    if (jump.op.rows() != h.rows() || jump.op.cols() != h.cols())
      throw Error(ErrorCode::DimensionMismatch, "jump operator dimension differs from Hamiltonian");
    if (!(jump.rate >= 0.0)) throw Error(ErrorCode::NegativeRate, "jump rate must be nonnegative");
    s += dissipator_superop(jump.op, jump.rate);
  }
  return s;
}

Matrix choi(const Matrix& s) {
  const Eigen::Index d = superop_dim(s);
  Matrix c(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) c(i * d + k, j * d + l) = s(i * d + j, k * d + l);
  return c;
}

Matrix max_entangled_projector(Eigen::Index d) {
  Matrix sigma = Matrix::Zero(d * d, d * d);
  const double inv_d = 1.0 / static_cast<double>(d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) sigma(i * d + i, j * d + j) = inv_d;
  return sigma;
}

Matrix flip_conjugate(const Matrix& s) {
  const Eigen::Index d = superop_dim(s);
  Matrix out(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l)
          out(a * d + b, k * d + l) = std::conj(s(b * d + a, l * d + k));
  return out;
}

Vector flip_vector(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) throw Error(ErrorCode::DimensionMismatch, "flip_vector length is not d^2");
  Vector out(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) out(i * d + j) = std::conj(v(j * d + i));
  return out;
}

Matrix depolarizing_generator(Eigen::Index d) {
  const Vector id = vec(Matrix::Identity(d, d));
  return id * id.adjoint() / static_cast<double>(d) - Matrix::Identity(d * d, d * d);
}

double trace_annihilation_defect(const Matrix& s) {
  const Eigen::Index d = superop_dim(s);
  const Vector id = vec(Matrix::Identity(d, d));
  return (id.adjoint() * s).cwiseAbs().maxCoeff();
}

double trace_preservation_defect(const Matrix& v) {
  const Eigen::Index d = superop_dim(v);
  const Vector id = vec(Matrix::Identity(d, d));
  return (id.adjoint() * v - id.adjoint()).cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& s) {
  return (flip_conjugate(s) - s).cwiseAbs().maxCoeff();
}

std::vector<Matrix> gell_mann_basis(Eigen::Index d) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d - 1));
  const double r2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k) {
      Matrix f = Matrix::Zero(d, d);
      f(j, k) = r2;
      f(k, j) = r2;
      basis.push_back(std::move(f));
    }
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = j + 1; k < d; ++k) {
      Matrix f = Matrix::Zero(d, d);
      f(j, k) = -I_unit * r2;
      f(k, j) = I_unit * r2;
      basis.push_back(std::move(f));
    }
  for (Eigen::Index l = 1; l < d; ++l) {
    Matrix f = Matrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index m = 0; m < l; ++m) f(m, m) = norm;
    f(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(std::move(f));
  }
  return basis;
}

KossakowskiForm gksl_decompose(const Matrix& s, double tol) {
  const Eigen::Index d = superop_dim(s);
  if (hermiticity_defect(s) > tol)
    throw Error(ErrorCode::NotHermiticityPreserving, "generator does not commute with the flip");
  if (trace_annihilation_defect(s) > tol)
    throw Error(ErrorCode::NotTracePreserving, "generator does not annihilate the trace");

  // Expand S = sum_ab c_ab F_a . F_b^dag over the full basis F_0 = 1/sqrt(d),
  // F_1.. = Gell-Mann. The Choi matrix is sum_ab c_ab vec(F_a) vec(F_b)^dag.
  std::vector<Matrix> full;
  full.reserve(static_cast<std::size_t>(d * d));
  full.push_back(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
  const std::vector<Matrix> gm = gell_mann_basis(d);
  full.insert(full.end(), gm.begin(), gm.end());

  Matrix basis_vecs(d * d, d * d);
  for (Eigen::Index a = 0; a < d * d; ++a) basis_vecs.col(a) = vec(full[static_cast<std::size_t>(a)]);
  const Matrix coeff = basis_vecs.adjoint() * choi(s) * basis_vecs;

  KossakowskiForm form;
  form.basis = gm;
  form.kossakowski = coeff.bottomRightCorner(d * d - 1, d * d - 1);
  form.kossakowski = 0.5 * (form.kossakowski + form.kossakowski.adjoint()).eval();

  // K = c_00/(2d) + (1/sqrt d) sum_i c_i0 F_i; the commutator part is the
  // anti-Hermitian piece of K.
  Matrix k = coeff(0, 0) / (2.0 * static_cast<double>(d)) * Matrix::Identity(d, d);
  for (Eigen::Index i = 1; i < d * d; ++i)
    k += coeff(i, 0) / std::sqrt(static_cast<double>(d)) * full[static_cast<std::size_t>(i)];
  Matrix h = (k.adjoint() - k) / (2.0 * I_unit);
  h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
  form.hamiltonian = 0.5 * (h + h.adjoint());
  return form;
}

Matrix gksl_rebuild(const KossakowskiForm& form) {
  const Eigen::Index d = form.hamiltonian.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix s = commutator_superop(form.hamiltonian);
  const auto n = static_cast<Eigen::Index>(form.basis.size());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const cplx g = form.kossakowski(i, j);
      if (g == cplx(0.0)) continue;
      const Matrix& fi = form.basis[static_cast<std::size_t>(i)];
      const Matrix& fj = form.basis[static_cast<std::size_t>(j)];
      const Matrix fjfi = fj.adjoint() * fi;
      s += g * (kron(fi, fj.conjugate()) - 0.5 * kron(fjfi, id) - 0.5 * kron(id, fjfi.transpose()));
    }
  return s;
}

}  // namespace unwind
