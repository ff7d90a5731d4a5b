#pragma once

// Reference computations for the tests, written from the defining formulas.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = scale * cplx(g(rng), g(rng));
  return m;
}

inline Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng, double scale = 1.0) {
  const Matrix a = random_matrix(n, rng, scale);
  return 0.5 * (a + a.adjoint());
}

inline Matrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, rng));
  return qr.householderQ() * Matrix::Identity(n, n);
}

// rho -> A rho B on row-major vec, entry by entry from the definition.
inline Matrix sandwich(const Matrix& a, const Matrix& b) {
  const Eigen::Index d = a.rows();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) s(i * d + j, k * d + l) = a(i, k) * b(l, j);
  return s;
}

inline Vector vec(const Matrix& rho) {
  const Eigen::Index d = rho.rows();
  Vector v(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) v(i * d + j) = rho(i, j);
  return v;
}

inline Matrix unvec(const Vector& v, Eigen::Index d) {
  Matrix rho(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v(i * d + j);
  return rho;
}

inline Matrix apply(const Matrix& s, const Matrix& rho) {
  return unvec(s * vec(rho), rho.rows());
}

struct Jump {
  Matrix op;
  double rate;
};

inline Matrix lindbladian(const Matrix& h, const std::vector<Jump>& jumps) {
  const Eigen::Index d = h.rows();
  const Matrix id = Matrix::Identity(d, d);
  Matrix s = -cplx(0, 1) * (sandwich(h, id) - sandwich(id, h));
  for (const Jump& j : jumps) {
    const Matrix ll = j.op.adjoint() * j.op;
    s += j.rate * (sandwich(j.op, j.op.adjoint()) - 0.5 * sandwich(ll, id) - 0.5 * sandwich(id, ll));
  }
  return s;
}

inline Matrix random_lindbladian(Eigen::Index d, std::mt19937_64& rng, double h_scale = 1.0,
                                 double rate_scale = 0.1, int n_jumps = 3) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  std::vector<Jump> jumps;
  for (int k = 0; k < n_jumps; ++k) jumps.push_back({random_matrix(d, rng, 1.0 / std::sqrt(2.0 * d)), rate_scale * u(rng)});
  return lindbladian(random_hermitian(d, rng, h_scale), jumps);
}

// Choi matrix straight from the definition d (S (x) 1)[|Omega><Omega|]:
// C[(i,k),(j,l)] = (S[|k><l|])_{ij}.
inline Matrix choi(const Matrix& s) {
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
  Matrix c(d * d, d * d);
  for (Eigen::Index k = 0; k < d; ++k)
    for (Eigen::Index l = 0; l < d; ++l) {
      Matrix e = Matrix::Zero(d, d);
      e(k, l) = 1.0;
      const Matrix out = oracle::apply(s, e);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) c(i * d + k, j * d + l) = out(i, j);
    }
  return c;
}

// Smallest eigenvalue of (1 - Sigma) choi(S) (1 - Sigma).
inline double projected_choi_min(const Matrix& s) {
  const Eigen::Index n = s.rows();
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  Matrix sigma = Matrix::Zero(n, n);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) sigma(a * d + a, b * d + b) = 1.0 / static_cast<double>(d);
  const Matrix p = Matrix::Identity(n, n) - sigma;
  Matrix m = p * choi(s) * p;
  m = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline Matrix depolarizing(Eigen::Index d) {
  const Eigen::Index n = d * d;
  Matrix z = -Matrix::Identity(n, n);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) z(a * d + a, b * d + b) += 1.0 / static_cast<double>(d);
  return z;
}

// Definitional distance from Markovianity: the smallest chi >= 0 making
// S + chi Z conditionally completely positive, by doubling then bisection.
inline double mu_bisection(const Matrix& s, double width = 1e-10) {
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(s.rows()))));
  const Matrix z = depolarizing(d);
  auto passes = [&](double chi) { return projected_choi_min(s + chi * z) >= -1e-12; };
  if (passes(0.0)) return 0.0;
  double hi = 1.0;
  while (!passes(hi)) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Truncated Taylor series with scaling and squaring, for cross-checks only.
inline Matrix expm_taylor(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Matrix x = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

struct WindingCase {
  Matrix generator;
  double period;
  Eigen::VectorXcd eigenvalues;
};

// Random static Lindbladian with the period chosen so that the fastest
// oscillation accumulates a phase of (2k - 1/2) pi over one period.
inline WindingCase winding_lindbladian(Eigen::Index d, int k, std::mt19937_64& rng) {
  WindingCase out;
  out.generator = random_lindbladian(d, rng);
  Eigen::ComplexEigenSolver<Matrix> es(out.generator, false);
  out.eigenvalues = es.eigenvalues();
  const double fastest = out.eigenvalues.imag().cwiseAbs().maxCoeff();
  out.period = (2.0 * k - 0.5) * M_PI / fastest;
  return out;
}

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace oracle
