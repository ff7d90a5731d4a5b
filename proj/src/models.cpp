#include "unwind/models.hpp"

#include <cmath>
#include <string>

#include "unwind/superop.hpp"

namespace unwind {

Matrix pauli(Pauli p) {
  Matrix m = Matrix::Zero(2, 2);
  switch (p) {
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = -I_unit;
      m(1, 0) = I_unit;
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

Matrix site_operator(int n_sites, int site, Pauli p) {
  if (site < 0 || site >= n_sites) throw Error(ErrorCode::IndexOutOfRange, "site outside the chain");
  Matrix out = Matrix::Identity(1, 1);
  const Matrix id = Matrix::Identity(2, 2);
  for (int l = 0; l < n_sites; ++l) out = kron(out, l == site ? pauli(p) : id);
  return out;
}

double SpinChainParams::period() const {
  return 2.0 * M_PI / omega;
}

void SpinChainParams::validate() const {
  if (n_sites < 1) throw Error(ErrorCode::ConfigInvalid, "chain needs at least one site");
  if (static_cast<int>(deltas.size()) != n_sites)
    throw Error(ErrorCode::ConfigInvalid, "deltas must hold one splitting per site");
  if (gamma != 0.0 && !(temperature > 0.0))
    throw Error(ErrorCode::ConfigInvalid, "bath temperature must be positive when gamma != 0");
  if (!(omega > 0.0)) throw Error(ErrorCode::ConfigInvalid, "drive frequency must be positive");
  if (gamma < 0.0) throw Error(ErrorCode::ConfigInvalid, "gamma must be nonnegative");
}

Matrix static_hamiltonian(const SpinChainParams& params) {
  if (params.n_sites < 1 || static_cast<int>(params.deltas.size()) != params.n_sites)
    throw Error(ErrorCode::ConfigInvalid, "deltas must hold one splitting per site");
  const Eigen::Index d = params.dim();
  Matrix h = Matrix::Zero(d, d);
  for (int l = 0; l < params.n_sites; ++l)
    h += 0.5 * params.deltas[static_cast<std::size_t>(l)] * site_operator(params.n_sites, l, Pauli::Z);
  for (int l = 0; l + 1 < params.n_sites; ++l)
    h += params.coupling * site_operator(params.n_sites, l, Pauli::X) *
         site_operator(params.n_sites, l + 1, Pauli::X);
  return h;
}

namespace {

Matrix summed(int n_sites, Pauli p) {
  const Eigen::Index d = Eigen::Index{1} << n_sites;
  Matrix s = Matrix::Zero(d, d);
  for (int l = 0; l < n_sites; ++l) s += site_operator(n_sites, l, p);
  return s;
}

}  // namespace

Matrix hamiltonian(const SpinChainParams& params, double t) {
  const double phase = params.omega * t;
  return static_hamiltonian(params) +
         params.drive * (std::cos(phase) * summed(params.n_sites, Pauli::X) -
                         std::sin(phase) * summed(params.n_sites, Pauli::Y));
}

double ohmic_g(double energy, double temperature) {
  if (!(temperature > 0.0)) throw Error(ErrorCode::ConfigInvalid, "temperature must be positive");
  const double x = energy / temperature;
  if (x == 0.0) return temperature;
  if (x > 700.0) return energy * std::exp(-x);
  return energy / std::expm1(x);
}

QuantumOpticalBath quantum_optical_jumps(const SpinChainParams& params, double r_floor, double tol_deg) {
  params.validate();
  QuantumOpticalBath bath;
  const HermitianEigenSystem es = eig_hermitian(static_hamiltonian(params));
  bath.energies = es.values;
  bath.eigenstates = es.vectors;
  for (Eigen::Index k = 1; k < es.values.size(); ++k)
    if (es.values(k) - es.values(k - 1) < tol_deg) bath.near_degenerate = true;
  if (params.gamma == 0.0) return bath;

  const Eigen::Index d = params.dim();
  const double prefactor = 2.0 * M_PI * params.gamma * params.gamma;
  for (int l = 0; l < params.n_sites; ++l) {
    const Matrix sx = es.vectors.adjoint() * site_operator(params.n_sites, l, Pauli::X) * es.vectors;
    for (Eigen::Index k = 0; k < d; ++k)
      for (Eigen::Index q = 0; q < d; ++q) {
        const double rate = prefactor * std::norm(sx(k, q)) *
                            ohmic_g(es.values(k) - es.values(q), params.temperature);
        if (!(rate > r_floor)) continue;
        JumpOperator j;
        j.site = l;
        j.k = static_cast<int>(k);
        j.q = static_cast<int>(q);
        j.rate = rate;
        j.op = std::sqrt(rate) * es.vectors.col(k) * es.vectors.col(q).adjoint();
        bath.jumps.push_back(std::move(j));
      }
  }
  return bath;
}

Matrix bath_dissipator(const QuantumOpticalBath& bath) {
  const Eigen::Index d = bath.eigenstates.rows();
  Matrix out = Matrix::Zero(d * d, d * d);
  for (const auto& j : bath.jumps) out += dissipator_superop(j.op);
  return out;
}

PeriodicLindbladian::PeriodicLindbladian(const SpinChainParams& params)
    : omega_(params.omega), period_(params.period()) {
  params.validate();
  static_part_ = commutator_superop(static_hamiltonian(params));
  cos_part_ = commutator_superop(params.drive * summed(params.n_sites, Pauli::X));
  sin_part_ = commutator_superop(-params.drive * summed(params.n_sites, Pauli::Y));
  const QuantumOpticalBath bath = quantum_optical_jumps(params);
  near_degenerate_ = bath.near_degenerate;
  dissipator_ = bath_dissipator(bath);
  static_part_ += dissipator_;
}

Matrix PeriodicLindbladian::operator()(double t) const {
  const double phase = omega_ * t;
  return static_part_ + std::cos(phase) * cos_part_ + std::sin(phase) * sin_part_;
}

PeriodicLindbladian periodic_lindbladian(const SpinChainParams& params) {
  return PeriodicLindbladian(params);
}

std::pair<Matrix, Matrix> sm_static_pair(const SpinChainParams& params, Pauli first, Pauli second) {
  if (params.gamma < 0.0) throw Error(ErrorCode::NegativeRate, "gamma must be nonnegative");
  const Matrix h = static_hamiltonian(params);
  std::vector<JumpTerm> one, two;
  for (int l = 0; l < params.n_sites; ++l) {
    one.push_back({site_operator(params.n_sites, l, first), params.gamma});
    two.push_back({site_operator(params.n_sites, l, second), params.gamma});
  }
  return {lindbladian_superop(h, one), lindbladian_superop(h, two)};
}

Matrix gibbs_state(const Matrix& h, double temperature) {
  const HermitianEigenSystem es = eig_hermitian(h);
  RealVector weights = (-(es.values.array() - es.values(0)) / temperature).exp();
  weights /= weights.sum();
  return es.vectors * weights.cast<cplx>().asDiagonal() * es.vectors.adjoint();
}

}  // namespace unwind
