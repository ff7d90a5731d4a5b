#pragma once

#include <utility>
#include <vector>

#include "unwind/numkernel.hpp"
#include "unwind/propagate.hpp"

namespace unwind {

enum class Pauli { X, Y, Z };

Matrix pauli(Pauli p);

/// Pauli matrix on `site` (0-based, site 0 is the most significant factor)
/// of an L-site chain.
Matrix site_operator(int n_sites, int site, Pauli p);

/// Circularly driven transverse-coupled spin chain with an optional
/// quantum-optical bath. Energies in units with hbar = k_B = 1.
struct SpinChainParams {
  int n_sites = 2;
  std::vector<double> deltas{1.01, 1.00};
  double coupling = 0.1;     // w
  double drive = 0.0;        // E
  double omega = 1.0;
  double gamma = 0.0;
  double temperature = 1.0;

  Eigen::Index dim() const { return Eigen::Index{1} << n_sites; }
  double period() const;
  void validate() const;
};

/// sum_l Delta_l/2 sigma_z^l + sum_l w sigma_x^l sigma_x^{l+1}
Matrix static_hamiltonian(const SpinChainParams& params);

/// static part + E sum_l [cos(omega t) sigma_x^l - sin(omega t) sigma_y^l]
Matrix hamiltonian(const SpinChainParams& params, double t);

/// E / (exp(E/T) - 1), continued to T at E = 0.
double ohmic_g(double energy, double temperature);

struct JumpOperator {
  Matrix op;  // sqrt(R) |psi_k><psi_q|
  int site = 0;
  int k = 0;
  int q = 0;
  double rate = 0.0;  // R
};

struct QuantumOpticalBath {
  std::vector<JumpOperator> jumps;
  RealVector energies;       // undriven spectrum, ascending
  Matrix eigenstates;        // columns
  bool near_degenerate = false;
};

/// Jumps L_kq^l = sqrt(R_kq^l) |psi_k><psi_q| with
/// R_kq^l = 2 pi gamma^2 |<psi_k|sigma_x^l|psi_q>|^2 g(E_k - E_q), in the
/// eigenbasis of the undriven Hamiltonian. Diagonal k = q terms are kept;
/// rates at or below r_floor are dropped.
QuantumOpticalBath quantum_optical_jumps(const SpinChainParams& params, double r_floor = 1e-14,
                                         double tol_deg = 1e-9);

Matrix bath_dissipator(const QuantumOpticalBath& bath);

/// L(t) = -i[H(t), .] + D with a time-independent dissipator D.
class PeriodicLindbladian {
 public:
  explicit PeriodicLindbladian(const SpinChainParams& params);

  Matrix operator()(double t) const;
  const Matrix& dissipator() const { return dissipator_; }
  double period() const { return period_; }
  bool near_degenerate() const { return near_degenerate_; }

 private:
  double omega_;
  double period_;
  bool near_degenerate_ = false;
  Matrix static_part_;
  Matrix cos_part_;
  Matrix sin_part_;
  Matrix dissipator_;
};

PeriodicLindbladian periodic_lindbladian(const SpinChainParams& params);

/// Undriven chain with uniform single-site dissipators of the given Pauli
/// axes: L_1 uses `first` on every site, L_2 uses `second`.
std::pair<Matrix, Matrix> sm_static_pair(const SpinChainParams& params, Pauli first = Pauli::X,
                                         Pauli second = Pauli::Y);

Matrix gibbs_state(const Matrix& h, double temperature);

}  // namespace unwind
