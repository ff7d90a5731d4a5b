#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "unwind/numkernel.hpp"
#include "unwind/propagate.hpp"

namespace unwind {

/// One integer per complex-conjugate eigenvalue pair selecting the logarithm
/// branch of that pair.
struct BranchVector {
  std::vector<int> shifts;

  BranchVector() = default;
  explicit BranchVector(std::vector<int> s) : shifts(std::move(s)) {}
  static BranchVector zeros(std::size_t n) { return BranchVector(std::vector<int>(n, 0)); }

  std::size_t size() const { return shifts.size(); }
  int operator[](std::size_t c) const { return shifts[c]; }
  bool is_zero() const;
  int max_abs() const;
  /// Semicolon-joined integers, e.g. "0;-1;2".
  std::string str() const;

  auto operator<=>(const BranchVector&) const = default;
  bool operator==(const BranchVector&) const = default;
};

struct SpectrumTolerances {
  double tol_pair = 1e-7;    // conjugate matching and real classification
  double cond_max = 1e10;
  double tol_singular = 1e-10;
  double tol_channel = 1e-8; // trace/hermiticity preservation of the input
};

/// Eigen-structure of a hermiticity-preserving map. Eigenvectors of each
/// conjugate pair are tied together: the partner's right vector is the flip of
/// the representative's, and partner eigenvalues are exact conjugates.
struct ChannelSpectrum {
  Eigen::Index d = 0;
  Vector values;
  Matrix right;  // columns
  Matrix left;   // rows, left = right^{-1}
  std::vector<int> partner;  // conjugate partner index, -1 for real eigenvalues
  std::vector<int> pairs;    // representative (Im > 0) index of every pair, ascending
  double condition = 1.0;

  int n_c() const { return static_cast<int>(pairs.size()); }
  bool is_real(Eigen::Index mu) const { return partner[static_cast<std::size_t>(mu)] < 0; }
  /// Spectral projector |r_mu>><<l_mu|.
  Matrix projector(Eigen::Index mu) const;
  /// Omega_mu = i log(lambda_mu) / T with the principal logarithm.
  cplx quasienergy(Eigen::Index mu, double period) const;
};

ChannelSpectrum spectral_decompose_channel(const Matrix& v, const SpectrumTolerances& tols = {});

enum class BranchTag { Principal, Unwound, Modified, Standard, Explicit };
std::string_view to_string(BranchTag tag);

struct GeneratorCandidate {
  Matrix matrix;
  BranchVector branch;
  BranchTag method = BranchTag::Explicit;
};

/// Precomputed pieces of the logarithm family
///   S_x = S_0 + i (2 pi / T) sum_c x_c (P_c - F P_c F)
/// for one channel spectrum.
class BranchFamily {
 public:
  BranchFamily(const ChannelSpectrum& spectrum, double period, int x_cap = 64);

  int n_c() const { return static_cast<int>(shift_ops_.size()); }
  double period() const { return period_; }
  int x_cap() const { return x_cap_; }
  const Matrix& principal() const { return principal_; }
  /// i (2 pi / T) (P_c - F P_c F)
  const Matrix& shift_operator(int c) const { return shift_ops_[static_cast<std::size_t>(c)]; }

  /// base + sum_c x_c shift_operator(c). Throws CapExceeded or DimensionMismatch.
  Matrix shifted(const Matrix& base, const BranchVector& x) const;
  GeneratorCandidate generator(const BranchVector& x, BranchTag tag = BranchTag::Explicit) const;

 private:
  double period_;
  int x_cap_;
  Matrix principal_;
  std::vector<Matrix> shift_ops_;
};

GeneratorCandidate principal_generator(const BranchFamily& family);
/// Applies x on top of an existing candidate; the result records the summed branch.
GeneratorCandidate branch_generator(const GeneratorCandidate& base, const BranchFamily& family,
                                    const BranchVector& x);

/// Per-pair periodic Floquet modes Phi_c(t_m) = lambda_c^{-t_m/T} V(t_m) r_c,
/// one row per sample m = 0..n_t.
struct ModeSeries {
  Eigen::Index d = 0;
  int n_t = 0;
  double period = 0.0;
  std::vector<Matrix> pairs;  // (n_t + 1) x d^2 each
};

ModeSeries floquet_mode_samples(const ChannelSpectrum& spectrum, const SampledMap& sampled,
                                double tol_invertible = 1e-12);

struct Peak {
  int harmonic = 0;
  double amplitude = 0.0;
};

struct PairProfile {
  std::vector<Peak> ranked;  // every harmonic, descending amplitude
  double amplitude_at(int harmonic) const;
};

struct FourierProfile {
  int n_t = 0;
  std::vector<PairProfile> pairs;
  std::vector<Matrix> components;  // per pair: n_t x d^2, row k is harmonic k - n_t/2
};

/// Phi_c^(n) = (1/n_t) sum_m exp(-i omega n t_m) Phi_c(t_m) for
/// n in [-n_t/2, n_t/2); amplitude is the trace norm of the unvectorized
/// component. Amplitudes equal to within 1e-12 of the pair maximum
/// count as ties; ties rank the smaller |n| first, then the smaller n.
FourierProfile fourier_profile(const ModeSeries& modes);

struct UnwoundGenerator {
  BranchVector x_max;
  GeneratorCandidate generator;
};

UnwoundGenerator unwind(const FourierProfile& profile, const BranchFamily& family);

/// Candidate branches as a Cartesian product of per-pair choices, optionally
/// preceded by the principal branch. Iteration is lexicographic over the
/// per-pair lists in their stored order.
class BranchSet {
 public:
  BranchSet() = default;
  BranchSet(std::vector<std::vector<int>> choices, bool prepend_principal);

  std::uint64_t size() const { return size_; }
  const std::vector<std::vector<int>>& choices() const { return choices_; }
  bool prepends_principal() const { return prepend_principal_; }

  void for_each(const std::function<void(const BranchVector&)>& visit) const;
  std::vector<BranchVector> materialize() const;

 private:
  std::vector<std::vector<int>> choices_;
  bool prepend_principal_ = false;
  std::uint64_t size_ = 0;
};

/// (2r+1)^{n_c} as a floating-point count (may exceed 64-bit range).
long double standard_cardinality(int n_c, int radius);

/// Full grid {-r..r}^{n_c}; throws CardinalityOverflow beyond `budget`.
BranchSet standard_branch_set(int n_c, int radius, double budget = 1e7);

struct ModifiedBranchSet {
  BranchSet set;
  std::vector<int> z;   // extra peaks admitted per pair
  int n_tilde = 0;      // pairs with z_c >= 1
};

/// Per pair c, the top 1 + z_c ranked harmonics where
/// z_c = min(N_b, #{i >= 1 : A_c^(i) / A_c^(0) >= eta}); the principal branch
/// is prepended unless the product already contains it.
ModifiedBranchSet modified_branch_set(const FourierProfile& profile, double eta, int n_b,
                                      double budget = 1e7);

}  // namespace unwind
