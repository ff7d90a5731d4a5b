#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "unwind/branching.hpp"
#include "unwind/models.hpp"
#include "unwind/superop.hpp"

using namespace unwind;

namespace {

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

SampledMap coherent_pair(double e, double omega) {
  SpinChainParams p;
  p.drive = e;
  p.omega = omega;
  const PeriodicLindbladian gen(p);
  return propagate_periodic(std::cref(gen), p.period());
}

// For every eigenvector of L, the matching eigenvalue of S, via a Rayleigh quotient.
std::vector<cplx> eigenvalue_offsets(const Matrix& l, const Matrix& s) {
  Eigen::ComplexEigenSolver<Matrix> es(l);
  std::vector<cplx> out;
  for (Eigen::Index k = 0; k < l.rows(); ++k) {
    const Vector r = es.eigenvectors().col(k);
    const cplx mu = r.dot(s * r) / r.squaredNorm();
    out.push_back(mu - es.eigenvalues()(k));
  }
  return out;
}

PairProfile synthetic_profile(std::vector<std::pair<int, double>> peaks) {
  PairProfile p;
  for (auto [n, a] : peaks) p.ranked.push_back({n, a});
  return p;
}

}  // namespace

TEST_CASE("spectrum of the identity channel") {
  const ChannelSpectrum s = spectral_decompose_channel(Matrix::Identity(9, 9));
  CHECK(s.n_c() == 0);
  CHECK(oracle::max_abs(s.values - Vector::Ones(9)) < 1e-14);
}

TEST_CASE("single qubit rotation pairs its coherences") {
  const Matrix v = expm(commutator_superop(0.5 * pauli_z()));
  const ChannelSpectrum s = spectral_decompose_channel(v);
  REQUIRE(s.n_c() == 1);
  const int rep = s.pairs[0];
  const int mate = s.partner[static_cast<std::size_t>(rep)];
  CHECK(std::abs(s.values(rep) - std::exp(cplx(0.0, 1.0))) < 1e-12);
  CHECK(s.values(mate) == std::conj(s.values(rep)));
  int ones = 0;
  for (Eigen::Index k = 0; k < 4; ++k)
    if (std::abs(s.values(k) - cplx(1.0)) < 1e-12) ++ones;
  CHECK(ones == 2);
}

TEST_CASE("driven chain monodromy pairs close and projectors are flip partners") {
  const SampledMap sm = coherent_pair(1.0, 6.0);
  const ChannelSpectrum s = spectral_decompose_channel(sm.monodromy());
  bool has_one = false;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    if (std::abs(s.values(k) - cplx(1.0)) < 1e-8) has_one = true;
    if (!s.is_real(k)) {
      const int mate = s.partner[static_cast<std::size_t>(k)];
      CHECK(s.partner[static_cast<std::size_t>(mate)] == k);
      CHECK(s.values(mate) == std::conj(s.values(k)));
    }
  }
  CHECK(has_one);
  CHECK(s.n_c() <= 7);  // 2^(2L-1) - 1 for L = 2
  CHECK(oracle::max_abs(s.left * s.right - Matrix::Identity(16, 16)) < 1e-8);
  for (int rep : s.pairs) {
    const int mate = s.partner[static_cast<std::size_t>(rep)];
    CHECK(oracle::max_abs(s.projector(mate) - flip_conjugate(s.projector(rep))) < 1e-8);
  }
}

TEST_CASE("negative real eigenvalue is flagged") {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  const Matrix mix = 0.2 * Matrix::Identity(4, 4) + 0.8 * sandwich_superop(x, x);
  const Matrix v = expm(commutator_superop(0.3 * pauli_z())) * mix;
  try {
    spectral_decompose_channel(v);
    FAIL("expected NegativeRealEigenvalue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeRealEigenvalue);
  }
  CHECK_THROWS_AS(spectral_decompose_channel(0.5 * Matrix::Identity(4, 4)), Error);
}

TEST_CASE("principal generator") {
  const BranchFamily id(spectral_decompose_channel(Matrix::Identity(4, 4)), 1.0);
  CHECK(oracle::max_abs(id.principal()) < 1e-14);

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix l = oracle::random_lindbladian(3, rng);
    Eigen::ComplexEigenSolver<Matrix> es(l, false);
    const double period = 0.9 * M_PI / es.eigenvalues().imag().cwiseAbs().maxCoeff();
    const BranchFamily fam(spectral_decompose_channel(expm(period * l)), period);
    CHECK(oracle::max_abs(fam.principal() - l) < 1e-8 * oracle::max_abs(l));
    CHECK(hermiticity_defect(fam.principal()) < 1e-8);
  }

  for (int k : {1, 2, 3}) {
    const oracle::WindingCase w = oracle::winding_lindbladian(4, k, rng);
    const Matrix v = expm(w.period * w.generator);
    const BranchFamily fam(spectral_decompose_channel(v), w.period);
    const GeneratorCandidate s0 = principal_generator(fam);
    CHECK(s0.branch.is_zero());
    CHECK(oracle::max_abs(expm(w.period * s0.matrix) - v) < 1e-8);
    const double quantum = 2.0 * M_PI / w.period;
    int shifted = 0;
    for (cplx off : eigenvalue_offsets(w.generator, s0.matrix)) {
      const double units = off.imag() / quantum;
      CHECK(std::abs(off.real()) < 1e-6);
      CHECK(std::abs(units - std::round(units)) < 1e-6);
      if (std::lround(units) != 0) ++shifted;
    }
    CHECK(shifted >= 2);
  }
}

TEST_CASE("branch generators") {
  const double period = 1.0;
  const Matrix v = expm(commutator_superop(0.5 * pauli_z()));
  const ChannelSpectrum spec = spectral_decompose_channel(v);
  const BranchFamily fam(spec, period);
  const GeneratorCandidate s0 = principal_generator(fam);
  CHECK(fam.generator(BranchVector::zeros(1)).matrix == s0.matrix);

  const GeneratorCandidate s1 = fam.generator(BranchVector({1}));
  const int rep = spec.pairs[0];
  const int mate = spec.partner[static_cast<std::size_t>(rep)];
  const Vector r = spec.right.col(rep), rm = spec.right.col(mate);
  const cplx principal_value = log_principal(spec.values(rep)) / period;
  CHECK(std::abs(r.dot(s1.matrix * r) / r.squaredNorm() - (principal_value + I_unit * 2.0 * M_PI / period)) < 1e-12);
  CHECK(std::abs(rm.dot(s1.matrix * rm) / rm.squaredNorm() - std::conj(principal_value + I_unit * 2.0 * M_PI / period)) <
        1e-12);

  const SampledMap sm = coherent_pair(1.0, 3.0);
  const ChannelSpectrum chain = spectral_decompose_channel(sm.monodromy());
  const BranchFamily cf(chain, sm.period);
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> pick(-3, 3);
  for (int trial = 0; trial < 10; ++trial) {
    BranchVector x = BranchVector::zeros(static_cast<std::size_t>(cf.n_c()));
    for (auto& s : x.shifts) s = pick(rng);
    const GeneratorCandidate sx = cf.generator(x);
    CHECK(sx.branch == x);
    CHECK(oracle::max_abs(expm(sm.period * sx.matrix) - sm.monodromy()) < 1e-8);
    CHECK(hermiticity_defect(sx.matrix) < 1e-8);
    BranchVector neg = x;
    for (auto& s : neg.shifts) s = -s;
    const GeneratorCandidate back = branch_generator(sx, cf, neg);
    CHECK(oracle::max_abs(back.matrix - cf.principal()) < 1e-10);
    CHECK(back.branch.is_zero());
  }

  BranchVector big = BranchVector::zeros(static_cast<std::size_t>(cf.n_c()));
  big.shifts[0] = 65;
  CHECK_THROWS_AS(cf.generator(big), Error);
  CHECK_THROWS_AS(cf.generator(BranchVector({1})), Error);
}

TEST_CASE("Floquet modes of static semigroups") {
  std::mt19937_64 rng(33);
  const Matrix l = oracle::random_lindbladian(2, rng);
  Eigen::ComplexEigenSolver<Matrix> es(l, false);
  const double calm = 0.8 * M_PI / es.eigenvalues().imag().cwiseAbs().maxCoeff();
  const SampledMap flat = static_semigroup(l, calm, 32);
  const ModeSeries modes = floquet_mode_samples(spectral_decompose_channel(flat.monodromy()), flat);
  for (const Matrix& series : modes.pairs)
    for (int m = 0; m <= 32; ++m) CHECK(oracle::max_abs(series.row(m) - series.row(0)) < 1e-8);

  const oracle::WindingCase w = oracle::winding_lindbladian(2, 2, rng);
  const SampledMap sm = static_semigroup(w.generator, w.period, 64);
  const ChannelSpectrum spec = spectral_decompose_channel(sm.monodromy());
  const ModeSeries wound = floquet_mode_samples(spec, sm);
  bool any_winding = false;
  for (const Matrix& series : wound.pairs) {
    CHECK(oracle::max_abs(series.row(64) - series.row(0)) < 1e-6);
    // series.row(m) = exp(i omega x t_m) row(0) for one integer x
    const cplx ratio = series.row(1).dot(series.row(0)) / series.row(0).squaredNorm();
    const double x = std::arg(std::conj(ratio)) * 64.0 / (2.0 * M_PI);
    CHECK(std::abs(x - std::round(x)) < 1e-6);
    if (std::lround(x) != 0) any_winding = true;
    for (int m = 0; m <= 64; ++m) {
      const cplx phase = std::polar(1.0, 2.0 * M_PI * std::round(x) * m / 64.0);
      CHECK(oracle::max_abs(series.row(m) - phase * series.row(0)) < 1e-8);
    }
  }
  CHECK(any_winding);

  const SampledMap id = static_semigroup(Matrix::Zero(4, 4), 1.0, 8);
  const ModeSeries none = floquet_mode_samples(spectral_decompose_channel(id.monodromy()), id);
  CHECK(none.pairs.empty());
}

TEST_CASE("Fourier profile of synthetic series") {
  const Eigen::Index d = 2;
  const int n_t = 16;
  const Matrix v = Matrix::Random(d, d);
  ModeSeries constant{d, n_t, 1.0, {Matrix(n_t + 1, d * d)}};
  ModeSeries third = constant;
  for (int m = 0; m <= n_t; ++m) {
    constant.pairs[0].row(m) = vec(v).transpose();
    third.pairs[0].row(m) = std::polar(1.0, 2.0 * M_PI * 3.0 * m / n_t) * vec(v).transpose();
  }
  const FourierProfile pc = fourier_profile(constant);
  CHECK(pc.pairs[0].ranked[0].harmonic == 0);
  CHECK(pc.pairs[0].ranked[0].amplitude == doctest::Approx(trace_norm(v)).epsilon(1e-12));
  CHECK(pc.pairs[0].ranked[1].amplitude < 1e-12);
  CHECK(pc.pairs[0].ranked.size() == static_cast<std::size_t>(n_t));

  const FourierProfile p3 = fourier_profile(third);
  CHECK(p3.pairs[0].ranked[0].harmonic == 3);
  CHECK(p3.pairs[0].amplitude_at(3) == doctest::Approx(trace_norm(v)).epsilon(1e-12));
  CHECK(p3.pairs[0].amplitude_at(0) < 1e-12);

  // Frobenius Parseval and tie-break on equal amplitudes
  ModeSeries mixed = constant;
  for (int m = 0; m <= n_t; ++m)
    mixed.pairs[0].row(m) = (std::polar(1.0, 2.0 * M_PI * 2.0 * m / n_t) + std::polar(1.0, -2.0 * M_PI * 2.0 * m / n_t) +
                             std::polar(1.0, 2.0 * M_PI * 1.0 * m / n_t)) *
                            vec(v).transpose();
  const FourierProfile pm = fourier_profile(mixed);
  double lhs = 0.0, rhs = 0.0;
  for (int k = 0; k < n_t; ++k) lhs += pm.components[0].row(k).squaredNorm();
  for (int m = 0; m < n_t; ++m) rhs += mixed.pairs[0].row(m).squaredNorm() / n_t;
  CHECK(std::abs(lhs - rhs) < 1e-8 * rhs);
  CHECK(pm.pairs[0].ranked[0].harmonic == 1);
  CHECK(pm.pairs[0].ranked[1].harmonic == -2);
  CHECK(pm.pairs[0].ranked[2].harmonic == 2);
}

TEST_CASE("low-frequency drive spreads the Fourier weight") {
  const SampledMap sm = coherent_pair(2.0, 1.5);
  const FourierProfile prof = fourier_profile(floquet_mode_samples(spectral_decompose_channel(sm.monodromy()), sm));
  int broad = 0;
  for (const PairProfile& p : prof.pairs)
    if (p.ranked[1].amplitude >= 0.5 * p.ranked[0].amplitude) ++broad;
  CHECK(broad >= 1);
}

TEST_CASE("unwinding recovers static generators") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 6; ++trial) {
    const oracle::WindingCase w = oracle::winding_lindbladian(4, 1 + trial % 3, rng);
    const SampledMap sm = static_semigroup(w.generator, w.period, 256);
    const ChannelSpectrum spec = spectral_decompose_channel(sm.monodromy());
    const BranchFamily fam(spec, w.period);
    const UnwoundGenerator u = unwind::unwind(fourier_profile(floquet_mode_samples(spec, sm)), fam);
    CHECK(oracle::max_abs(u.generator.matrix - w.generator) < 1e-6 * oracle::max_abs(w.generator));
    CHECK_FALSE(u.x_max.is_zero());
    CHECK(oracle::max_abs(fam.principal() - w.generator) > 1e-3);
  }

  const Matrix l = oracle::random_lindbladian(2, rng, 0.1);
  const SampledMap calm = static_semigroup(l, 1.0, 32);
  const ChannelSpectrum spec = spectral_decompose_channel(calm.monodromy());
  const BranchFamily fam(spec, 1.0);
  const UnwoundGenerator u = unwind::unwind(fourier_profile(floquet_mode_samples(spec, calm)), fam);
  CHECK(u.x_max.is_zero());
  CHECK(u.generator.matrix == fam.principal());
}

TEST_CASE("branch sets") {
  const BranchSet s = standard_branch_set(1, 1);
  const auto all = s.materialize();
  REQUIRE(all.size() == 3);
  CHECK(all[0] == BranchVector({-1}));
  CHECK(all[1] == BranchVector({0}));
  CHECK(all[2] == BranchVector({1}));
  CHECK(standard_branch_set(7, 1).size() == 2187);
  CHECK(standard_cardinality(31, 1) == doctest::Approx(6.176733962839470e14));
  try {
    standard_branch_set(31, 1);
    FAIL("expected CardinalityOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CardinalityOverflow);
  }

  const BranchSet lex({{2, 0}, {-1, 1}}, true);
  const auto order = lex.materialize();
  REQUIRE(order.size() == 5);
  CHECK(order[0] == BranchVector({0, 0}));
  CHECK(order[1] == BranchVector({2, -1}));
  CHECK(order[2] == BranchVector({2, 1}));
  CHECK(order[3] == BranchVector({0, -1}));
  CHECK(order[4] == BranchVector({0, 1}));
  CHECK(BranchVector({0, -1, 12}).str() == "0;-1;12");
}

TEST_CASE("modified branch sets") {
  FourierProfile prof;
  prof.n_t = 16;
  prof.pairs = {synthetic_profile({{2, 1.0}, {1, 0.9}, {3, 0.8}, {0, 0.1}}),
                synthetic_profile({{-1, 1.0}, {0, 0.5}, {1, 0.2}}),
                synthetic_profile({{0, 1.0}, {4, 0.95}, {1, 0.1}})};

  const ModifiedBranchSet only_main = modified_branch_set(prof, 1.0, 2);
  CHECK(only_main.n_tilde == 0);
  CHECK(only_main.set.size() == 2);
  const auto main = only_main.set.materialize();
  CHECK(main[0].is_zero());
  CHECK(main[1] == BranchVector({2, -1, 0}));
  CHECK(modified_branch_set(prof, 0.5, 0).set.size() == 2);

  const ModifiedBranchSet m = modified_branch_set(prof, 0.7, 2);
  CHECK(m.z == std::vector<int>{2, 0, 1});
  CHECK(m.n_tilde == 2);
  CHECK(m.set.size() == 3 * 1 * 2 + 1);
  CHECK(m.set.materialize().size() == m.set.size());

  const ModifiedBranchSet loose = modified_branch_set(prof, 0.05, 1);
  CHECK(loose.z == std::vector<int>{1, 1, 1});
  CHECK(loose.set.size() == 2 * 2 * 2 + 1);  // (N_b + 1)^{N~_c} + 1

  CHECK_THROWS_AS(modified_branch_set(prof, 1.5, 1), Error);
  CHECK_THROWS_AS(modified_branch_set(prof, -0.1, 1), Error);

  FourierProfile zero_inside = prof;
  zero_inside.pairs = {synthetic_profile({{0, 1.0}, {1, 0.9}})};
  CHECK(modified_branch_set(zero_inside, 0.5, 1).set.size() == 2);
  CHECK(modified_branch_set(zero_inside, 1.0, 1).set.size() == 1);
}

TEST_CASE("modified set cardinality matches the emitted set") {
  std::mt19937_64 rng(35);
  std::uniform_real_distribution<double> amp(0.0, 1.0), eta(0.0, 1.0);
  std::uniform_int_distribution<int> harm(-4, 4), pairs(1, 5), nb(0, 3);
  for (int trial = 0; trial < 50; ++trial) {
    FourierProfile prof;
    prof.n_t = 16;
    const int n_c = pairs(rng);
    for (int c = 0; c < n_c; ++c) {
      std::set<int> used;
      std::vector<std::pair<int, double>> peaks;
      while (peaks.size() < 6) {
        const int h = harm(rng);
        if (used.insert(h).second) peaks.push_back({h, amp(rng)});
      }
      std::sort(peaks.begin(), peaks.end(), [](auto a, auto b) { return a.second > b.second; });
      prof.pairs.push_back(synthetic_profile(peaks));
    }
    const ModifiedBranchSet m = modified_branch_set(prof, eta(rng), nb(rng));
    const auto all = m.set.materialize();
    CHECK(all.size() == m.set.size());
    const std::set<BranchVector> unique(all.begin(), all.end());
    CHECK(unique.size() == all.size());
    CHECK(unique.count(BranchVector::zeros(static_cast<std::size_t>(n_c))) == 1);
    std::uint64_t product = 1;
    for (int z : m.z) product *= static_cast<std::uint64_t>(z + 1);
    CHECK(m.set.size() == product + (m.set.prepends_principal() ? 1 : 0));
  }
}
