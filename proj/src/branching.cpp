#include "unwind/branching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "unwind/superop.hpp"

namespace unwind {

bool BranchVector::is_zero() const {
  return std::all_of(shifts.begin(), shifts.end(), [](int x) { return x == 0; });
}

int BranchVector::max_abs() const {
  int m = 0;
  for (int x : shifts) m = std::max(m, std::abs(x));
  return m;
}

std::string BranchVector::str() const {
  std::string out;
  for (std::size_t c = 0; c < shifts.size(); ++c) {
    if (c) out += ';';
    out += std::to_string(shifts[c]);
  }
  return out;
}

std::string_view to_string(BranchTag tag) {
  switch (tag) {
    case BranchTag::Principal: return "principal";
    case BranchTag::Unwound: return "unwound";
    case BranchTag::Modified: return "modified";
    case BranchTag::Standard: return "standard";
    case BranchTag::Explicit: return "explicit";
  }
  return "unknown";
}

Matrix ChannelSpectrum::projector(Eigen::Index mu) const {
  return right.col(mu) * left.row(mu);
}

cplx ChannelSpectrum::quasienergy(Eigen::Index mu, double period) const {
  return I_unit * log_principal(values(mu)) / period;
}

ChannelSpectrum spectral_decompose_channel(const Matrix& v, const SpectrumTolerances& tols) {
  require_square(v, "channel");
  const Eigen::Index d = superop_dim(v);
  if (trace_preservation_defect(v) > tols.tol_channel)
    throw Error(ErrorCode::NotTracePreserving, "map is not trace preserving");
  if (hermiticity_defect(v) > tols.tol_channel)
    throw Error(ErrorCode::NotHermiticityPreserving, "map is not hermiticity preserving");

  const EigenSystem es = eig_general(v, tols.cond_max);
  const Eigen::Index n = v.rows();

  ChannelSpectrum spec;
  spec.d = d;
  spec.values = es.values;
  spec.right = es.right;
  spec.condition = es.condition;
  spec.partner.assign(static_cast<std::size_t>(n), -1);

  std::vector<Eigen::Index> upper, lower;
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx z = es.values(k);
    const double mod = std::abs(z);
    if (mod < tols.tol_singular)
      throw Error(ErrorCode::SingularEigenvalue, "map has an eigenvalue of modulus below tolerance");
    if (std::abs(z.imag()) < tols.tol_pair * mod) {
      if (z.real() < 0.0)
        throw Error(ErrorCode::NegativeRealEigenvalue,
                    "real negative eigenvalue: no hermiticity-preserving logarithm");
      spec.values(k) = cplx(z.real(), 0.0);
    } else if (z.imag() > 0.0) {
      upper.push_back(k);
    } else {
      lower.push_back(k);
    }
  }
  if (upper.size() != lower.size())
    throw Error(ErrorCode::UnmatchedPair, "complex eigenvalues do not pair up");

  std::vector<bool> taken(lower.size(), false);
  for (Eigen::Index rep : upper) {
    const cplx target = std::conj(es.values(rep));
    std::size_t best = lower.size();
    double best_dist = 0.0;
    for (std::size_t j = 0; j < lower.size(); ++j) {
      if (taken[j]) continue;
      const double dist = std::abs(es.values(lower[j]) - target);
      if (best == lower.size() || dist < best_dist) {
        best = j;
        best_dist = dist;
      }
    }
    if (best == lower.size() || best_dist > tols.tol_pair * (1.0 + std::abs(target)))
      throw Error(ErrorCode::UnmatchedPair, "no conjugate partner within tolerance");
    taken[best] = true;
    const Eigen::Index mate = lower[best];
    spec.partner[static_cast<std::size_t>(rep)] = static_cast<int>(mate);
    spec.partner[static_cast<std::size_t>(mate)] = static_cast<int>(rep);
    spec.values(mate) = target;
    spec.right.col(mate) = flip_vector(es.right.col(rep), d);
    spec.pairs.push_back(static_cast<int>(rep));
  }
  std::sort(spec.pairs.begin(), spec.pairs.end());

  Eigen::PartialPivLU<Matrix> lu(spec.right);
  spec.left = lu.inverse();
  if (!spec.left.allFinite())
    throw Error(ErrorCode::NonDiagonalizable, "paired eigenvector matrix is singular");
  const Matrix rebuilt = spec.right * spec.values.asDiagonal() * spec.left;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  if ((rebuilt - v).cwiseAbs().maxCoeff() > 1e-8 * scale)
    throw Error(ErrorCode::NonDiagonalizable, "paired eigenbasis does not reconstruct the map");
  return spec;
}

BranchFamily::BranchFamily(const ChannelSpectrum& spectrum, double period, int x_cap)
    : period_(period), x_cap_(x_cap) {
  if (!(period > 0.0)) throw Error(ErrorCode::StepCountInvalid, "period must be positive");
  const Eigen::Index n = spectrum.values.size();

  std::vector<Eigen::Index> real_idx;
  for (Eigen::Index k = 0; k < n; ++k)
    if (spectrum.is_real(k)) real_idx.push_back(k);

  Matrix real_part = Matrix::Zero(n, n);
  for (Eigen::Index k : real_idx)
    real_part += (std::log(spectrum.values(k).real()) / period) * spectrum.projector(k);
  real_part = 0.5 * (real_part + flip_conjugate(real_part));

  Matrix pair_part = Matrix::Zero(n, n);
  const double quantum = 2.0 * M_PI / period;
  shift_ops_.reserve(spectrum.pairs.size());
  for (int rep : spectrum.pairs) {
    const Matrix p = spectrum.projector(rep);
    pair_part += (log_principal(spectrum.values(rep)) / period) * p;
    shift_ops_.push_back(I_unit * quantum * (p - flip_conjugate(p)));
  }
  principal_ = real_part + pair_part + flip_conjugate(pair_part);
}

Matrix BranchFamily::shifted(const Matrix& base, const BranchVector& x) const {
  if (static_cast<int>(x.size()) != n_c())
    throw Error(ErrorCode::DimensionMismatch, "branch vector length differs from pair count");
  if (x.max_abs() > x_cap_) throw Error(ErrorCode::CapExceeded, "branch index exceeds cap");
  Matrix out = base;
  for (int c = 0; c < n_c(); ++c)
    if (x[static_cast<std::size_t>(c)] != 0)
      out += static_cast<double>(x[static_cast<std::size_t>(c)]) * shift_ops_[static_cast<std::size_t>(c)];
  return out;
}

GeneratorCandidate BranchFamily::generator(const BranchVector& x, BranchTag tag) const {
  return {shifted(principal_, x), x, tag};
}

GeneratorCandidate principal_generator(const BranchFamily& family) {
  return family.generator(BranchVector::zeros(static_cast<std::size_t>(family.n_c())), BranchTag::Principal);
}

GeneratorCandidate branch_generator(const GeneratorCandidate& base, const BranchFamily& family,
                                    const BranchVector& x) {
  GeneratorCandidate out;
  out.matrix = family.shifted(base.matrix, x);
  out.branch = base.branch.size() == x.size() ? base.branch : BranchVector::zeros(x.size());
  for (std::size_t c = 0; c < x.size(); ++c) out.branch.shifts[c] += x[c];
  out.method = BranchTag::Explicit;
  return out;
}

ModeSeries floquet_mode_samples(const ChannelSpectrum& spectrum, const SampledMap& sampled,
                                double tol_invertible) {
  if (sampled.maps.size() != static_cast<std::size_t>(sampled.n_t) + 1)
    throw Error(ErrorCode::DimensionMismatch, "sampled map must hold n_t + 1 samples");
  for (const Matrix& v : sampled.maps)
    if (smallest_singular_value(v) <= tol_invertible)
      throw Error(ErrorCode::NotInvertible, "dynamical map is not invertible at a sample");

  const Eigen::Index n = spectrum.values.size();
  const int n_c = spectrum.n_c();
  Matrix reps(n, n_c);
  Vector logs(n_c);
  for (int c = 0; c < n_c; ++c) {
    reps.col(c) = spectrum.right.col(spectrum.pairs[static_cast<std::size_t>(c)]);
    logs(c) = log_principal(spectrum.values(spectrum.pairs[static_cast<std::size_t>(c)]));
  }

  ModeSeries out;
  out.d = spectrum.d;
  out.n_t = sampled.n_t;
  out.period = sampled.period;
  out.pairs.assign(static_cast<std::size_t>(n_c), Matrix(sampled.n_t + 1, n));
  for (int m = 0; m <= sampled.n_t; ++m) {
    const Matrix evolved = sampled.maps[static_cast<std::size_t>(m)] * reps;
    const double frac = static_cast<double>(m) / static_cast<double>(sampled.n_t);
    for (int c = 0; c < n_c; ++c)
      out.pairs[static_cast<std::size_t>(c)].row(m) = std::exp(-logs(c) * frac) * evolved.col(c).transpose();
  }
  return out;
}

double PairProfile::amplitude_at(int harmonic) const {
  for (const Peak& p : ranked)
    if (p.harmonic == harmonic) return p.amplitude;
  return 0.0;
}

FourierProfile fourier_profile(const ModeSeries& modes) {
  const int n_t = modes.n_t;
  if (n_t < 1) throw Error(ErrorCode::DimensionMismatch, "mode series is empty");
  const int lowest = -(n_t / 2);

  Matrix dft(n_t, n_t);
  for (int k = 0; k < n_t; ++k) {
    const long long harmonic = lowest + k;
    for (int m = 0; m < n_t; ++m) {
      long long phase = (harmonic * m) % n_t;
      if (phase < 0) phase += n_t;
      const double angle = -2.0 * M_PI * static_cast<double>(phase) / static_cast<double>(n_t);
      dft(k, m) = std::polar(1.0 / n_t, angle);
    }
  }

  FourierProfile out;
  out.n_t = n_t;
  for (const Matrix& series : modes.pairs) {
    Matrix comps = dft * series.topRows(n_t);
    PairProfile profile;
    profile.ranked.reserve(static_cast<std::size_t>(n_t));
    for (int k = 0; k < n_t; ++k)
      profile.ranked.push_back({lowest + k, trace_norm(unvec(comps.row(k).transpose(), modes.d))});
    double top = 0.0;
    for (const Peak& p : profile.ranked) top = std::max(top, p.amplitude);
    const double grain = top > 0.0 ? top * 1e-12 : 1.0;
    auto key = [grain](const Peak& p) { return std::llround(p.amplitude / grain); };
    std::sort(profile.ranked.begin(), profile.ranked.end(), [&](const Peak& a, const Peak& b) {
      if (key(a) != key(b)) return key(a) > key(b);
      if (std::abs(a.harmonic) != std::abs(b.harmonic)) return std::abs(a.harmonic) < std::abs(b.harmonic);
      return a.harmonic < b.harmonic;
    });
    out.pairs.push_back(std::move(profile));
    out.components.push_back(std::move(comps));
  }
  return out;
}

UnwoundGenerator unwind(const FourierProfile& profile, const BranchFamily& family) {
  if (static_cast<int>(profile.pairs.size()) != family.n_c())
    throw Error(ErrorCode::DimensionMismatch, "profile and branch family disagree on pair count");
  UnwoundGenerator out;
  out.x_max = BranchVector::zeros(profile.pairs.size());
  for (std::size_t c = 0; c < profile.pairs.size(); ++c)
    out.x_max.shifts[c] = profile.pairs[c].ranked.front().harmonic;
  out.generator = family.generator(out.x_max, BranchTag::Unwound);
  return out;
}

BranchSet::BranchSet(std::vector<std::vector<int>> choices, bool prepend_principal)
    : choices_(std::move(choices)), prepend_principal_(prepend_principal) {
  size_ = 1;
  for (const auto& list : choices_) size_ *= static_cast<std::uint64_t>(list.size());
  if (prepend_principal_) size_ += 1;
}

void BranchSet::for_each(const std::function<void(const BranchVector&)>& visit) const {
  const std::size_t n = choices_.size();
  if (prepend_principal_) visit(BranchVector::zeros(n));
  for (const auto& list : choices_)
    if (list.empty()) return;
  std::vector<std::size_t> odometer(n, 0);
  BranchVector x = BranchVector::zeros(n);
  for (std::size_t c = 0; c < n; ++c) x.shifts[c] = choices_[c][0];
  while (true) {
    visit(x);
    std::size_t c = n;
    while (c > 0) {
      --c;
      if (++odometer[c] < choices_[c].size()) {
        x.shifts[c] = choices_[c][odometer[c]];
        break;
      }
      odometer[c] = 0;
      x.shifts[c] = choices_[c][0];
      if (c == 0) return;
    }
    if (n == 0) return;
  }
}

std::vector<BranchVector> BranchSet::materialize() const {
  std::vector<BranchVector> out;
  out.reserve(static_cast<std::size_t>(size_));
  for_each([&](const BranchVector& x) { out.push_back(x); });
  return out;
}

long double standard_cardinality(int n_c, int radius) {
  return std::pow(static_cast<long double>(2 * radius + 1), static_cast<long double>(n_c));
}

BranchSet standard_branch_set(int n_c, int radius, double budget) {
  if (n_c < 0 || radius < 0) throw Error(ErrorCode::DimensionMismatch, "negative pair count or radius");
  const long double count = standard_cardinality(n_c, radius);
  if (count > static_cast<long double>(budget)) {
    std::ostringstream msg;
    msg << "standard branch set holds " << static_cast<double>(count) << " candidates, budget "
        << budget;
    throw Error(ErrorCode::CardinalityOverflow, msg.str());
  }
  std::vector<int> grid;
  for (int x = -radius; x <= radius; ++x) grid.push_back(x);
  return BranchSet(std::vector<std::vector<int>>(static_cast<std::size_t>(n_c), grid), false);
}

ModifiedBranchSet modified_branch_set(const FourierProfile& profile, double eta, int n_b,
                                      double budget) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::EtaOutOfRange, "eta must lie in [0, 1]");
  if (n_b < 0) throw Error(ErrorCode::EtaOutOfRange, "N_b must be nonnegative");

  ModifiedBranchSet out;
  std::vector<std::vector<int>> choices;
  bool product_has_zero = true;
  long double count = 1.0L;
  for (const PairProfile& pair : profile.pairs) {
    const double top = pair.ranked.front().amplitude;
    int passing = 0;
    if (top > 0.0)
      for (std::size_t i = 1; i < pair.ranked.size(); ++i) {
        if (pair.ranked[i].amplitude / top >= eta) ++passing;
        else break;
      }
    const int z = std::min(n_b, passing);
    out.z.push_back(z);
    if (z >= 1) ++out.n_tilde;
    std::vector<int> list;
    for (int i = 0; i <= z; ++i) list.push_back(pair.ranked[static_cast<std::size_t>(i)].harmonic);
    if (std::find(list.begin(), list.end(), 0) == list.end()) product_has_zero = false;
    count *= static_cast<long double>(list.size());
    choices.push_back(std::move(list));
  }
  if (!product_has_zero) count += 1.0L;
  if (count > static_cast<long double>(budget)) {
    std::ostringstream msg;
    msg << "modified branch set holds " << static_cast<double>(count) << " candidates, budget " << budget;
    throw Error(ErrorCode::CardinalityOverflow, msg.str());
  }
  out.set = BranchSet(std::move(choices), !product_has_zero);
  return out;
}

}  // namespace unwind
