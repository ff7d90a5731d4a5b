#include "unwind/propagate.hpp"

#include <cmath>
#include <string>

#include "unwind/superop.hpp"

namespace unwind {

std::string_view to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::PeriodicLindbladian: return "periodic-lindbladian";
    case GeneratorKind::Static: return "static";
    case GeneratorKind::ConvexMixture: return "convex-mixture";
  }
  return "unknown";
}

double smallest_singular_value(const Matrix& a) {
  const RealVector sv = singular_values(a);
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

void check_sampled_map(const SampledMap& sampled, double tol_tp, double tol_herm) {
  for (std::size_t n = 0; n < sampled.maps.size(); ++n) {
    const Matrix& v = sampled.maps[n];
    if (!is_finite(v)) throw Error(ErrorCode::NonFinite, "sampled map is not finite");
    const double tp = trace_preservation_defect(v);
    if (tp > tol_tp)
      throw Error(ErrorCode::ToleranceNotMet,
                  "trace-preservation drift " + std::to_string(tp) + " at sample " + std::to_string(n));
    const double herm = hermiticity_defect(v);
    if (herm > tol_herm)
      throw Error(ErrorCode::ToleranceNotMet,
                  "hermiticity drift " + std::to_string(herm) + " at sample " + std::to_string(n));
  }
}

SampledMap propagate_periodic(const TimeDependentGenerator& generator, double period,
                              const PropagationOptions& options) {
  if (options.n_t < 1 || options.n_steps < 1 || options.n_steps % options.n_t != 0)
    throw Error(ErrorCode::StepCountInvalid, "n_steps must be a positive multiple of n_t");
  if (!(period > 0.0)) throw Error(ErrorCode::StepCountInvalid, "period must be positive");

  const double h = period / options.n_steps;
  const double r3 = std::sqrt(3.0);
  const double node1 = 0.5 - r3 / 6.0;
  const double node2 = 0.5 + r3 / 6.0;
  const double w_small = (3.0 - 2.0 * r3) / 12.0;
  const double w_large = (3.0 + 2.0 * r3) / 12.0;

  Matrix current = generator(0.0);
  require_square(current, "generator");
  const Eigen::Index n = current.rows();
  current = Matrix::Identity(n, n);

  SampledMap out;
  out.period = period;
  out.n_t = options.n_t;
  out.kind = GeneratorKind::PeriodicLindbladian;
  out.maps.reserve(static_cast<std::size_t>(options.n_t) + 1);
  out.maps.push_back(current);

  const int stride = options.n_steps / options.n_t;
  for (int step = 0; step < options.n_steps; ++step) {
    const double t0 = h * step;
    const Matrix a1 = generator(t0 + node1 * h);
    const Matrix a2 = generator(t0 + node2 * h);
    const Matrix early = expm(h * (w_large * a1 + w_small * a2));
    const Matrix late = expm(h * (w_small * a1 + w_large * a2));
    current = late * (early * current);
    if ((step + 1) % stride == 0) out.maps.push_back(current);
  }
  check_sampled_map(out, options.tol_tp, options.tol_herm);
  return out;
}

namespace {

std::vector<Matrix> semigroup_powers(const Matrix& generator, double period, int n_t) {
  require_square(generator, "generator");
  const Matrix step = expm(generator * (period / n_t));
  std::vector<Matrix> maps;
  maps.reserve(static_cast<std::size_t>(n_t) + 1);
  maps.push_back(Matrix::Identity(generator.rows(), generator.cols()));
  for (int k = 1; k <= n_t; ++k) maps.push_back(step * maps.back());
  return maps;
}

}  // namespace

SampledMap static_semigroup(const Matrix& generator, double period, int n_t, double tol_tp) {
  if (n_t < 1 || !(period > 0.0)) throw Error(ErrorCode::StepCountInvalid, "invalid sampling");
  SampledMap out;
  out.period = period;
  out.n_t = n_t;
  out.kind = GeneratorKind::Static;
  out.maps = semigroup_powers(generator, period, n_t);
  check_sampled_map(out, tol_tp, tol_tp);
  return out;
}

SampledMap convex_mixture_map(const Matrix& first, const Matrix& second, double lambda,
                              double period, int n_t, double tol_tp) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw Error(ErrorCode::LambdaOutOfRange, "mixing weight must lie in [0, 1]");
  if (n_t < 1 || !(period > 0.0)) throw Error(ErrorCode::StepCountInvalid, "invalid sampling");
  if (first.rows() != second.rows() || first.cols() != second.cols())
    throw Error(ErrorCode::DimensionMismatch, "mixture generators differ in size");
  const std::vector<Matrix> one = semigroup_powers(first, period, n_t);
  const std::vector<Matrix> two = semigroup_powers(second, period, n_t);
  SampledMap out;
  out.period = period;
  out.n_t = n_t;
  out.kind = GeneratorKind::ConvexMixture;
  out.maps.reserve(one.size());
  for (std::size_t k = 0; k < one.size(); ++k) out.maps.push_back(lambda * one[k] + (1.0 - lambda) * two[k]);
  check_sampled_map(out, tol_tp, tol_tp);
  return out;
}

}  // namespace unwind
