#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "unwind/numkernel.hpp"

namespace unwind {

enum class GeneratorKind { PeriodicLindbladian, Static, ConvexMixture };

std::string_view to_string(GeneratorKind kind);

/// Dynamical map sampled at t_n = n T / n_t for n = 0..n_t (both ends).
struct SampledMap {
  double period = 0.0;
  int n_t = 0;
  std::vector<Matrix> maps;
  GeneratorKind kind = GeneratorKind::Static;

  double time(int n) const { return period * static_cast<double>(n) / static_cast<double>(n_t); }
  const Matrix& monodromy() const { return maps.back(); }
};

using TimeDependentGenerator = std::function<Matrix(double)>;

struct PropagationOptions {
  int n_t = 256;
  int n_steps = 2048;  // integrator steps per period, multiple of n_t
  double tol_tp = 1e-8;
  double tol_herm = 1e-8;
};

/// Integrates dV/dt = L(t) V, V(0) = 1 over one period with the fourth-order
/// commutator-free Magnus scheme on Gauss-Legendre nodes. Each step is a
/// product of two exponentials of combinations of L at the two nodes.
SampledMap propagate_periodic(const TimeDependentGenerator& generator, double period,
                              const PropagationOptions& options = {});

SampledMap static_semigroup(const Matrix& generator, double period, int n_t = 256,
                            double tol_tp = 1e-8);

/// V(t) = lambda exp(t L1) + (1 - lambda) exp(t L2).
SampledMap convex_mixture_map(const Matrix& first, const Matrix& second, double lambda,
                              double period, int n_t = 256, double tol_tp = 1e-8);

double smallest_singular_value(const Matrix& a);

/// Throws ToleranceNotMet when a sample drifts from trace or hermiticity
/// preservation by more than the given tolerances.
void check_sampled_map(const SampledMap& sampled, double tol_tp = 1e-8, double tol_herm = 1e-8);

}  // namespace unwind
