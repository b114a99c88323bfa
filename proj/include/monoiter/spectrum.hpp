#pragma once

#include <vector>

#include "monoiter/field.hpp"

namespace monoiter {

struct SpectrumOptions {
  int max_iterations = 500;
  /// Convergence of the wanted Ritz values, relative to max(lambda_k, shift).
  double tol = 1e-11;
  /// Domains up to this size are solved densely.
  int dense_limit = 400;
};

/// The k smallest eigenvalues of L x = lambda M x in ascending order. Small
/// domains use a dense symmetric eigensolve of M^{-1/2} L M^{-1/2}; larger ones
/// use shift-and-invert subspace iteration with Rayleigh-Ritz, where each
/// inverse is a conjugate-gradient solve with L + shift * M.
std::vector<double> smallest_eigenvalues(const DomainPtr& domain, int k,
                                         const SpectrumOptions& options = {});

}  // namespace monoiter
