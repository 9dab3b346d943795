#pragma once

#include <cmath>
#include <optional>

#include "tlreflect/model.hpp"

namespace tlr::testing {

// Builds TLData without the Hadamard validation gate, so tests can push
// non-Hadamard models and wrong loop parameters through the checks.
// Restricted to models without H (P = I, M = Lambda).
inline TLData make_raw_tl_data(const ModelSpec& spec,
                               std::optional<cplx> q_override = {}) {
  TLData data;
  data.spec = spec;
  data.omega = build_master_matrix(spec);
  data.qprime = solve_qprime(spec.n, spec.branch);
  data.q = q_override.value_or(std::sqrt(static_cast<double>(spec.n)) *
                               data.qprime);
  data.lambda_diag = CMatrix::diagonal(spec.lambdas);
  data.p = CMatrix::identity(spec.n);
  data.m = data.lambda_diag;

  const std::size_t n = spec.n;
  data.t_gen = CMatrix(n * n, n * n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      cplx coeff = 1.0;
      if (spec.has_vw()) coeff = spec.vw->first[a] * spec.vw->second[b];
      for (std::size_t k = 0; k < n; ++k) {
        data.t_gen(a * n + k, b * n + k) =
            coeff * int_pow(spec.lambdas[k], spec.exponents[a] - spec.exponents[b]);
      }
    }
  data.x_gen = (1.0 / std::sqrt(static_cast<double>(n))) * data.t_gen;
  data.s_basis = data.omega.transpose();
  if (spec.has_vw()) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        data.s_basis(i, j) *= spec.vw->first[i];
  }
  return data;
}

} // namespace tlr::testing
