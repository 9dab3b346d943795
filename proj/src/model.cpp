#include "tlreflect/model.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace tlr {

void ModelSpec::validate(const Tolerance& tol) const {
  if (n == 0) throw Error(ErrorCode::InvalidModel, "n must be positive");
  if (lambdas.size() != n || exponents.size() != n) {
    throw Error(ErrorCode::InvalidModel,
                "lambdas and exponents must both have length n");
  }
  for (std::size_t a = 0; a < n; ++a) {
    if (std::abs(lambdas[a]) <= tol.eps_rank) {
      throw Error(ErrorCode::InvalidModel,
                  "lambda_" + std::to_string(a) + " is numerically zero");
    }
    for (std::size_t b = a + 1; b < n; ++b) {
      if (std::abs(lambdas[a] - lambdas[b]) <= tol.eps_rank) {
        throw Error(ErrorCode::InvalidModel,
                    "lambdas must be pairwise distinct (" + std::to_string(a) +
                        " vs " + std::to_string(b) + ")");
      }
    }
  }
  if (vw) {
    const auto& [v, w] = *vw;
    if (v.size() != n || w.size() != n) {
      throw Error(ErrorCode::InvalidModel, "V and W must have length n");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(v[i]) <= tol.eps_rank || std::abs(w[i]) <= tol.eps_rank) {
        throw Error(ErrorCode::InvalidModel, "V and W entries must be nonzero");
      }
    }
  }
  if (h) {
    if (h->rows() != n || h->cols() != n) {
      throw Error(ErrorCode::InvalidModel, "H must be n x n");
    }
  }
}

ModelSpec ModelSpec::fourier(std::size_t n, Branch branch) {
  ModelSpec spec;
  spec.n = n;
  spec.branch = branch;
  spec.lambdas.resize(n);
  spec.exponents.resize(n);
  for (std::size_t a = 0; a < n; ++a) {
    spec.lambdas[a] =
        std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(a) /
                            static_cast<double>(n));
    spec.exponents[a] = static_cast<long>(a);
  }
  return spec;
}

CMatrix build_master_matrix(const ModelSpec& spec) {
  spec.validate();
  CMatrix omega(spec.n, spec.n);
  for (std::size_t a = 0; a < spec.n; ++a)
    for (std::size_t b = 0; b < spec.n; ++b)
      omega(a, b) = int_pow(spec.lambdas[a], spec.exponents[b]);
  return omega;
}

HadamardVerdict validate_model(const ModelSpec& spec, const Tolerance& tol) {
  spec.validate(tol);
  const CMatrix omega = build_master_matrix(spec);
  const std::size_t n = spec.n;

  HadamardVerdict verdict;
  std::vector<cplx> weights(n, cplx(1.0, 0.0));
  cplx trace = static_cast<double>(n);
  if (spec.has_vw()) {
    const auto& [v, w] = *spec.vw;
    verdict = is_vw_hadamard(omega, v, w, tol);
    trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      weights[i] = v[i] * w[i];
      trace += weights[i];
    }
  } else {
    verdict = is_generalized_hadamard(omega, tol);
  }

  // sum rule: sum_i (lambda_j / lambda_r)^{n_i} weight_i = tr(WV) delta_rj
  double sum_rule = 0.0;
  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += int_pow(spec.lambdas[j] / spec.lambdas[r], spec.exponents[i]) *
               weights[i];
      }
      const cplx expected = (r == j) ? trace : cplx(0.0, 0.0);
      sum_rule += std::norm(acc - expected);
      scale += std::norm(acc) + std::norm(expected);
    }
  }
  sum_rule = std::sqrt(sum_rule) / (1.0 + std::sqrt(scale));

  verdict.residual = std::max(verdict.residual, sum_rule);
  verdict.passes = verdict.residual <= tol.eps_rel;
  return verdict;
}

cplx solve_qprime(std::size_t n, Branch branch) {
  if (n == 0) throw Error(ErrorCode::InvalidModel, "n must be positive");
  const double nd = static_cast<double>(n);
  const cplx disc = std::sqrt(cplx(nd - 4.0, 0.0));
  const cplx root = (branch == Branch::Plus) ? (-std::sqrt(nd) + disc) / 2.0
                                             : (-std::sqrt(nd) - disc) / 2.0;
  return root;
}

TLData build_tl_data(const ModelSpec& spec, const Tolerance& tol) {
  const HadamardVerdict verdict = validate_model(spec, tol);
  if (!verdict.passes) {
    throw Error(ErrorCode::NotHadamard,
                "Master matrix fails its Hadamard property with residual " +
                    std::to_string(verdict.residual));
  }

  TLData data;
  data.spec = spec;
  data.omega = build_master_matrix(spec);
  data.qprime = solve_qprime(spec.n, spec.branch);
  data.q = std::sqrt(static_cast<double>(spec.n)) * data.qprime;
  data.lambda_diag = CMatrix::diagonal(spec.lambdas);

  const std::size_t n = spec.n;
  CMatrix p_inv;
  if (spec.h) {
    data.p = build_P(data.omega, *spec.h, tol);
    p_inv = inverse(data.p, tol);
  } else {
    data.p = CMatrix::identity(n);
    p_inv = data.p;
  }
  data.m = data.p * data.lambda_diag * p_inv;

  // M^k = P diag(lambda_i^k) P^{-1}, exact integer powers on the diagonal
  const auto m_power = [&](long k) {
    std::vector<cplx> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = int_pow(spec.lambdas[i], k);
    return data.p * CMatrix::diagonal(diag) * p_inv;
  };

  data.t_gen = CMatrix(n * n, n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      cplx coeff = 1.0;
      if (spec.has_vw()) coeff = spec.vw->first[a] * spec.vw->second[b];
      const CMatrix mp = m_power(spec.exponents[a] - spec.exponents[b]);
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
          data.t_gen(a * n + k, b * n + l) += coeff * mp(k, l);
    }
  }
  data.x_gen = (1.0 / std::sqrt(static_cast<double>(n))) * data.t_gen;

  // Master basis: columns are v_(j) with components lambda_j^{n_i},
  // weighted by V_i in the V-W case.
  data.s_basis = data.omega.transpose();
  if (spec.has_vw()) {
    const auto& v = spec.vw->first;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) data.s_basis(i, j) *= v[i];
  }
  return data;
}

double TLCheckReport::worst() const {
  double w = std::max({idempotent, braid_left, braid_right});
  if (distant_commute) w = std::max(w, *distant_commute);
  return w;
}

TLCheckReport tl_check(const TLData& data, const Tolerance&, bool four_sites) {
  const std::size_t n = data.spec.n;
  const CMatrix& x = data.x_gen;
  const CMatrix eye = CMatrix::identity(n);
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  TLCheckReport report;
  report.idempotent = rel_residual(x * x, cplx(sqrt_n, 0.0) * x);

  const CMatrix x1 = kron(x, eye);
  const CMatrix x2 = kron(eye, x);
  report.braid_left = rel_residual(x1 * x2 * x1, x1);
  report.braid_right = rel_residual(x2 * x1 * x2, x2);

  if (four_sites) {
    const CMatrix eye2 = CMatrix::identity(n * n);
    const CMatrix y1 = kron(x, eye2);
    const CMatrix y3 = kron(eye2, x);
    report.distant_commute = rel_residual(y1 * y3, y3 * y1);
  }
  return report;
}

} // namespace tlr
