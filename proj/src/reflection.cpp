#include "tlreflect/reflection.hpp"

#include <cmath>

namespace tlr {

CMatrix build_R(const TLData& data) {
  const std::size_t n2 = data.spec.n * data.spec.n;
  CMatrix r = data.t_gen;
  for (std::size_t i = 0; i < n2; ++i) r(i, i) += data.q;
  return r;
}

double ybe_residual(const TLData& data, const Tolerance&) {
  const CMatrix r = build_R(data);
  const CMatrix eye = CMatrix::identity(data.spec.n);
  const CMatrix r1 = kron(r, eye);
  const CMatrix r2 = kron(eye, r);
  return rel_residual(r1 * r2 * r1, r2 * r1 * r2);
}

double reflection_residual(const CMatrix& r_mat, const CMatrix& k) {
  if (!k.is_square() || r_mat.rows() != k.rows() * k.rows() ||
      !r_mat.is_square()) {
    throw Error(ErrorCode::ShapeMismatch,
                "need R of shape n^2 x n^2 and k of shape n x n");
  }
  const CMatrix k1 = kron(k, CMatrix::identity(k.rows()));
  return rel_residual(r_mat * k1 * r_mat * k1, k1 * r_mat * k1 * r_mat);
}

MuProjector build_mu(const TLData& data, std::size_t r) {
  const std::size_t n = data.spec.n;
  if (r >= n) {
    throw Error(ErrorCode::BadShape, "eigenvalue index out of range");
  }
  CMatrix mu(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx value = int_pow(data.spec.lambdas[r],
                           data.spec.exponents[k] - data.spec.exponents[i]);
      if (data.spec.has_vw()) {
        value *= data.spec.vw->first[k] * data.spec.vw->second[i];
      }
      mu(k, i) = value;
    }
  }
  return {r, std::move(mu)};
}

MasterBasis master_basis(const TLData& data, const Tolerance& tol) {
  MasterBasis basis;
  basis.s = data.s_basis;
  basis.s_inv = inverse(basis.s, tol);
  return basis;
}

CMatrix to_master(const MasterBasis& basis, const CMatrix& k) {
  return basis.s_inv * k * basis.s;
}

CMatrix from_master(const MasterBasis& basis, const CMatrix& k) {
  return basis.s * k * basis.s_inv;
}

double algebraic_residual(const TLData& data, const CMatrix& k, std::size_t r) {
  const CMatrix mu = build_mu(data, r).matrix;
  const CMatrix mu_k = mu * k;
  const CMatrix k_sq = k * k;
  const CMatrix lhs = mu_k.trace() * (mu_k - k * mu);
  const CMatrix rhs = data.q * (k_sq * mu - mu * k_sq);
  return rel_residual(lhs, rhs);
}

std::vector<double> component_residuals(const TLData& data,
                                        const CMatrix& k_master) {
  const std::size_t n = data.spec.n;
  if (k_master.rows() != n || k_master.cols() != n) {
    throw Error(ErrorCode::ShapeMismatch, "k_master must be n x n");
  }
  const CMatrix k_sq = k_master * k_master;
  const cplx q_over_n = data.q / static_cast<double>(n);
  const double norm_sq = k_master.frobenius_norm() * k_master.frobenius_norm();
  const double scale = 1.0 + norm_sq;

  std::vector<double> out;
  out.reserve(n * (n - 1) * 2);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      if (r == j) continue;
      const cplx rj = k_master(r, r) * k_master(r, j) + q_over_n * k_sq(r, j);
      const cplx jr = k_master(r, r) * k_master(j, r) + q_over_n * k_sq(j, r);
      out.push_back(std::abs(rj) / scale);
      out.push_back(std::abs(jr) / scale);
    }
  }
  return out;
}

} // namespace tlr
