#include "tlreflect/hadamard.hpp"

#include <cmath>
#include <numbers>

namespace tlr {

CMatrix hadamard_inverse(const CMatrix& u, const Tolerance& tol) {
  CMatrix out(u.rows(), u.cols());
  for (std::size_t i = 0; i < u.rows(); ++i) {
    for (std::size_t j = 0; j < u.cols(); ++j) {
      const cplx z = u(i, j);
      if (std::abs(z) <= tol.eps_rank) {
        throw Error(ErrorCode::ZeroEntry,
                    "entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is numerically zero");
      }
      out(i, j) = 1.0 / z;
    }
  }
  return out;
}

HadamardVerdict is_generalized_hadamard(const CMatrix& u, const Tolerance& tol) {
  if (!u.is_square()) {
    throw Error(ErrorCode::ShapeMismatch, "Hadamard check needs a square matrix");
  }
  const double n = static_cast<double>(u.rows());
  const CMatrix lhs = hadamard_inverse(u, tol);
  const CMatrix rhs = cplx(n, 0.0) * inverse(u, tol).transpose();
  const double residual = rel_residual(lhs, rhs);
  return {residual <= tol.eps_rel, residual, HadamardProperty::Plain};
}

HadamardVerdict is_vw_hadamard(const CMatrix& u, std::span<const cplx> v,
                               std::span<const cplx> w, const Tolerance& tol) {
  if (!u.is_square() || v.size() != u.rows() || w.size() != u.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "V, W must match the matrix dimension");
  }
  cplx trace_wv = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) trace_wv += v[i] * w[i];
  if (std::abs(trace_wv) <= tol.eps_rank) {
    throw Error(ErrorCode::DegenerateTrace,
                "tr(WV) is numerically zero; the V-W condition degenerates");
  }
  const CMatrix lhs = hadamard_inverse(u, tol) * CMatrix::diagonal(v) *
                      CMatrix::diagonal(w) * u.transpose();
  const CMatrix rhs = trace_wv * CMatrix::identity(u.rows());
  const double residual = rel_residual(lhs, rhs);
  return {residual <= tol.eps_rel, residual, HadamardProperty::VW};
}

CMatrix fourier_matrix(std::size_t n) {
  CMatrix out(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double phase = 2.0 * std::numbers::pi *
                           static_cast<double>((a * b) % n) / static_cast<double>(n);
      out(a, b) = std::polar(1.0, phase);
    }
  }
  return out;
}

CMatrix build_P(const CMatrix& omega, const CMatrix& h, const Tolerance& tol) {
  const HadamardVerdict verdict = is_generalized_hadamard(h, tol);
  if (!verdict.passes) {
    throw Error(ErrorCode::NotHadamard,
                "H fails the generalized Hadamard property with residual " +
                    std::to_string(verdict.residual));
  }
  return inverse(omega, tol) * h;
}

} // namespace tlr
