#pragma once

#include "tlreflect/numerics.hpp"

namespace tlr {

enum class HadamardProperty { Plain, VW };

/// Outcome of a Hadamard property check. Residuals are kept alongside the
/// boolean so callers can report margins.
struct HadamardVerdict {
  bool passes = false;
  double residual = 0.0;
  HadamardProperty property = HadamardProperty::Plain;
};

/// Entrywise reciprocal. Throws Error{ZeroEntry} when some |u_ij| falls at
/// or below eps_rank.
CMatrix hadamard_inverse(const CMatrix& u, const Tolerance& tol = {});

/// Checks U^{-H} = n (U^{-1})^t for a square matrix with nonzero entries.
HadamardVerdict is_generalized_hadamard(const CMatrix& u, const Tolerance& tol = {});

/// Checks the weighted variant U^{-H} V W U^t = tr(WV) I, with v and w
/// recast as diagonal matrices. Throws Error{DegenerateTrace} when
/// sum_i v_i w_i is numerically zero.
HadamardVerdict is_vw_hadamard(const CMatrix& u, std::span<const cplx> v,
                               std::span<const cplx> w, const Tolerance& tol = {});

/// entry(a, b) = exp(2 pi i a b / n), zero-based indices.
CMatrix fourier_matrix(std::size_t n);

/// P = Omega^{-1} H for any H with the generalized Hadamard property.
/// Throws Error{NotHadamard} when h fails the check.
CMatrix build_P(const CMatrix& omega, const CMatrix& h, const Tolerance& tol = {});

} // namespace tlr
