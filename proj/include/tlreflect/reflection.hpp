#pragma once

#include "tlreflect/model.hpp"

namespace tlr {

/// Rank-one projector attached to eigenvalue r, entries
/// mu(k, i) = lambda_r^{n_k - n_i}, weighted V_k W_i in the V-W case.
/// Satisfies mu^2 = tr(WV) mu (tr = n in the plain case) and diagonalizes to
/// tr(WV) e_rr in the Master basis.
struct MuProjector {
  std::size_t r = 0; // zero-based eigenvalue index
  CMatrix matrix;
};

/// Master-basis change matrix and its inverse. Columns of s are the basis
/// vectors with components lambda_j^{n_i} (times V_i in the V-W case).
struct MasterBasis {
  CMatrix s;
  CMatrix s_inv;
};

/// Constant R-matrix in braid normalization: R = q I + T on the two-site
/// space. With q^2 + n q + n = 0 this satisfies
///   (R x I)(I x R)(R x I) = (I x R)(R x I)(I x R),
/// and permutation_op(n) * R solves the three-space Yang-Baxter equation.
CMatrix build_R(const TLData& data);

/// Braid-relation residual of build_R(data) on the three-site space.
double ybe_residual(const TLData& data, const Tolerance& tol = {});

/// Reflection-equation residual for a boundary matrix k on one factor:
/// rel_residual(R K1 R K1, K1 R K1 R) with K1 = k (x) I.
double reflection_residual(const CMatrix& r_mat, const CMatrix& k);

MuProjector build_mu(const TLData& data, std::size_t r);

MasterBasis master_basis(const TLData& data, const Tolerance& tol = {});

CMatrix to_master(const MasterBasis& basis, const CMatrix& k);
CMatrix from_master(const MasterBasis& basis, const CMatrix& k);

/// One-space algebraic residual for eigenvalue index r:
/// (Tr mu K)(mu K - K mu) = q (K^2 mu - mu K^2), with k in the original basis.
double algebraic_residual(const TLData& data, const CMatrix& k, std::size_t r);

/// Componentwise residuals |K_rr K_rj + (q/n)(K^2)_rj| and the jr mirror for
/// all ordered pairs r != j, normalized by (1 + ||K||_F^2). k_master must be
/// expressed in the Master basis.
std::vector<double> component_residuals(const TLData& data, const CMatrix& k_master);

} // namespace tlr
