#pragma once

#include <optional>

#include "tlreflect/hadamard.hpp"
#include "tlreflect/numerics.hpp"

namespace tlr {

enum class Branch { Plus, Minus };

/// Defining data of a representation: the eigenvalues and integer exponents
/// of the auxiliary matrix M, the branch of the loop parameter, and the
/// optional weight vectors and basis-changing Hadamard matrix.
struct ModelSpec {
  std::size_t n = 0;
  std::vector<cplx> lambdas;
  std::vector<long> exponents;
  Branch branch = Branch::Plus;
  std::optional<std::pair<std::vector<cplx>, std::vector<cplx>>> vw;
  std::optional<CMatrix> h;

  bool has_vw() const { return vw.has_value(); }

  /// Throws Error{InvalidModel} unless sizes are consistent, every lambda is
  /// nonzero and pairwise distinct, and V, W entries (when given) are nonzero.
  void validate(const Tolerance& tol = {}) const;

  static ModelSpec fourier(std::size_t n, Branch branch = Branch::Plus);
};

/// Everything derived from a ModelSpec that downstream checks consume.
struct TLData {
  ModelSpec spec;
  CMatrix omega;       // Master matrix, omega(a,b) = lambda_a^{n_b}
  cplx qprime = 0.0;   // root of z^2 + sqrt(n) z + 1 = 0
  cplx q = 0.0;        // sqrt(n) * qprime
  CMatrix lambda_diag; // Lambda
  CMatrix p;           // P = Omega^{-1} H, identity when h absent
  CMatrix m;           // M = P Lambda P^{-1}
  CMatrix t_gen;       // unnormalized generator, n^2 x n^2
  CMatrix x_gen;       // X = T / sqrt(n)
  CMatrix s_basis;     // Master-basis change matrix, Omega^t (weighted by V)
};

CMatrix build_master_matrix(const ModelSpec& spec);

/// Hadamard check on the Master matrix (plain or V-W as the spec dictates),
/// combined with the equivalent eigenvalue sum rule
///   sum_i (lambda_j / lambda_r)^{n_i} (V_i W_i) = tr(WV) delta_rj.
/// The reported residual is the worse of the two.
HadamardVerdict validate_model(const ModelSpec& spec, const Tolerance& tol = {});

/// Root of z^2 + sqrt(n) z + 1 = 0. The two branches are mutual inverses and
/// coincide at n = 4 where the discriminant vanishes.
cplx solve_qprime(std::size_t n, Branch branch);

TLData build_tl_data(const ModelSpec& spec, const Tolerance& tol = {});

struct TLCheckReport {
  double idempotent = 0.0;      // X^2 = sqrt(n) X
  double braid_left = 0.0;      // X1 X2 X1 = X1
  double braid_right = 0.0;     // X2 X1 X2 = X2
  std::optional<double> distant_commute; // [X1, X3] = 0 on four sites
  double worst() const;
  bool passes(double eps) const { return worst() <= eps; }
};

/// Temperley-Lieb relation residuals on the three-site space (optionally the
/// distant-commutation relation on four sites). Failures are reported, not
/// thrown.
TLCheckReport tl_check(const TLData& data, const Tolerance& tol = {},
                       bool four_sites = false);

} // namespace tlr
