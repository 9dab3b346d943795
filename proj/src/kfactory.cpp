#include "tlreflect/kfactory.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tlr {

const char* block_kind_name(BlockKind kind) {
  switch (kind) {
    case BlockKind::Zero: return "zero";
    case BlockKind::Nilpotent: return "nilpotent";
    case BlockKind::Involution: return "involution";
    case BlockKind::TwoEigen: return "two_eigen";
  }
  return "unknown";
}

std::size_t DClass::size() const {
  std::size_t total = 0;
  for (const SubBlock& sub : subblocks) total += sub.size;
  return total;
}

std::size_t KBlockPlan::total_size() const {
  std::size_t total = 0;
  for (const DClass& cls : classes) total += cls.size();
  return total;
}

void KBlockPlan::validate(std::size_t n, const Tolerance& tol) const {
  if (classes.empty()) {
    throw Error(ErrorCode::ConfigInvalid, "plan needs at least one class");
  }
  if (total_size() != n) {
    throw Error(ErrorCode::ConfigInvalid,
                "class sizes sum to " + std::to_string(total_size()) +
                    ", expected " + std::to_string(n));
  }
  std::size_t zero_classes = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const DClass& cls = classes[c];
    const bool is_zero = std::abs(cls.d) <= tol.eps_rank;
    if (is_zero) ++zero_classes;
    if (cls.subblocks.empty()) {
      throw Error(ErrorCode::ConfigInvalid,
                  "class " + std::to_string(c) + " has no subblocks");
    }
    for (const SubBlock& sub : cls.subblocks) {
      const bool ok = sub.kind == BlockKind::Zero ||
                      (is_zero ? (sub.kind == BlockKind::Nilpotent ||
                                  sub.kind == BlockKind::Involution)
                               : sub.kind == BlockKind::TwoEigen);
      if (!ok) {
        throw Error(ErrorCode::ConfigInvalid,
                    std::string(block_kind_name(sub.kind)) +
                        " subblock not admissible in a class with d" +
                        (is_zero ? " = 0" : " != 0"));
      }
      if (sub.size == 0) {
        throw Error(ErrorCode::ConfigInvalid, "subblock of size zero");
      }
      switch (sub.kind) {
        case BlockKind::Nilpotent:
          if (sub.rank == 0 || 2 * sub.rank > sub.size) {
            throw Error(ErrorCode::ConfigInvalid,
                        "nilpotent block needs 1 <= m and 2m <= t");
          }
          break;
        case BlockKind::Involution:
          if (sub.size % 2 != 0) {
            throw Error(ErrorCode::ConfigInvalid,
                        "involution block size must be even");
          }
          if (std::abs(sub.delta_prime) <= tol.eps_rank) {
            throw Error(ErrorCode::ConfigInvalid, "delta_prime must be nonzero");
          }
          break;
        case BlockKind::TwoEigen:
          if (sub.rank == 0 || sub.rank >= sub.size || sub.size == 2 * sub.rank) {
            throw Error(ErrorCode::ConfigInvalid,
                        "two-eigenvalue block needs 1 <= m' < s and s != 2m'");
          }
          break;
        case BlockKind::Zero:
          break;
      }
    }
    for (std::size_t c2 = c + 1; c2 < classes.size(); ++c2) {
      if (std::abs(cls.d - classes[c2].d) <= tol.eps_rank) {
        throw Error(ErrorCode::ConfigInvalid,
                    "classes " + std::to_string(c) + " and " +
                        std::to_string(c2) + " share the same d value");
      }
    }
  }
  if (zero_classes > 1) {
    throw Error(ErrorCode::ConfigInvalid, "at most one class may have d = 0");
  }
}

std::pair<cplx, cplx> eigen_pair(std::size_t s, std::size_t m_prime) {
  if (m_prime == 0 || m_prime >= s) {
    throw Error(ErrorCode::BadShape, "need 1 <= m' < s");
  }
  if (s == 2 * m_prime) {
    throw Error(ErrorCode::DegenerateSplit,
                "s = 2m' makes the eigenvalue pair singular");
  }
  const double sd = static_cast<double>(s);
  const double md = static_cast<double>(m_prime);
  const double denom = sd - 2.0 * md;
  return {cplx((md - sd) / denom, 0.0), cplx(md / denom, 0.0)};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t class_index,
                          std::uint64_t sub_index) {
  const auto splitmix = [](std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  };
  return splitmix(seed ^ splitmix((class_index << 32) | (sub_index + 1)));
}

namespace {

// ---- real-vector packing of rectangular pairs (A, B) ----

std::vector<double> pack_ab(const CMatrix& a, const CMatrix& b) {
  std::vector<double> x;
  x.reserve(2 * (a.entries().size() + b.entries().size()));
  for (const cplx& z : a.entries()) {
    x.push_back(z.real());
    x.push_back(z.imag());
  }
  for (const cplx& z : b.entries()) {
    x.push_back(z.real());
    x.push_back(z.imag());
  }
  return x;
}

std::pair<CMatrix, CMatrix> unpack_ab(const std::vector<double>& x,
                                      std::size_t rows, std::size_t cols) {
  CMatrix a(rows, cols);
  CMatrix b(rows, cols);
  std::size_t idx = 0;
  for (cplx& z : a.entries()) {
    z = {x[idx], x[idx + 1]};
    idx += 2;
  }
  for (cplx& z : b.entries()) {
    z = {x[idx], x[idx + 1]};
    idx += 2;
  }
  return {std::move(a), std::move(b)};
}

void append_complex(std::vector<double>& out, cplx z) {
  out.push_back(z.real());
  out.push_back(z.imag());
}

// A (B^t A)^{-1} B^t; Error{SingularCross} when the cross matrix degenerates.
CMatrix oblique_projector(const CMatrix& a, const CMatrix& b,
                          const Tolerance& tol) {
  const CMatrix cross = b.transpose() * a;
  CMatrix cross_inv;
  try {
    cross_inv = inverse(cross, tol);
  } catch (const Error&) {
    throw Error(ErrorCode::SingularCross, "B^t A is not invertible");
  }
  return a * cross_inv * b.transpose();
}

// ---- damped Gauss-Newton on stacked real residuals ----

struct NewtonOutcome {
  std::vector<double> x;
  double residual = 0.0;
  bool converged = false;
};

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double t : v) s += t * t;
  return std::sqrt(s);
}

NewtonOutcome gauss_newton(const RealFn& f, std::vector<double> x,
                           const Tolerance& tol, int max_iter = 100) {
  NewtonOutcome out;
  std::vector<double> res = f(x);
  double rnorm = norm2(res);
  double damping = 1e-10;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (rnorm <= tol.eps_newton) break;
    const CMatrix jac = fd_jacobian(f, x, tol);
    const std::size_t p = x.size();
    // normal matrix J^t J (real symmetric) and gradient J^t res
    CMatrix normal(p, p);
    std::vector<double> grad(p, 0.0);
    for (std::size_t i = 0; i < jac.rows(); ++i) {
      for (std::size_t j = 0; j < p; ++j) {
        const double jij = jac(i, j).real();
        grad[j] += jij * res[i];
        for (std::size_t k = j; k < p; ++k) {
          normal(j, k) += jij * jac(i, k).real();
        }
      }
    }
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t k = 0; k < j; ++k) normal(j, k) = normal(k, j);

    bool accepted = false;
    for (int attempt = 0; attempt < 25 && !accepted; ++attempt) {
      CMatrix damped = normal;
      for (std::size_t j = 0; j < p; ++j) damped(j, j) += damping;
      CMatrix damped_inv;
      try {
        damped_inv = inverse(damped, tol);
      } catch (const Error&) {
        damping *= 10.0;
        continue;
      }
      std::vector<double> trial(p);
      for (std::size_t j = 0; j < p; ++j) {
        double step = 0.0;
        for (std::size_t k = 0; k < p; ++k)
          step += damped_inv(j, k).real() * grad[k];
        trial[j] = x[j] - step;
      }
      const std::vector<double> trial_res = f(trial);
      const double trial_norm = norm2(trial_res);
      if (trial_norm < rnorm) {
        x = std::move(trial);
        res = trial_res;
        rnorm = trial_norm;
        damping = std::max(damping * 0.3, 1e-14);
        accepted = true;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted) break;
  }
  out.x = std::move(x);
  out.residual = rnorm;
  out.converged = rnorm <= tol.eps_newton;
  return out;
}

// diagonal-of-oblique-projector constraint, target m'/s (two-eigen) or 1/2
// (involution); stacked as re/im pairs
RealFn diag_projector_constraint(std::size_t s, std::size_t m, double target,
                                 const Tolerance& tol) {
  return [s, m, target, tol](const std::vector<double>& x) {
    const auto [a, b] = unpack_ab(x, s, m);
    const CMatrix proj = oblique_projector(a, b, tol);
    std::vector<double> out;
    out.reserve(2 * s);
    for (std::size_t i = 0; i < s; ++i) {
      append_complex(out, proj(i, i) - target);
    }
    return out;
  };
}

RealFn nilpotent_constraint(std::size_t t, std::size_t m) {
  return [t, m](const std::vector<double>& x) {
    const auto [a, b] = unpack_ab(x, t, m);
    const CMatrix cross = b.transpose() * a;
    const CMatrix n = a * b.transpose();
    std::vector<double> out;
    out.reserve(2 * (m * m + t));
    for (const cplx& z : cross.entries()) append_complex(out, z);
    for (std::size_t i = 0; i < t; ++i) append_complex(out, n(i, i));
    return out;
  };
}

CMatrix realize_two_eigen(const CMatrix& a, const CMatrix& b, cplx z1, cplx z2,
                          const Tolerance& tol) {
  CMatrix block = (z1 - z2) * oblique_projector(a, b, tol);
  for (std::size_t i = 0; i < block.rows(); ++i) block(i, i) += z2;
  return block;
}

CMatrix realize_involution(const CMatrix& a, const CMatrix& b, cplx delta_prime,
                           const Tolerance& tol) {
  CMatrix block = cplx(-2.0, 0.0) * oblique_projector(a, b, tol);
  for (std::size_t i = 0; i < block.rows(); ++i) block(i, i) += 1.0;
  return std::sqrt(delta_prime) * block;
}

// Gauss-Newton from random starts until the diagonal constraint holds and
// B^t A stays invertible.
std::pair<CMatrix, CMatrix> solve_diag_projector(std::size_t s, std::size_t m,
                                                 double target,
                                                 std::uint64_t seed,
                                                 const Tolerance& tol) {
  const RealFn constraint = diag_projector_constraint(s, m, target, tol);
  for (std::uint64_t attempt = 0; attempt < 20; ++attempt) {
    Rng rng(derive_seed(seed, 0xD1A6, attempt));
    const CMatrix a0 = rng.complex_gaussian_matrix(s, m);
    const CMatrix b0 = rng.complex_gaussian_matrix(s, m);
    NewtonOutcome outcome;
    try {
      outcome = gauss_newton(constraint, pack_ab(a0, b0), tol);
    } catch (const Error&) {
      continue; // singular cross matrix mid-iteration; restart
    }
    if (!outcome.converged) continue;
    auto [a, b] = unpack_ab(outcome.x, s, m);
    try {
      oblique_projector(a, b, tol);
    } catch (const Error&) {
      continue;
    }
    return {std::move(a), std::move(b)};
  }
  throw Error(ErrorCode::NewtonFail,
              "diagonal constraint not solved after 20 restarts (s = " +
                  std::to_string(s) + ", m = " + std::to_string(m) + ")");
}

} // namespace

SubBlock make_zero_block(std::size_t size) {
  SubBlock sub;
  sub.kind = BlockKind::Zero;
  sub.size = size;
  sub.block = CMatrix(size, size);
  return sub;
}

SubBlock sample_nilpotent(std::size_t t, std::size_t m, std::uint64_t seed,
                          SampleMode mode, const Tolerance& tol) {
  if (m == 0 || 2 * m > t) {
    throw Error(ErrorCode::BadShape,
                "nilpotent block needs 1 <= m and 2m <= t");
  }
  Rng rng(seed);
  // A on rows 0..m-1, B on the complementary rows: B^t A = 0 and every
  // diagonal product vanishes by disjoint support, and no row of the pair is
  // zero (the moduli Jacobian is rank-deficient at such points).
  CMatrix a(t, m);
  CMatrix b(t, m);
  {
    const CMatrix top = rng.complex_gaussian_matrix(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = top(i, j);
    const CMatrix bottom = rng.complex_gaussian_matrix(t - m, m);
    for (std::size_t i = 0; i < t - m; ++i)
      for (std::size_t j = 0; j < m; ++j) b(m + i, j) = bottom(i, j);
  }

  if (mode == SampleMode::Generic) {
    // dense-looking exact solution: diagonal conjugation plus a gauge, then a
    // small perturbation pulled back onto the variety
    std::vector<cplx> diag(t);
    for (cplx& z : diag) z = std::exp(0.4 * rng.complex_gaussian());
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        a(i, j) *= diag[i];
        b(i, j) /= diag[i];
      }
    const RealFn constraint = nilpotent_constraint(t, m);
    bool refined = false;
    for (std::uint64_t attempt = 0; attempt < 20 && !refined; ++attempt) {
      CMatrix a_try = a;
      CMatrix b_try = b;
      Rng jitter(derive_seed(seed, 0x917, attempt));
      for (cplx& z : a_try.entries()) z += 0.05 * jitter.complex_gaussian();
      for (cplx& z : b_try.entries()) z += 0.05 * jitter.complex_gaussian();
      const NewtonOutcome outcome =
          gauss_newton(constraint, pack_ab(a_try, b_try), tol);
      if (!outcome.converged) continue;
      auto [a_new, b_new] = unpack_ab(outcome.x, t, m);
      if (numeric_rank(a_new * b_new.transpose(), tol) != m) continue;
      a = std::move(a_new);
      b = std::move(b_new);
      refined = true;
    }
    if (!refined) {
      throw Error(ErrorCode::NewtonFail,
                  "generic nilpotent refinement did not converge");
    }
  }

  SubBlock sub;
  sub.kind = BlockKind::Nilpotent;
  sub.size = t;
  sub.rank = m;
  sub.a = std::move(a);
  sub.b = std::move(b);
  sub.block = sub.a * sub.b.transpose();
  return sub;
}

SubBlock sample_involution(std::size_t s, cplx delta_prime, std::uint64_t seed,
                           SampleMode mode, const Tolerance& tol) {
  if (s % 2 != 0 || s == 0) {
    throw Error(ErrorCode::OddSize, "involution block size must be even");
  }
  if (std::abs(delta_prime) <= tol.eps_rank) {
    throw Error(ErrorCode::ConfigInvalid, "delta_prime must be nonzero");
  }
  const std::size_t m = s / 2;
  CMatrix a(s, m);
  CMatrix b(s, m);
  if (mode == SampleMode::Canonical) {
    // direct sum of 2x2 blocks [[0, x],[1/x, 0]]; pair i occupies rows
    // 2i, 2i+1 and factors through column i of A and B
    Rng rng(seed);
    for (std::size_t i = 0; i < m; ++i) {
      const cplx x = std::exp(0.5 * rng.complex_gaussian());
      a(2 * i, i) = 1.0;
      a(2 * i + 1, i) = -1.0 / x;
      b(2 * i, i) = 1.0;
      b(2 * i + 1, i) = -x;
    }
  } else {
    std::tie(a, b) = solve_diag_projector(s, m, 0.5, seed, tol);
  }

  SubBlock sub;
  sub.kind = BlockKind::Involution;
  sub.size = s;
  sub.rank = m;
  sub.delta_prime = delta_prime;
  sub.a = std::move(a);
  sub.b = std::move(b);
  sub.block = realize_involution(sub.a, sub.b, delta_prime, tol);
  return sub;
}

SubBlock sample_two_eigen(std::size_t s, std::size_t m_prime, std::uint64_t seed,
                          SampleMode mode, const Tolerance& tol) {
  const auto [z1, z2] = eigen_pair(s, m_prime);
  CMatrix a(s, m_prime);
  CMatrix b(s, m_prime);
  if (m_prime == 1) {
    // b_i = 1/a_i puts every diagonal entry of the projector at 1/s; this
    // closed form already sits at a generic point of the variety
    Rng rng(seed);
    for (std::size_t i = 0; i < s; ++i) {
      a(i, 0) = std::exp(0.5 * rng.complex_gaussian());
      b(i, 0) = 1.0 / a(i, 0);
    }
    (void)mode;
  } else {
    const double target = static_cast<double>(m_prime) / static_cast<double>(s);
    std::tie(a, b) = solve_diag_projector(s, m_prime, target, seed, tol);
  }

  SubBlock sub;
  sub.kind = BlockKind::TwoEigen;
  sub.size = s;
  sub.rank = m_prime;
  sub.a = std::move(a);
  sub.b = std::move(b);
  sub.block = realize_two_eigen(sub.a, sub.b, z1, z2, tol);
  return sub;
}

SubBlock gauge_transform(const SubBlock& sub, const CMatrix& u, const CMatrix* v,
                         const Tolerance& tol) {
  if (sub.kind == BlockKind::Zero) return sub;
  if (u.rows() != sub.rank || u.cols() != sub.rank) {
    throw Error(ErrorCode::ShapeMismatch, "gauge matrix must be rank x rank");
  }
  SubBlock out = sub;
  out.a = sub.a * u;
  if (sub.kind == BlockKind::Nilpotent) {
    if (v != nullptr) {
      throw Error(ErrorCode::BadShape,
                  "nilpotent gauge is a single U acting on both factors");
    }
    out.b = sub.b * inverse(u, tol).transpose();
    out.block = out.a * out.b.transpose();
    return out;
  }
  if (v != nullptr) {
    if (v->rows() != sub.rank || v->cols() != sub.rank) {
      throw Error(ErrorCode::ShapeMismatch, "gauge matrix must be rank x rank");
    }
    inverse(*v, tol); // invertibility check
    out.b = sub.b * (*v);
  }
  if (sub.kind == BlockKind::Involution) {
    out.block = realize_involution(out.a, out.b, sub.delta_prime, tol);
  } else {
    const auto [z1, z2] = eigen_pair(sub.size, sub.rank);
    out.block = realize_two_eigen(out.a, out.b, z1, z2, tol);
  }
  return out;
}

CMatrix scale_block(const CMatrix& w, cplx d, cplx q, std::size_t n,
                    const Tolerance& tol) {
  if (std::abs(d) <= tol.eps_rank) {
    throw Error(ErrorCode::ConfigInvalid, "scale_block needs d != 0");
  }
  const double nd = static_cast<double>(n);
  const cplx unit_coeff = 1.0 + 2.0 * q / nd;
  if (std::abs(unit_coeff) <= tol.eps_rank || std::abs(q) <= tol.eps_rank) {
    throw Error(ErrorCode::DegenerateCoefficient,
                "n + 2q is numerically zero; no scaled two-eigenvalue block "
                "exists for this model");
  }
  // K_d^o = ((n + 2q)/q) d W turns W^2 + W = delta I into the d-class
  // equation (q/n)(K^o)^2 + (1 + 2q/n) d K^o = diagonal.
  return ((nd / q) * unit_coeff * d) * w;
}

AssembledK assemble_K(const KBlockPlan& plan, const TLData& data,
                      std::uint64_t seed, const Tolerance& tol) {
  const std::size_t n = data.spec.n;
  plan.validate(n, tol);

  AssembledK result;
  result.k_master = CMatrix(n, n);
  result.sampled.resize(plan.classes.size());

  std::size_t offset = 0;
  for (std::size_t c = 0; c < plan.classes.size(); ++c) {
    const DClass& cls = plan.classes[c];
    const bool is_zero_class = std::abs(cls.d) <= tol.eps_rank;
    std::size_t sub_offset = offset;
    for (std::size_t u = 0; u < cls.subblocks.size(); ++u) {
      const SubBlock& req = cls.subblocks[u];
      const std::uint64_t child = derive_seed(seed, c, u);
      SubBlock sampled;
      switch (req.kind) {
        case BlockKind::Zero:
          sampled = make_zero_block(req.size);
          break;
        case BlockKind::Nilpotent:
          sampled = sample_nilpotent(req.size, req.rank, child,
                                     SampleMode::Canonical, tol);
          break;
        case BlockKind::Involution:
          sampled = sample_involution(req.size, req.delta_prime, child,
                                      SampleMode::Canonical, tol);
          break;
        case BlockKind::TwoEigen:
          sampled = sample_two_eigen(req.size, req.rank, child,
                                     SampleMode::Canonical, tol);
          break;
      }
      CMatrix placed = sampled.block;
      if (!is_zero_class && req.kind == BlockKind::TwoEigen) {
        placed = scale_block(placed, cls.d, data.q, n, tol);
      }
      for (std::size_t i = 0; i < sampled.size; ++i)
        for (std::size_t j = 0; j < sampled.size; ++j)
          result.k_master(sub_offset + i, sub_offset + j) = placed(i, j);
      sub_offset += sampled.size;
      result.sampled[c].push_back(std::move(sampled));
    }
    for (std::size_t i = offset; i < sub_offset; ++i) {
      result.k_master(i, i) += cls.d;
    }
    offset = sub_offset;
  }

  const MasterBasis basis = master_basis(data, tol);
  result.k_original = from_master(basis, result.k_master);
  return result;
}

long moduli_dim(BlockKind kind, std::size_t size, std::size_t rank) {
  const long s = static_cast<long>(size);
  const long m = static_cast<long>(rank);
  switch (kind) {
    case BlockKind::Zero:
      return 0;
    case BlockKind::Nilpotent:
      if (m <= 0 || 2 * m > s) {
        throw Error(ErrorCode::BadShape, "need 1 <= m and 2m <= t");
      }
      return 2 * m * (s - m) - s + 1;
    case BlockKind::Involution:
      if (s % 2 != 0 || s == 0) {
        throw Error(ErrorCode::OddSize, "involution size must be even");
      }
      return moduli_dim(BlockKind::TwoEigen, size, size / 2);
    case BlockKind::TwoEigen:
      if (m <= 0 || m >= s) {
        throw Error(ErrorCode::BadShape, "need 1 <= m' < s");
      }
      // the count is regular at s = 2m' even though the eigenvalues are not
      return 2 * m * s - 2 * m * m - s + 1;
  }
  throw Error(ErrorCode::BadShape, "unknown block kind");
}

ModuliReport numeric_moduli_check(const SubBlock& sub, const Tolerance& tol) {
  ModuliReport report;
  report.expected_complex = moduli_dim(sub.kind, sub.size, sub.rank);
  if (sub.kind == BlockKind::Zero) {
    report.passes = true;
    return report;
  }

  const std::size_t rows = sub.size;
  const std::size_t cols = sub.rank;
  RealFn constraint;
  switch (sub.kind) {
    case BlockKind::Nilpotent:
      constraint = nilpotent_constraint(rows, cols);
      break;
    case BlockKind::Involution:
      constraint = diag_projector_constraint(rows, cols, 0.5, tol);
      break;
    case BlockKind::TwoEigen:
      constraint = diag_projector_constraint(
          rows, cols, static_cast<double>(cols) / static_cast<double>(rows), tol);
      break;
    default:
      break;
  }

  const std::vector<double> x0 = pack_ab(sub.a, sub.b);
  report.n_params_real = x0.size();
  if (norm2(constraint(x0)) > 100.0 * tol.eps_newton) {
    throw Error(ErrorCode::NewtonFail,
                "sample does not satisfy its constraints to eps_newton");
  }

  const CMatrix jac = fd_jacobian(constraint, x0, tol);
  report.constraint_rank = numeric_rank(jac, tol);
  {
    Tolerance halved = tol;
    halved.fd_step = tol.fd_step / 2.0;
    const CMatrix jac_halved = fd_jacobian(constraint, x0, halved);
    if (numeric_rank(jac_halved, tol) != report.constraint_rank) {
      throw Error(ErrorCode::RankUnstable,
                  "Jacobian rank changes under fd_step halving; resample");
    }
  }
  report.tangent_real = report.n_params_real - report.constraint_rank;

  // gauge generators: dA = A u (all families); dB = -B u^t (nilpotent,
  // shared gauge) or dB = B v (independent second gauge)
  std::vector<std::vector<double>> directions;
  const auto push_direction = [&](const CMatrix& da, const CMatrix& db) {
    directions.push_back(pack_ab(da, db));
  };
  const CMatrix zero_like(rows, cols);
  for (std::size_t k = 0; k < cols; ++k) {
    for (std::size_t l = 0; l < cols; ++l) {
      for (const cplx unit : {cplx(1.0, 0.0), cplx(0.0, 1.0)}) {
        CMatrix u(cols, cols);
        u(k, l) = unit;
        if (sub.kind == BlockKind::Nilpotent) {
          push_direction(sub.a * u, cplx(-1.0, 0.0) * (sub.b * u.transpose()));
        } else {
          push_direction(sub.a * u, zero_like);
          push_direction(zero_like, sub.b * u);
        }
      }
    }
  }
  CMatrix gauge(report.n_params_real, directions.size());
  for (std::size_t j = 0; j < directions.size(); ++j)
    for (std::size_t i = 0; i < report.n_params_real; ++i)
      gauge(i, j) = directions[j][i];
  report.gauge_real = numeric_rank(gauge, tol);

  report.moduli_real = static_cast<long>(report.tangent_real) -
                       static_cast<long>(report.gauge_real);
  report.passes = report.moduli_real == 2 * report.expected_complex;
  return report;
}

} // namespace tlr
