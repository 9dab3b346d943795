#pragma once

#include "tlreflect/reflection.hpp"

namespace tlr {

enum class BlockKind { Zero, Nilpotent, Involution, TwoEigen };

const char* block_kind_name(BlockKind kind);

/// One off-diagonal building block of a K matrix in the Master basis.
/// Nilpotent and the two-eigenvalue families carry the rectangular
/// parametrization (a, b); `block` is the realized matrix:
///   Nilpotent:  N = A B^t           with B^t A = 0, diag N = 0, N^2 = 0
///   Involution: sqrt(delta') (I - 2 A (B^t A)^{-1} B^t), zero diagonal
///   TwoEigen:   z2 I + (z1 - z2) A (B^t A)^{-1} B^t, zero diagonal, trace 0
struct SubBlock {
  BlockKind kind = BlockKind::Zero;
  std::size_t size = 0;      // t (nilpotent) or s
  std::size_t rank = 0;      // m, s/2, or m'
  cplx delta_prime = 0.0;    // involution target: block^2 = delta' I
  CMatrix a;
  CMatrix b;
  CMatrix block;
};

/// A maximal set of Master-basis indices sharing one diagonal value d.
/// d = 0 admits Zero/Nilpotent/Involution subblocks, d != 0 admits
/// Zero/TwoEigen.
struct DClass {
  cplx d = 0.0;
  std::vector<SubBlock> subblocks;
  std::size_t size() const;
};

struct KBlockPlan {
  std::vector<DClass> classes;
  std::size_t total_size() const;
  /// Structural invariants: sizes sum to n, pairwise-distinct d values, at
  /// most one d = 0 class, subblock kinds compatible with their class.
  void validate(std::size_t n, const Tolerance& tol = {}) const;
};

/// Eigenvalues (z1, z2) = ((m'-s)/(s-2m'), m'/(s-2m')) of a traceless
/// two-eigenvalue block with z1 + z2 = -1 and multiplicity m' for z1.
/// Throws Error{DegenerateSplit} when s = 2m'.
std::pair<cplx, cplx> eigen_pair(std::size_t s, std::size_t m_prime);

/// Canonical samples are closed-form and cheap; Generic samples sit at a
/// generic point of the constraint variety (Gauss-Newton refined where no
/// closed form exists) as the numeric moduli check requires.
enum class SampleMode { Canonical, Generic };

SubBlock sample_nilpotent(std::size_t t, std::size_t m, std::uint64_t seed,
                          SampleMode mode = SampleMode::Canonical,
                          const Tolerance& tol = {});

SubBlock sample_involution(std::size_t s, cplx delta_prime, std::uint64_t seed,
                           SampleMode mode = SampleMode::Canonical,
                           const Tolerance& tol = {});

SubBlock sample_two_eigen(std::size_t s, std::size_t m_prime, std::uint64_t seed,
                          SampleMode mode = SampleMode::Canonical,
                          const Tolerance& tol = {});

SubBlock make_zero_block(std::size_t size);

/// A -> A U with B -> B (U^{-1})^t (nilpotent, single gauge) or B -> B V
/// (involution / two-eigenvalue, independent gauges). The realized block is
/// unchanged up to roundoff.
SubBlock gauge_transform(const SubBlock& sub, const CMatrix& u,
                         const CMatrix* v = nullptr, const Tolerance& tol = {});

/// Scaling that turns a universal traceless block W (W^2 + W = delta I) into
/// the off-diagonal part of a d != 0 class: K_d^o = ((n + 2q)/q) d W.
/// Throws Error{DegenerateCoefficient} when |1 + 2q/n| is below tolerance
/// (at n = 4 the coefficient vanishes identically).
CMatrix scale_block(const CMatrix& w, cplx d, cplx q, std::size_t n,
                    const Tolerance& tol = {});

struct AssembledK {
  CMatrix k_master;
  CMatrix k_original;
  std::vector<std::vector<SubBlock>> sampled; // per class, per subblock
};

/// Samples every subblock (seed-deterministically), lays the classes out
/// contiguously, applies the d != 0 scaling, and maps back to the original
/// basis.
AssembledK assemble_K(const KBlockPlan& plan, const TLData& data,
                      std::uint64_t seed, const Tolerance& tol = {});

/// Closed-form complex moduli dimension of a solution family:
///   Nilpotent(t, m):   2m(t - m) - t + 1
///   TwoEigen(s, m'):   2m's - 2m'^2 - s + 1
///   Involution(s):     the TwoEigen value at m' = s/2
long moduli_dim(BlockKind kind, std::size_t size, std::size_t rank);

struct ModuliReport {
  std::size_t n_params_real = 0;
  std::size_t constraint_rank = 0; // numeric rank of the constraint Jacobian
  std::size_t tangent_real = 0;
  std::size_t gauge_real = 0;
  long moduli_real = 0;
  long expected_complex = 0;
  bool passes = false;
};

/// Finite-difference certification of the moduli dimension at the sampled
/// point: tangent = #real params - rank(J), minus the gauge-orbit dimension.
/// Complex parameters count as two reals; passes iff moduli_real equals
/// twice the closed-form complex dimension. Throws Error{RankUnstable} when
/// the Jacobian rank changes under fd_step halving (non-generic sample).
ModuliReport numeric_moduli_check(const SubBlock& sub, const Tolerance& tol = {});

/// Deterministic per-subblock seed derivation used by assemble_K.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t class_index,
                          std::uint64_t sub_index);

} // namespace tlr
