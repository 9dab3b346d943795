#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tlr {

using cplx = std::complex<double>;

enum class ErrorCode {
  Singular,
  ZeroEntry,
  NotHadamard,
  DegenerateTrace,
  ShapeMismatch,
  BadShape,
  OddSize,
  DegenerateSplit,
  SingularCross,
  NewtonFail,
  DegenerateCoefficient,
  RankUnstable,
  InvalidModel,
  ConfigInvalid,
};

const char* error_code_name(ErrorCode code);

/// All failures raised by the library carry one of the ErrorCode tags above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct Tolerance {
  double eps_rel = 1e-9;     // pass/fail threshold on relative residuals
  double eps_rank = 1e-8;    // pivot threshold for inversion and rank
  double eps_newton = 1e-12; // convergence threshold for constraint solves
  double fd_step = 1e-6;     // central-difference step
  void validate() const;
};

/// Dense row-major complex matrix. The single carrier type for every
/// operator in the library; values are immutable by convention once built
/// (all operations return fresh matrices).
class CMatrix {
 public:
  CMatrix() : rows_(0), cols_(0) {}
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

  static CMatrix identity(std::size_t n);
  static CMatrix diagonal(std::span<const cplx> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const cplx> entries() const { return data_; }
  std::span<cplx> entries() { return data_; }

  CMatrix transpose() const;
  CMatrix conj_transpose() const;
  cplx trace() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(cplx scalar);

  friend CMatrix operator+(CMatrix lhs, const CMatrix& rhs) { return lhs += rhs; }
  friend CMatrix operator-(CMatrix lhs, const CMatrix& rhs) { return lhs -= rhs; }
  friend CMatrix operator*(cplx scalar, CMatrix m) { return m *= scalar; }
  friend CMatrix operator*(CMatrix m, cplx scalar) { return m *= scalar; }
  friend CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

/// Integer power by repeated squaring; negative exponents go through the
/// reciprocal, so the base must be nonzero for e < 0.
cplx int_pow(cplx base, long e);

/// Kronecker product; site 1 is the left factor project-wide.
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Permutation operator on C^n (x) C^n swapping the two factors.
CMatrix permutation_op(std::size_t n);

/// Inverse by partial-pivoted Gauss-Jordan elimination.
/// Throws Error{Singular} when a pivot falls below eps_rank * max|entry|.
CMatrix inverse(const CMatrix& a, const Tolerance& tol = {});

/// ||lhs - rhs||_F / (1 + ||lhs||_F + ||rhs||_F)
double rel_residual(const CMatrix& lhs, const CMatrix& rhs);

/// Rank by column-pivoted elimination. A pivot counts while its magnitude
/// exceeds eps_rank * max_initial_entry * max(rows, cols).
std::size_t numeric_rank(const CMatrix& a, const Tolerance& tol = {});

using RealFn = std::function<std::vector<double>(const std::vector<double>&)>;

/// Central-difference Jacobian of f at x with step tol.fd_step.
/// Entry (i, j) = (f_i(x + h e_j) - f_i(x - h e_j)) / (2h), stored with
/// zero imaginary parts.
CMatrix fd_jacobian(const RealFn& f, const std::vector<double>& x,
                    const Tolerance& tol = {});

/// Deterministic 64-bit-seeded stream of standard complex Gaussians.
/// Box-Muller over mt19937_64 keeps the same seed giving the same values
/// independent of the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();        // [0, 1)
  double gaussian();       // N(0, 1)
  cplx complex_gaussian(); // re, im independent N(0, 1)

  std::vector<cplx> complex_gaussian_vector(std::size_t n);
  CMatrix complex_gaussian_matrix(std::size_t rows, std::size_t cols);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace tlr
