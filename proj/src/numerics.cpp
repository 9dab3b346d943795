#include "tlreflect/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace tlr {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::ZeroEntry: return "ZeroEntry";
    case ErrorCode::NotHadamard: return "NotHadamard";
    case ErrorCode::DegenerateTrace: return "DegenerateTrace";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadShape: return "BadShape";
    case ErrorCode::OddSize: return "OddSize";
    case ErrorCode::DegenerateSplit: return "DegenerateSplit";
    case ErrorCode::SingularCross: return "SingularCross";
    case ErrorCode::NewtonFail: return "NewtonFail";
    case ErrorCode::DegenerateCoefficient: return "DegenerateCoefficient";
    case ErrorCode::RankUnstable: return "RankUnstable";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

void Tolerance::validate() const {
  if (eps_rel <= 0 || eps_rank <= 0 || eps_newton <= 0 || fd_step <= 0) {
    throw Error(ErrorCode::ConfigInvalid, "tolerances must be strictly positive");
  }
}

CMatrix CMatrix::identity(std::size_t n) {
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::span<const cplx> entries) {
  CMatrix m(entries.size(), entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

CMatrix CMatrix::transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

CMatrix CMatrix::conj_transpose() const {
  CMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

cplx CMatrix::trace() const {
  cplx t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const cplx& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch,
                std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()));
  }
}

} // namespace

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
  require_same_shape(*this, rhs);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx scalar) {
  for (cplx& z : data_) z *= scalar;
  return *this;
}

CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs) {
  if (lhs.cols() != rhs.rows()) {
    throw Error(ErrorCode::ShapeMismatch,
                "product of " + std::to_string(lhs.rows()) + "x" +
                    std::to_string(lhs.cols()) + " and " +
                    std::to_string(rhs.rows()) + "x" +
                    std::to_string(rhs.cols()));
  }
  CMatrix out(lhs.rows(), rhs.cols());
  for (std::size_t i = 0; i < lhs.rows(); ++i) {
    for (std::size_t k = 0; k < lhs.cols(); ++k) {
      const cplx a = lhs(i, k);
      if (a == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < rhs.cols(); ++j) out(i, j) += a * rhs(k, j);
    }
  }
  return out;
}

cplx int_pow(cplx base, long e) {
  if (e < 0) {
    if (base == cplx(0.0, 0.0)) {
      throw Error(ErrorCode::Singular, "negative power of zero");
    }
    base = 1.0 / base;
    e = -e;
  }
  cplx result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx(0.0, 0.0)) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

CMatrix permutation_op(std::size_t n) {
  CMatrix out(n * n, n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i * n + j, j * n + i) = 1.0;
  return out;
}

CMatrix inverse(const CMatrix& a, const Tolerance& tol) {
  if (!a.is_square()) {
    throw Error(ErrorCode::ShapeMismatch, "inverse of non-square matrix");
  }
  const std::size_t n = a.rows();
  const double pivot_floor = tol.eps_rank * std::max(a.max_abs(), 1e-300);
  CMatrix work = a;
  CMatrix inv = CMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    double best = std::abs(work(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double v = std::abs(work(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best <= pivot_floor) {
      throw Error(ErrorCode::Singular,
                  "pivot " + std::to_string(best) + " at column " +
                      std::to_string(col));
    }
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(work(col, j), work(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const cplx scale = 1.0 / work(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      work(col, j) *= scale;
      inv(col, j) *= scale;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const cplx factor = work(r, col);
      if (factor == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        work(r, j) -= factor * work(col, j);
        inv(r, j) -= factor * inv(col, j);
      }
    }
  }
  return inv;
}

double rel_residual(const CMatrix& lhs, const CMatrix& rhs) {
  require_same_shape(lhs, rhs);
  return (lhs - rhs).frobenius_norm() /
         (1.0 + lhs.frobenius_norm() + rhs.frobenius_norm());
}

std::size_t numeric_rank(const CMatrix& a, const Tolerance& tol) {
  if (a.empty()) return 0;
  const double threshold =
      tol.eps_rank * a.max_abs() * static_cast<double>(std::max(a.rows(), a.cols()));
  CMatrix work = a;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::size_t rank = 0;
  std::size_t row = 0;
  std::vector<std::size_t> col_order(cols);
  for (std::size_t j = 0; j < cols; ++j) col_order[j] = j;
  for (std::size_t step = 0; step < cols && row < rows; ++step) {
    // full pivot search over the remaining block
    std::size_t pr = row, pc = step;
    double best = 0.0;
    for (std::size_t r = row; r < rows; ++r)
      for (std::size_t c = step; c < cols; ++c) {
        const double v = std::abs(work(r, col_order[c]));
        if (v > best) {
          best = v;
          pr = r;
          pc = c;
        }
      }
    if (best <= threshold) break;
    std::swap(col_order[step], col_order[pc]);
    if (pr != row) {
      for (std::size_t c = 0; c < cols; ++c) std::swap(work(row, c), work(pr, c));
    }
    const cplx pivot = work(row, col_order[step]);
    for (std::size_t r = row + 1; r < rows; ++r) {
      const cplx factor = work(r, col_order[step]) / pivot;
      if (factor == cplx(0.0, 0.0)) continue;
      for (std::size_t c = step; c < cols; ++c) {
        work(r, col_order[c]) -= factor * work(row, col_order[c]);
      }
    }
    ++rank;
    ++row;
  }
  return rank;
}

CMatrix fd_jacobian(const RealFn& f, const std::vector<double>& x,
                    const Tolerance& tol) {
  const double h = tol.fd_step;
  std::vector<double> probe = x;
  const std::vector<double> f0 = f(x);
  CMatrix jac(f0.size(), x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const std::vector<double> fp = f(probe);
    probe[j] = x[j] - h;
    const std::vector<double> fm = f(probe);
    probe[j] = x[j];
    if (fp.size() != f0.size() || fm.size() != f0.size()) {
      throw Error(ErrorCode::ShapeMismatch, "inconsistent function dimension");
    }
    for (std::size_t i = 0; i < f0.size(); ++i) {
      jac(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    }
  }
  return jac;
}

double Rng::uniform() {
  // 53 random bits into [0, 1)
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * M_PI * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

cplx Rng::complex_gaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re, im};
}

std::vector<cplx> Rng::complex_gaussian_vector(std::size_t n) {
  std::vector<cplx> out(n);
  for (cplx& z : out) z = complex_gaussian();
  return out;
}

CMatrix Rng::complex_gaussian_matrix(std::size_t rows, std::size_t cols) {
  CMatrix out(rows, cols);
  for (cplx& z : out.entries()) z = complex_gaussian();
  return out;
}

} // namespace tlr
