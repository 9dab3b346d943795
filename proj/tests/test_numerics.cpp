#include <doctest.h>

#include <cmath>

#include "tlreflect/numerics.hpp"

using namespace tlr;

namespace {

CMatrix from_rows(std::size_t rows, std::size_t cols,
                  std::initializer_list<cplx> values) {
  CMatrix m(rows, cols);
  std::size_t idx = 0;
  for (cplx v : values) m.entries()[idx++] = v;
  return m;
}

} // namespace

TEST_CASE("kron of identities is the identity") {
  const CMatrix id2 = CMatrix::identity(2);
  const CMatrix out = kron(id2, id2);
  CHECK(rel_residual(out, CMatrix::identity(4)) == 0.0);
}

TEST_CASE("kron places unit blocks where the definition says") {
  const CMatrix e01 = from_rows(2, 2, {0, 1, 0, 0});
  const CMatrix out = kron(e01, CMatrix::identity(2));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const bool expected = (i == 0 && j == 2) || (i == 1 && j == 3);
      CHECK(out(i, j) == (expected ? cplx(1.0) : cplx(0.0)));
    }
  }
}

TEST_CASE("kron agrees with the entrywise formula") {
  // independent oracle: evaluate a(i,j) * b(k,l) directly
  Rng rng(101);
  const CMatrix a = rng.complex_gaussian_matrix(2, 3);
  const CMatrix b = rng.complex_gaussian_matrix(3, 2);
  const CMatrix out = kron(a, b);
  REQUIRE(out.rows() == 6);
  REQUIRE(out.cols() == 6);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          CHECK(out(i * 3 + k, j * 2 + l) == a(i, j) * b(k, l));
}

TEST_CASE("kron is associative on integer-valued matrices") {
  Rng rng(7);
  CMatrix a(2, 2), b(2, 2), c(2, 2);
  for (CMatrix* m : {&a, &b, &c}) {
    for (cplx& z : m->entries()) {
      z = std::floor(5.0 * rng.uniform()) - 2.0;
    }
  }
  const CMatrix left = kron(kron(a, b), c);
  const CMatrix right = kron(a, kron(b, c));
  CHECK((left - right).max_abs() == 0.0);
}

TEST_CASE("permutation operator") {
  CHECK(permutation_op(1)(0, 0) == cplx(1.0));

  const CMatrix p2 = permutation_op(2);
  CHECK(p2(0, 0) == cplx(1.0));
  CHECK(p2(1, 2) == cplx(1.0));
  CHECK(p2(2, 1) == cplx(1.0));
  CHECK(p2(3, 3) == cplx(1.0));

  for (std::size_t n : {2, 3, 5}) {
    const CMatrix p = permutation_op(n);
    CHECK((p * p - CMatrix::identity(n * n)).max_abs() == 0.0);
  }
}

TEST_CASE("permutation swaps tensor factors") {
  Rng rng(11);
  const std::size_t n = 3;
  const CMatrix u = rng.complex_gaussian_matrix(n, 1);
  const CMatrix v = rng.complex_gaussian_matrix(n, 1);
  const CMatrix swapped = permutation_op(n) * kron(u, v);
  CHECK(rel_residual(swapped, kron(v, u)) < 1e-15);
}

TEST_CASE("inverse basics") {
  const CMatrix id3 = CMatrix::identity(3);
  CHECK(rel_residual(inverse(id3), id3) < 1e-15);

  const CMatrix swap = from_rows(2, 2, {0, 1, 1, 0});
  CHECK(rel_residual(inverse(swap), swap) < 1e-15);
}

TEST_CASE("inverse of the 3x3 Fourier matrix") {
  CMatrix f3(3, 3);
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      f3(a, b) = std::polar(1.0, 2.0 * M_PI * double(a * b) / 3.0);
  const CMatrix inv = inverse(f3);
  CHECK(rel_residual(f3 * inv, CMatrix::identity(3)) < 1e-14);
  CHECK(rel_residual(inv, (1.0 / 3.0) * f3.conj_transpose()) < 1e-14);
}

TEST_CASE("inverse rejects singular input") {
  const CMatrix ones = from_rows(2, 2, {1, 1, 1, 1});
  CHECK_THROWS_AS(inverse(ones), Error);
  try {
    inverse(ones);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Singular);
  }
}

TEST_CASE("inverse of inverse returns the input for well-conditioned matrices") {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    Rng rng(seed);
    const CMatrix a = rng.complex_gaussian_matrix(5, 5);
    const CMatrix back = inverse(inverse(a));
    CHECK(rel_residual(back, a) < 1e-9);
  }
}

TEST_CASE("rel_residual") {
  Rng rng(3);
  const CMatrix a = rng.complex_gaussian_matrix(3, 3);
  CHECK(rel_residual(a, a) == 0.0);
  const CMatrix zero(2, 2);
  CHECK(rel_residual(zero, zero) == 0.0);

  CMatrix lhs = CMatrix::identity(2);
  CMatrix rhs = lhs;
  rhs(0, 0) += 1e-3;
  // oracle: the definition evaluated by hand
  const double expected =
      1e-3 / (1.0 + std::sqrt(2.0) + std::sqrt(2.0 + 2e-3 + 1e-6));
  CHECK(rel_residual(lhs, rhs) == doctest::Approx(expected).epsilon(1e-12));

  CHECK_THROWS_AS(rel_residual(lhs, CMatrix(3, 3)), Error);
}

TEST_CASE("numeric rank") {
  CHECK(numeric_rank(CMatrix::identity(4)) == 4);
  CHECK(numeric_rank(CMatrix(3, 5)) == 0);
  CHECK(numeric_rank(from_rows(2, 2, {1, 1, 1, 1})) == 1);

  for (std::size_t n : {2, 5, 9, 16}) {
    Rng rng(40 + n);
    const CMatrix u = rng.complex_gaussian_matrix(n, 1);
    const CMatrix v = rng.complex_gaussian_matrix(n, 1);
    CHECK(numeric_rank(u * v.transpose()) == 1);
  }
}

TEST_CASE("fd_jacobian of linear and quadratic maps") {
  const RealFn identity_fn = [](const std::vector<double>& x) { return x; };
  const std::vector<double> x0 = {0.3, -1.2, 2.0};
  const CMatrix jac = fd_jacobian(identity_fn, x0);
  CHECK(rel_residual(jac, CMatrix::identity(3)) < 1e-10);

  const RealFn square_fn = [](const std::vector<double>& x) {
    return std::vector<double>{x[0] * x[0]};
  };
  const CMatrix dsq = fd_jacobian(square_fn, {1.0});
  CHECK(std::abs(dsq(0, 0).real() - 2.0) < 1e-8);
}

TEST_CASE("fd_jacobian propagates evaluation failures") {
  const RealFn broken = [](const std::vector<double>& x) -> std::vector<double> {
    if (x[0] > 1.0) throw Error(ErrorCode::Singular, "domain edge");
    return {x[0]};
  };
  CHECK_THROWS_AS(fd_jacobian(broken, {1.0}), Error);
}

TEST_CASE("integer powers") {
  CHECK(int_pow(cplx(2.0), 0) == cplx(1.0));
  CHECK(int_pow(cplx(2.0), 10) == cplx(1024.0));
  CHECK(std::abs(int_pow(cplx(2.0), -3) - cplx(0.125)) < 1e-15);
  const cplx w = std::polar(1.0, 2.0 * M_PI / 7.0);
  CHECK(std::abs(int_pow(w, 7) - cplx(1.0)) < 1e-14);
  CHECK(std::abs(int_pow(w, -5) - std::conj(int_pow(w, 5))) < 1e-14);
  CHECK_THROWS_AS(int_pow(cplx(0.0), -1), Error);
}

TEST_CASE("seeded generator is deterministic") {
  Rng a(123456789);
  Rng b(123456789);
  for (int i = 0; i < 64; ++i) {
    CHECK(a.complex_gaussian() == b.complex_gaussian());
  }
  Rng c(987654321);
  bool any_diff = false;
  Rng a2(123456789);
  for (int i = 0; i < 8; ++i) {
    if (a2.complex_gaussian() != c.complex_gaussian()) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("tolerance validation") {
  Tolerance tol;
  CHECK_NOTHROW(tol.validate());
  tol.eps_rel = 0.0;
  CHECK_THROWS_AS(tol.validate(), Error);
}
