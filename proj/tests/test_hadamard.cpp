#include <doctest.h>

#include <cmath>

#include "tlreflect/hadamard.hpp"

using namespace tlr;

TEST_CASE("hadamard inverse on simple matrices") {
  CMatrix j2(2, 2);
  for (cplx& z : j2.entries()) z = 1.0;
  CHECK((hadamard_inverse(j2) - j2).max_abs() == 0.0);

  CMatrix pm(2, 2);
  pm(0, 0) = 1.0;
  pm(0, 1) = -1.0;
  pm(1, 0) = -1.0;
  pm(1, 1) = 1.0;
  CHECK((hadamard_inverse(pm) - pm).max_abs() == 0.0);
}

TEST_CASE("hadamard inverse of a unimodular matrix is the conjugate") {
  const CMatrix f3 = fourier_matrix(3);
  const CMatrix inv = hadamard_inverse(f3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(inv(i, j) - std::conj(f3(i, j))) < 1e-15);
}

TEST_CASE("hadamard inverse is an involution") {
  Rng rng(5);
  CMatrix m = rng.complex_gaussian_matrix(4, 4);
  for (cplx& z : m.entries()) z += cplx(3.0, 0.0); // keep entries away from 0
  CHECK(rel_residual(hadamard_inverse(hadamard_inverse(m)), m) < 1e-12);
}

TEST_CASE("hadamard inverse rejects zero entries") {
  CMatrix m = CMatrix::identity(2);
  CHECK_THROWS_AS(hadamard_inverse(m), Error);
  try {
    hadamard_inverse(m);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ZeroEntry);
  }
}

TEST_CASE("Fourier matrices satisfy the generalized Hadamard property") {
  for (std::size_t n = 2; n <= 8; ++n) {
    const HadamardVerdict verdict = is_generalized_hadamard(fourier_matrix(n));
    CHECK(verdict.passes);
    CHECK(verdict.residual <= 1e-10);
  }
}

TEST_CASE("a generic matrix fails the property") {
  CMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 2.0;
  m(1, 0) = 3.0;
  m(1, 1) = 4.0;
  const HadamardVerdict verdict = is_generalized_hadamard(m);
  CHECK_FALSE(verdict.passes);
  CHECK(verdict.residual > 1e-3);
}

TEST_CASE("fourier_matrix values") {
  CHECK(fourier_matrix(1)(0, 0) == cplx(1.0));

  const CMatrix f2 = fourier_matrix(2);
  CHECK(std::abs(f2(0, 0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(f2(0, 1) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(f2(1, 0) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(f2(1, 1) - cplx(-1.0)) < 1e-15);

  const CMatrix f4 = fourier_matrix(4);
  for (const cplx& z : f4.entries()) {
    const bool fourth_root = std::abs(z - cplx(1, 0)) < 1e-14 ||
                             std::abs(z - cplx(0, 1)) < 1e-14 ||
                             std::abs(z - cplx(-1, 0)) < 1e-14 ||
                             std::abs(z - cplx(0, -1)) < 1e-14;
    CHECK(fourth_root);
  }
  CHECK(is_generalized_hadamard(f4).passes);
}

TEST_CASE("V-W check reduces to the plain property for unit weights") {
  const CMatrix f2 = fourier_matrix(2);
  const std::vector<cplx> ones(2, cplx(1.0));
  const HadamardVerdict vw = is_vw_hadamard(f2, ones, ones);
  const HadamardVerdict plain = is_generalized_hadamard(f2);
  CHECK(vw.passes == plain.passes);
  CHECK(std::abs(vw.residual - plain.residual) < 1e-12);
  CHECK(vw.property == HadamardProperty::VW);
}

TEST_CASE("V-W check passes when the weight products are constant") {
  const CMatrix f3 = fourier_matrix(3);
  Rng rng(9);
  std::vector<cplx> v = rng.complex_gaussian_vector(3);
  std::vector<cplx> w(3);
  for (std::size_t i = 0; i < 3; ++i) {
    if (std::abs(v[i]) < 0.1) v[i] += cplx(1.0, 0.0);
    w[i] = 1.0 / v[i];
  }
  CHECK(is_vw_hadamard(f3, v, w).passes);
}

TEST_CASE("V-W check fails for incompatible weights") {
  const CMatrix f2 = fourier_matrix(2);
  const std::vector<cplx> v = {1.0, 2.0};
  const std::vector<cplx> w = {1.0, 1.0};
  const HadamardVerdict verdict = is_vw_hadamard(f2, v, w);
  CHECK_FALSE(verdict.passes);
}

TEST_CASE("V-W check flags a degenerate trace") {
  const CMatrix f2 = fourier_matrix(2);
  const std::vector<cplx> v = {1.0, 1.0};
  const std::vector<cplx> w = {1.0, -1.0};
  CHECK_THROWS_AS(is_vw_hadamard(f2, v, w), Error);
}

TEST_CASE("build_P") {
  const CMatrix f3 = fourier_matrix(3);
  CHECK(rel_residual(build_P(f3, f3), CMatrix::identity(3)) < 1e-14);

  // H = F3 with two columns swapped is still Hadamard, and P comes out as
  // the matching permutation
  CMatrix h(3, 3);
  for (std::size_t i = 0; i < 3; ++i) {
    h(i, 0) = f3(i, 1);
    h(i, 1) = f3(i, 0);
    h(i, 2) = f3(i, 2);
  }
  REQUIRE(is_generalized_hadamard(h).passes);
  const CMatrix p = build_P(f3, h);
  CMatrix perm(3, 3);
  perm(0, 1) = 1.0;
  perm(1, 0) = 1.0;
  perm(2, 2) = 1.0;
  CHECK(rel_residual(p, perm) < 1e-13);

  CMatrix bad(3, 3);
  for (cplx& z : bad.entries()) z = 1.0;
  bad(0, 0) = 2.0;
  bad(1, 1) = 3.0;
  CHECK_THROWS_AS(build_P(f3, bad), Error);
}

TEST_CASE("Hadamard equivalences preserve the property") {
  Rng rng(77);
  const std::size_t n = 5;
  CMatrix m = fourier_matrix(n);

  // random row and column permutation
  std::vector<std::size_t> rows(n), cols(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = cols[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    std::swap(rows[i - 1], rows[static_cast<std::size_t>(rng.uniform() * i)]);
    std::swap(cols[i - 1], cols[static_cast<std::size_t>(rng.uniform() * i)]);
  }
  CMatrix shuffled(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) shuffled(i, j) = m(rows[i], cols[j]);
  CHECK(is_generalized_hadamard(shuffled).passes);

  // unimodular diagonal scaling on both sides
  CMatrix scaled = shuffled;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx left = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    const cplx right = std::polar(1.0, 2.0 * M_PI * rng.uniform());
    for (std::size_t j = 0; j < n; ++j) {
      scaled(i, j) *= left;
      scaled(j, i) *= right;
    }
  }
  CHECK(is_generalized_hadamard(scaled).passes);
}
