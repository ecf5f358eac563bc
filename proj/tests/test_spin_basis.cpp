#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinext/census.hpp"
#include "spinext/spin_basis.hpp"

using namespace spinext;

namespace {

Complex dot(const SpinVector& a, const SpinVector& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

SpinVector apply_op(const Matrix& op, const SpinVector& v) {
  SpinVector out(v.size(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < op.rows(); ++i)
    for (std::size_t j = 0; j < op.cols(); ++j)
      if (op(i, j) != Complex(0.0, 0.0)) out[i] += op(i, j) * v[j];
  return out;
}

}  // namespace

TEST_CASE("pairing enumeration is exhaustive and canonically ordered") {
  CHECK(enumerate_pairings(4, 0).size() == 3);
  CHECK(enumerate_pairings(5, 1).size() == 15);
  CHECK(enumerate_pairings(3, 3).size() == 1);
  const auto three = enumerate_pairings(3, 1);
  REQUIRE(three.size() == 3);
  CHECK(three[0].pairs == std::vector<ModePair>{{0, 1}});
  CHECK(three[0].unpaired == std::vector<int>{2});
  CHECK(three[1].pairs == std::vector<ModePair>{{0, 2}});
  CHECK(three[2].pairs == std::vector<ModePair>{{1, 2}});
  CHECK(three[2].unpaired == std::vector<int>{0});
}

TEST_CASE("multiplet bases have the closed-form dimension and diagonalize spin") {
  for (int q = 1; q <= 6; ++q) {
    const Matrix s2op = spin_s2_matrix(q);
    const Matrix szop = spin_sz_matrix(q);
    for (int s2 = q % 2; s2 <= q; s2 += 2) {
      for (int m2 = s2; m2 >= -s2; m2 -= 2) {
        const MultipletBasis basis = multiplet_basis(q, s2, m2);
        CHECK(static_cast<std::int64_t>(basis.vectors.size()) == d_s(q, s2));
        const double s_eig = 0.25 * s2 * (s2 + 2);
        for (std::size_t a = 0; a < basis.vectors.size(); ++a) {
          for (std::size_t b = 0; b < basis.vectors.size(); ++b)
            CHECK(std::abs(dot(basis.vectors[a], basis.vectors[b]) - (a == b ? 1.0 : 0.0)) <
                  1e-12);
          const SpinVector s2v = apply_op(s2op, basis.vectors[a]);
          const SpinVector szv = apply_op(szop, basis.vectors[a]);
          for (std::size_t i = 0; i < s2v.size(); ++i) {
            CHECK(std::abs(s2v[i] - s_eig * basis.vectors[a][i]) < 1e-10);
            CHECK(std::abs(szv[i] - 0.5 * m2 * basis.vectors[a][i]) < 1e-10);
          }
        }
      }
    }
  }
}

TEST_CASE("bases at different projections are lowering images of each other") {
  // S- maps the basis at M onto the basis at M-1 vector by vector, which is
  // what makes block matrices of rotationally invariant operators agree
  // across M.
  for (int q = 2; q <= 5; ++q) {
    const Matrix sminus = spin_sx_matrix(q) - spin_sy_matrix(q) * Complex(0.0, 1.0);
    for (int s2 = (q % 2 == 0) ? 2 : 1; s2 <= q; s2 += 2) {
      for (int m2 = s2; m2 - 2 >= -s2; m2 -= 2) {
        const MultipletBasis upper = multiplet_basis(q, s2, m2);
        const MultipletBasis lower = multiplet_basis(q, s2, m2 - 2);
        const double s = 0.5 * s2, m = 0.5 * m2;
        const double c = std::sqrt(s * (s + 1.0) - m * (m - 1.0));
        REQUIRE(upper.vectors.size() == lower.vectors.size());
        for (std::size_t a = 0; a < upper.vectors.size(); ++a) {
          const SpinVector image = apply_op(sminus, upper.vectors[a]);
          for (std::size_t i = 0; i < image.size(); ++i)
            CHECK(std::abs(image[i] - c * lower.vectors[a][i]) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("pairing states are singlet products times symmetric states") {
  // A fully paired pattern is a total-spin singlet.
  const SpinVector v = pairing_state(4, {{{0, 1}, {2, 3}}, {}}, 0, 0);
  const SpinVector s2v = apply_op(spin_s2_matrix(4), v);
  for (const auto& x : s2v) CHECK(std::abs(x) < 1e-12);
  // Family states are normalized for every projection of the symmetric part.
  for (int s2 : {1, 3})
    for (int m2 = s2; m2 >= -s2; m2 -= 2) {
      PairingPattern pattern{{{0, 1}}, {2, 3, 4}};
      if (s2 == 1) pattern = PairingPattern{{{0, 1}, {2, 3}}, {4}};
      const SpinVector w = pairing_state(5, pattern, s2, m2);
      CHECK(std::abs(dot(w, w) - 1.0) < 1e-12);
    }
  // Inconsistent arguments are rejected.
  CHECK_THROWS_AS(pairing_state(4, {{{0, 1}}, {2, 3}}, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(multiplet_basis(4, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(multiplet_basis(4, 2, 1), std::invalid_argument);
}
