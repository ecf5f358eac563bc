#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spinext/closed_shell.hpp"
#include "spinext/errors.hpp"
#include "spinext/nbrdm.hpp"
#include "spinext/rdo.hpp"
#include "spinext/unitary.hpp"

using namespace spinext;

namespace {

FockAmplitudeState qft_state() {
  return transform_to_extraction_basis(build_closed_shell(2, 4), qft_unitary(4));
}

Matrix pure_density(const SpinVector& v) {
  Matrix rho(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) rho(i, j) = v[i] * std::conj(v[j]);
  return rho;
}

SpinDensityMatrix spin_state(int n, Matrix m, bool normalized = true) {
  SpinDensityMatrix g;
  g.n = n;
  g.matrix = std::move(m);
  g.raw_trace = g.matrix.trace().real();
  g.normalized = normalized;
  return g;
}

}  // namespace

TEST_CASE("two untouched shells extract the maximally mixed two-spin state") {
  const FockAmplitudeState phi =
      transform_to_extraction_basis(build_closed_shell(2, 2), identity_unitary(2));
  const SpinDensityMatrix gamma = compute_nbrdm_direct(phi, {0, 1});
  CHECK(gamma.raw_trace == doctest::Approx(4.0));
  const SpinDensityMatrix norm = gamma.normalized_copy();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(norm.matrix(i, j) - (i == j ? 0.25 : 0.0)) < 1e-14);
}

TEST_CASE("direct correlators match the dense operator oracle") {
  const FockAmplitudeState psi = qft_state();
  for (const auto& modes : std::vector<std::vector<int>>{{0, 1}, {1, 2, 3}, {0, 1, 2, 3}}) {
    const SpinDensityMatrix gamma = compute_nbrdm_direct(psi, modes);
    const Matrix oracle = oracles::dense_nbrdm(psi, modes);
    CHECK((gamma.matrix - oracle).max_abs() < 1e-12);
    CHECK(gamma.matrix.hermiticity_residual() < 1e-12);
    CHECK(min_eigenvalue(gamma.matrix) > -1e-10);
  }
  CHECK_THROWS_AS(compute_nbrdm_direct(psi, {0, 0}), std::invalid_argument);
}

TEST_CASE("the four-mode extraction of the fourier state is the pure singlet structure") {
  // All four electrons sit in four kept modes, so only the fully
  // singly-occupied singlet sector survives.
  const SpinDensityMatrix gamma = compute_nbrdm_direct(qft_state(), {0, 1, 2, 3}).normalized_copy();
  const Matrix s2 = spin_s2_matrix(4);
  CHECK((gamma.matrix * s2).trace().real() == doctest::Approx(0.0).epsilon(1e-10));
  const SpinBlockDecomposition dec = block_decompose_spin(gamma);
  for (const auto& [key, block] : dec.blocks) {
    const double weight = block.trace().real();
    if (key.s2 == 0)
      CHECK(weight == doctest::Approx(1.0));
    else
      CHECK(weight == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("extracted states commute with every collective spin component") {
  const SpinDensityMatrix gamma = compute_nbrdm_direct(qft_state(), {0, 1, 2}).normalized_copy();
  for (char axis : {'x', 'y', 'z'}) {
    const Matrix op = spin_component_matrix(axis, 3);
    CHECK((gamma.matrix * op - op * gamma.matrix).max_abs() < 1e-10);
  }
  const Matrix s2 = spin_s2_matrix(3);
  CHECK((gamma.matrix * s2 - s2 * gamma.matrix).max_abs() < 1e-10);
}

TEST_CASE("correlator route equals the block-mapping route") {
  for (int seed = 0; seed < 8; ++seed) {
    const FockAmplitudeState psi =
        transform_to_extraction_basis(build_closed_shell(2, 4), random_unitary(4, 200 + seed));
    for (int n = 2; n <= 4; ++n) {
      std::vector<int> modes;
      for (int t = 0; t < n; ++t) modes.push_back(t);
      const SpinDensityMatrix direct = compute_nbrdm_direct(psi, modes);
      const SpinDensityMatrix mapped =
          nbrdm_from_rdo(block_decompose(partial_trace(psi, modes), modes));
      CHECK((direct.matrix - mapped.matrix).max_abs() < 1e-10);
    }
  }
}

TEST_CASE("single-mode mapping adds the doublon weight to both spin projections") {
  RdoBlockSet set;
  set.modes = {0};
  const double a = 0.2, b = 0.35;
  for (int m2 : {1, -1}) {
    RdoBlock block;
    block.key = {1, 1, m2, {1}};
    block.matrix = Matrix(1, 1);
    block.matrix(0, 0) = a;
    set.blocks.push_back(block);
  }
  RdoBlock doublon;
  doublon.key = {2, 0, 0, {2}};
  doublon.matrix = Matrix(1, 1);
  doublon.matrix(0, 0) = b;
  set.blocks.push_back(doublon);

  const SpinDensityMatrix gamma = nbrdm_from_rdo(set);
  CHECK(std::abs(gamma.matrix(0, 0) - (a + b)) < 1e-15);
  CHECK(std::abs(gamma.matrix(1, 1) - (a + b)) < 1e-15);
  CHECK(std::abs(gamma.matrix(0, 1)) < 1e-15);
}

TEST_CASE("three- and four-electron sectors feed singlet and triplet equally") {
  RdoBlockSet set;
  set.modes = {0, 1};
  auto add_block = [&set](BlockKey key, double p) {
    RdoBlock block;
    block.key = std::move(key);
    block.matrix = Matrix(1, 1);
    block.matrix(0, 0) = p;
    set.blocks.push_back(std::move(block));
  };
  add_block({3, 1, 1, {2, 1}}, 0.1);
  add_block({3, 1, -1, {2, 1}}, 0.1);
  add_block({3, 1, 1, {1, 2}}, 0.15);
  add_block({3, 1, -1, {1, 2}}, 0.15);
  add_block({4, 0, 0, {2, 2}}, 0.3);

  const SpinDensityMatrix gamma = spin_state(2, nbrdm_from_rdo(set).matrix, false);
  const SpinBlockDecomposition dec = block_decompose_spin(gamma);
  const double singlet = dec.blocks.at({0, 0}).trace().real();
  for (int m2 : {2, 0, -2})
    CHECK(dec.blocks.at({2, m2}).trace().real() == doctest::Approx(singlet).epsilon(1e-12));
}

TEST_CASE("singlet excess of the two-spin extraction comes from the two-electron sector") {
  // Sectors with three or four electrons feed singlet and triplet equally,
  // so the singlet-minus-triplet weight of the extracted pair equals the
  // probability difference inside the fully singly-occupied block.
  for (int seed = 0; seed < 6; ++seed) {
    const FockAmplitudeState psi =
        transform_to_extraction_basis(build_closed_shell(2, 4), random_unitary(4, 400 + seed));
    const std::vector<int> modes = {0, 1};
    const RdoBlockSet blocks = block_decompose(partial_trace(psi, modes), modes);
    double p_singlet = 0.0, p_triplet = 0.0;
    for (const auto& block : blocks.blocks) {
      if (block.key.occ != std::vector<int>{1, 1}) continue;
      if (block.key.s2 == 0) p_singlet = block.probability;
      if (block.key.s2 == 2 && block.key.m2 == 0) p_triplet = block.probability;
    }
    const SpinDensityMatrix gamma = compute_nbrdm_direct(psi, modes);
    const SpinBlockDecomposition dec = block_decompose_spin(gamma);
    const double w_singlet = dec.blocks.at({0, 0}).trace().real();
    const double w_triplet = dec.blocks.at({2, 0}).trace().real();
    CHECK(w_singlet - w_triplet == doctest::Approx(p_singlet - p_triplet).epsilon(1e-10));
  }
}

TEST_CASE("extracting more spins than electrons gives the zero matrix") {
  // Four electrons cannot occupy five modes at once.
  const FockAmplitudeState psi =
      transform_to_extraction_basis(build_closed_shell(2, 5), random_unitary(5, 5));
  const SpinDensityMatrix gamma = compute_nbrdm_direct(psi, {0, 1, 2, 3, 4});
  CHECK(gamma.matrix.max_abs() == 0.0);
  CHECK(gamma.raw_trace == 0.0);
  CHECK_THROWS_AS(gamma.normalized_copy(), std::invalid_argument);
}

TEST_CASE("mapping rejects blocks over mismatched mode sets") {
  RdoBlockSet set;
  RdoBlock a;
  a.key = {1, 1, 1, {1}};
  a.matrix = Matrix(1, 1);
  RdoBlock b;
  b.key = {2, 0, 0, {1, 1}};
  b.matrix = Matrix(2, 2);
  set.blocks = {a, b};
  CHECK_THROWS_AS(nbrdm_from_rdo(set), std::invalid_argument);
}

TEST_CASE("spin block counts match the census totals") {
  const FockAmplitudeState psi = qft_state();
  CHECK(block_decompose_spin(compute_nbrdm_direct(psi, {0, 1, 2}).normalized_copy()).blocks.size() ==
        6);
  CHECK(block_decompose_spin(compute_nbrdm_direct(psi, {0, 1, 2, 3}).normalized_copy())
            .blocks.size() == 9);

  // A pure two-spin singlet populates only the (0, 0) block.
  const SpinDensityMatrix singlet =
      spin_state(2, pure_density(pairing_state(2, {{{0, 1}}, {}}, 0, 0)));
  const SpinBlockDecomposition dec = block_decompose_spin(singlet);
  CHECK(dec.structure_ok);
  for (const auto& [key, block] : dec.blocks) {
    const double weight = block.trace().real();
    CHECK(weight == doctest::Approx(key.s2 == 0 ? 1.0 : 0.0).epsilon(1e-12));
  }
}

TEST_CASE("blocks at fixed total spin coincide across the projection") {
  const SpinDensityMatrix gamma = compute_nbrdm_direct(qft_state(), {0, 1, 2}).normalized_copy();
  const SpinBlockDecomposition dec = block_decompose_spin(gamma);
  CHECK(dec.off_block_residual < 1e-10);
  for (int s2 : {1, 3}) {
    const Matrix& first = dec.blocks.at({s2, s2});
    for (int m2 = s2 - 2; m2 >= -s2; m2 -= 2)
      CHECK((dec.blocks.at({s2, m2}) - first).max_abs() < 1e-10);
  }
}

TEST_CASE("projector decomposition") {
  SUBCASE("the maximally mixed three-spin state is pure p0") {
    const SpinDensityMatrix gamma = spin_state(3, Matrix::identity(8) * Complex(0.125, 0.0));
    const ProjectorDecomposition d = projector_decomposition(gamma);
    REQUIRE(d.applicable);
    CHECK(d.residual < 1e-12);
    CHECK(d.coefficient_sum == doctest::Approx(1.0));
    for (std::size_t i = 0; i < d.keys.size(); ++i)
      CHECK(d.coefficients[i] == doctest::Approx(d.keys[i] == "p0" ? 1.0 : 0.0).epsilon(1e-10));
  }
  SUBCASE("a singlet-pair family member reproduces itself") {
    const Matrix singlet01 = pure_density(pairing_state(2, {{{0, 1}}, {}}, 0, 0));
    const SpinDensityMatrix gamma =
        spin_state(3, kron(singlet01, Matrix::identity(2) * Complex(0.5, 0.0)));
    const ProjectorDecomposition d = projector_decomposition(gamma);
    REQUIRE(d.applicable);
    CHECK(d.residual < 1e-12);
    for (std::size_t i = 0; i < d.keys.size(); ++i)
      CHECK(d.coefficients[i] ==
            doctest::Approx(d.keys[i] == "p(0,1)" ? 1.0 : 0.0).epsilon(1e-10));
  }
  SUBCASE("a double-singlet pairing reproduces itself for four spins") {
    const Matrix s01 = pure_density(pairing_state(2, {{{0, 1}}, {}}, 0, 0));
    const SpinDensityMatrix gamma = spin_state(4, kron(s01, s01));
    const ProjectorDecomposition d = projector_decomposition(gamma);
    REQUIRE(d.applicable);
    CHECK(d.residual < 1e-12);
    CHECK(d.coefficient_sum == doctest::Approx(1.0));
    for (std::size_t i = 0; i < d.keys.size(); ++i)
      CHECK(d.coefficients[i] ==
            doctest::Approx(d.keys[i] == "p(0,1)(2,3)" ? 1.0 : 0.0).epsilon(1e-10));
  }
  SUBCASE("complex states are reported as not applicable") {
    SpinVector v(8, Complex(0.0, 0.0));
    v[0b001] = 1.0 / std::sqrt(2.0);
    v[0b010] = Complex(0.0, 1.0 / std::sqrt(2.0));
    const ProjectorDecomposition d = projector_decomposition(spin_state(3, pure_density(v)));
    CHECK_FALSE(d.applicable);
    CHECK(d.imag_residual > 0.1);
  }
  SUBCASE("only three- and four-spin states are supported") {
    const SpinDensityMatrix gamma = spin_state(2, Matrix::identity(4) * Complex(0.25, 0.0));
    CHECK_THROWS_AS(projector_decomposition(gamma), std::invalid_argument);
  }
}

TEST_CASE("the three singlet projector images match the overcomplete-basis matrices") {
  const auto images = three_spin_singlet_projector_images();
  const double r3 = std::sqrt(3.0);
  const double e01[2][2] = {{1.0, 0.0}, {0.0, 0.0}};
  const double e02[2][2] = {{0.25, -0.25 * r3}, {-0.25 * r3, 0.75}};
  const double e12[2][2] = {{0.25, 0.25 * r3}, {0.25 * r3, 0.75}};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(images[0](i, j) - e01[i][j]) < 1e-14);
      CHECK(std::abs(images[1](i, j) - e02[i][j]) < 1e-14);
      CHECK(std::abs(images[2](i, j) - e12[i][j]) < 1e-14);
    }
}

TEST_CASE("a mode that stays doubly occupied factors out as an unpolarized spin") {
  Matrix u(4, 4);
  u(0, 0) = 1.0;
  const ModeUnitary v = random_unitary(3, 17);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) u(i + 1, j + 1) = v(i, j);
  const FockAmplitudeState psi =
      transform_to_extraction_basis(build_closed_shell(2, 4), ModeUnitary{std::move(u)});
  const SpinDensityMatrix gamma = compute_nbrdm_direct(psi, {0, 1, 2});
  CHECK(unpolarized_factor_residual(gamma, 0) < 1e-10);
  // Other positions do not factor in general.
  CHECK(unpolarized_factor_residual(gamma, 1) > 1e-3);
}
