#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spinext/closed_shell.hpp"
#include "spinext/entanglement.hpp"
#include "spinext/unitary.hpp"

using namespace spinext;

namespace {

Matrix pure_density(const SpinVector& v) {
  Matrix rho(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) rho(i, j) = v[i] * std::conj(v[j]);
  return rho;
}

SpinDensityMatrix spin_state(int n, Matrix m) {
  SpinDensityMatrix g;
  g.n = n;
  g.matrix = std::move(m);
  g.raw_trace = g.matrix.trace().real();
  g.normalized = true;
  return g;
}

SpinDensityMatrix all_up(int n) {
  SpinVector v(std::size_t{1} << n, Complex(0.0, 0.0));
  v[0] = 1.0;
  return spin_state(n, pure_density(v));
}

SpinDensityMatrix two_spin_singlet() {
  return spin_state(2, pure_density(pairing_state(2, {{{0, 1}}, {}}, 0, 0)));
}

const InequalityResult& find_ineq(const SqueezingReport& r, int id, char axis) {
  for (const auto& q : r.inequalities)
    if (q.id == id && (id == 1 || q.gamma_axis == axis)) return q;
  throw std::logic_error("inequality not found");
}

}  // namespace

TEST_CASE("collective moments of reference states") {
  SUBCASE("two-spin singlet") {
    const CollectiveMoments m = collective_moments(two_spin_singlet());
    CHECK(std::abs(m.s_total_sq) < 1e-12);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(m.mean[a]) < 1e-12);
  }
  SUBCASE("fully aligned states") {
    for (int n = 2; n <= 5; ++n) {
      const CollectiveMoments m = collective_moments(all_up(n));
      CHECK(m.mean[2] == doctest::Approx(n / 2.0));
      CHECK(std::abs(m.variance[2]) < 1e-12);
      CHECK(m.s_total_sq == doctest::Approx(0.25 * n * (n + 2)));
    }
  }
  SUBCASE("four-mode fourier extraction against an independent moment route") {
    const FockAmplitudeState psi =
        transform_to_extraction_basis(build_closed_shell(2, 4), qft_unitary(4));
    SpinDensityMatrix gamma = compute_nbrdm_direct(psi, {0, 1, 2, 3}).normalized_copy();
    const CollectiveMoments m = collective_moments(gamma);
    const Matrix oracle_gamma = oracles::dense_nbrdm(psi, {0, 1, 2, 3});
    const double trace = oracle_gamma.trace().real();
    const char axes[3] = {'x', 'y', 'z'};
    for (int a = 0; a < 3; ++a) {
      const Matrix op = spin_component_matrix(axes[a], 4);
      const double mean = (oracle_gamma * op).trace().real() / trace;
      const double sq = (oracle_gamma * op * op).trace().real() / trace;
      CHECK(m.mean[a] == doctest::Approx(mean).epsilon(1e-10));
      CHECK(m.square[a] == doctest::Approx(sq).epsilon(1e-10));
    }
  }
}

TEST_CASE("squeezing inequality verdicts on reference states") {
  SUBCASE("the two-spin singlet violates the variance-sum inequality") {
    const SqueezingReport r = evaluate_inequalities(two_spin_singlet());
    CHECK(find_ineq(r, 1, '-').status == InequalityStatus::violated);
    CHECK(r.verdict == SqueezingVerdict::entanglement_detected);
  }
  SUBCASE("fully aligned states violate nothing") {
    for (int n = 2; n <= 6; ++n) {
      const SqueezingReport r = evaluate_inequalities(all_up(n));
      for (const auto& q : r.inequalities) CHECK(q.status != InequalityStatus::violated);
    }
  }
  SUBCASE("the rotationally invariant four-spin singlet sector violates one and three") {
    const std::size_t dim = 16;
    Matrix mix(dim, dim);
    const MultipletBasis b00 = multiplet_basis(4, 0, 0);
    for (const auto& v : b00.vectors) mix += pure_density(v) * Complex(0.5, 0.0);
    const SqueezingReport r = evaluate_inequalities(spin_state(4, std::move(mix)));
    CHECK(find_ineq(r, 1, '-').status == InequalityStatus::violated);
    for (char axis : {'x', 'y', 'z'}) {
      CHECK(find_ineq(r, 3, axis).status == InequalityStatus::violated);
      CHECK(find_ineq(r, 2, axis).status == InequalityStatus::satisfied);
    }
    CHECK(r.verdict == SqueezingVerdict::entanglement_detected);
  }
}

TEST_CASE("closed forms for spin eigenstates") {
  SUBCASE("stretched states satisfy the first two inequalities") {
    for (int n = 2; n <= 6; ++n) {
      const SqueezingReport r = eigenstate_inequalities(n, n, n);
      CHECK(find_ineq(r, 1, '-').status != InequalityStatus::violated);
      CHECK(find_ineq(r, 2, 'z').status != InequalityStatus::violated);
    }
  }
  SUBCASE("the four-spin singlet eigenstate fails the first inequality by two") {
    const SqueezingReport r = eigenstate_inequalities(0, 0, 4);
    CHECK(find_ineq(r, 1, '-').margin == doctest::Approx(-2.0));
  }
  SUBCASE("invalid quantum numbers are rejected") {
    CHECK_THROWS_AS(eigenstate_inequalities(3, 1, 4), std::invalid_argument);
    CHECK_THROWS_AS(eigenstate_inequalities(2, 4, 4), std::invalid_argument);
    CHECK_THROWS_AS(eigenstate_inequalities(2, 1, 4), std::invalid_argument);
  }
  SUBCASE("closed forms equal numeric evaluation on constructed eigenstates") {
    for (int n = 2; n <= 4; ++n)
      for (int s2 = n % 2; s2 <= n; s2 += 2)
        for (int m2 = s2; m2 >= -s2; m2 -= 2) {
          const MultipletBasis basis = multiplet_basis(n, s2, m2);
          const SqueezingReport numeric =
              evaluate_inequalities(spin_state(n, pure_density(basis.vectors.front())));
          const SqueezingReport closed = eigenstate_inequalities(s2, m2, n);
          REQUIRE(numeric.inequalities.size() == closed.inequalities.size());
          for (std::size_t i = 0; i < numeric.inequalities.size(); ++i)
            CHECK(numeric.inequalities[i].margin ==
                  doctest::Approx(closed.inequalities[i].margin).epsilon(1e-10));
        }
  }
}

TEST_CASE("closed forms for rotationally invariant mixtures") {
  SUBCASE("low-spin mixtures violate the first inequality") {
    CHECK(find_ineq(rotinv_inequalities(0, 4).report, 1, '-').margin == doctest::Approx(-2.0));
    CHECK(find_ineq(rotinv_inequalities(2, 6).report, 1, '-').margin == doctest::Approx(-1.0));
  }
  SUBCASE("the second inequality never detects rotationally invariant states") {
    for (int n = 1; n <= 12; ++n)
      for (int s2 = n % 2; s2 <= n; s2 += 2) {
        const RotInvReport r = rotinv_inequalities(s2, n);
        CHECK(r.second_always_satisfied);
        for (char axis : {'x', 'y', 'z'})
          CHECK(find_ineq(r.report, 2, axis).status != InequalityStatus::violated);
      }
  }
  SUBCASE("closed forms match uniform mixtures over the projection") {
    for (int n = 2; n <= 4; ++n)
      for (int s2 = n % 2; s2 <= n; s2 += 2) {
        Matrix mix(std::size_t{1} << n, std::size_t{1} << n);
        for (int m2 = s2; m2 >= -s2; m2 -= 2)
          mix += pure_density(multiplet_basis(n, s2, m2).vectors.front()) *
                 Complex(1.0 / (s2 + 1.0), 0.0);
        const SqueezingReport numeric = evaluate_inequalities(spin_state(n, std::move(mix)));
        const SqueezingReport closed = rotinv_inequalities(s2, n).report;
        for (std::size_t i = 0; i < numeric.inequalities.size(); ++i)
          CHECK(numeric.inequalities[i].margin ==
                doctest::Approx(closed.inequalities[i].margin).epsilon(1e-10));
      }
  }
}

TEST_CASE("separability from double occupations") {
  SUBCASE("an untouched source is fully separable") {
    const FockAmplitudeState phi =
        transform_to_extraction_basis(build_closed_shell(3, 3), identity_unitary(3));
    const SeparabilityBound b =
        separability_bound(block_decompose(partial_trace(phi, {0, 1, 2}), {0, 1, 2}));
    CHECK(b.p == 3);
    CHECK(b.fully_separable);
    CHECK(b.gme_excluded);
    const SpinDensityMatrix gamma = compute_nbrdm_direct(phi, {0, 1, 2}).normalized_copy();
    const SqueezingReport r = evaluate_inequalities(gamma);
    for (const auto& q : r.inequalities) CHECK(q.status != InequalityStatus::violated);
  }
  SUBCASE("a fully singly-occupied configuration removes every guarantee") {
    const FockAmplitudeState psi =
        transform_to_extraction_basis(build_closed_shell(2, 4), qft_unitary(4));
    const SeparabilityBound b =
        separability_bound(block_decompose(partial_trace(psi, {0, 1, 2, 3}), {0, 1, 2, 3}));
    CHECK(b.p == 0);
    CHECK_FALSE(b.gme_excluded);
  }
  SUBCASE("empty block sets are rejected") {
    RdoBlockSet empty;
    CHECK_THROWS_AS(separability_bound(empty), std::invalid_argument);
  }
}

TEST_CASE("no violations on random separable product states") {
  detail::GaussianRng rng(4242);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + (rep % 4);
    Matrix rho = Matrix::identity(1);
    for (int t = 0; t < n; ++t) {
      const double theta = rng.uniform() * 3.14159265358979323846;
      const double phi = rng.uniform() * 2.0 * 3.14159265358979323846;
      const Complex a = std::cos(theta / 2.0);
      const Complex b = std::polar(std::sin(theta / 2.0), phi);
      Matrix q(2, 2);
      q(0, 0) = a * std::conj(a);
      q(0, 1) = a * std::conj(b);
      q(1, 0) = b * std::conj(a);
      q(1, 1) = b * std::conj(b);
      rho = kron(rho, q);
    }
    const SqueezingReport r = evaluate_inequalities(spin_state(n, std::move(rho)));
    for (const auto& q : r.inequalities) CHECK(q.status != InequalityStatus::violated);
  }
}

TEST_CASE("a singlet with mixed extra spins has total spin 3l/4") {
  for (int l = 1; l <= 4; ++l) {
    const int n = 2 + l;
    if (n > 6) break;
    const Matrix singlet = pure_density(pairing_state(2, {{{0, 1}}, {}}, 0, 0));
    Matrix rho = kron(singlet, Matrix::identity(std::size_t{1} << l) *
                                   Complex(1.0 / (std::size_t{1} << l), 0.0));
    const CollectiveMoments m = collective_moments(spin_state(n, std::move(rho)));
    CHECK(m.s_total_sq == doctest::Approx(0.75 * l).epsilon(1e-10));
    const SqueezingReport r = evaluate_inequalities(spin_state(n, kron(singlet,
        Matrix::identity(std::size_t{1} << l) * Complex(1.0 / (std::size_t{1} << l), 0.0))));
    const bool should_violate = 0.75 * l < 0.5 * n - 1e-12;
    CHECK((find_ineq(r, 1, '-').status == InequalityStatus::violated) == should_violate);
  }
}
