#pragma once

// Test-only oracles, built along routes independent of the library paths
// they check: dense operator algebra via Jordan-Wigner kron chains, partial
// traces via explicit state-vector overlaps, and spin multiplicities via
// numeric diagonalization.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spinext/collective.hpp"
#include "spinext/fock.hpp"
#include "spinext/matrix.hpp"
#include "spinext/spin_basis.hpp"

namespace oracles {

using spinext::Complex;
using spinext::Matrix;

inline Matrix pauli_z() {
  Matrix z(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

inline Matrix raising() {  // |0> (empty) -> |1> (occupied)
  Matrix r(2, 2);
  r(1, 0) = 1.0;
  return r;
}

/// Dense creation operator for spin-orbital `lin` on 2M orbitals via the
/// Jordan-Wigner chain: Z strings on lower orbitals, sigma+ at the site.
/// Orbital 0 is the least significant tensor factor.
inline Matrix dense_creation(int modes, int lin) {
  Matrix op = Matrix::identity(1);
  for (int j = 2 * modes - 1; j >= 0; --j) {
    const Matrix factor = j > lin ? Matrix::identity(2) : (j == lin ? raising() : pauli_z());
    op = spinext::kron(op, factor);
  }
  return op;
}

inline Matrix dense_creation(int modes, spinext::SpinOrbital orb) {
  return dense_creation(modes, orb.linear_index());
}

inline Matrix dense_annihilation(int modes, spinext::SpinOrbital orb) {
  return dense_creation(modes, orb).adjoint();
}

inline std::vector<Complex> dense_vector(const spinext::FockAmplitudeState& state) {
  std::vector<Complex> v(std::size_t{1} << (2 * state.modes()), Complex(0.0, 0.0));
  for (const auto& [b, a] : state.amplitudes()) v[b.bits] = a;
  return v;
}

inline std::vector<Complex> apply_dense(const Matrix& op, const std::vector<Complex>& v) {
  std::vector<Complex> out(op.rows(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < op.rows(); ++i)
    for (std::size_t j = 0; j < op.cols(); ++j)
      if (op(i, j) != Complex(0.0, 0.0)) out[i] += op(i, j) * v[j];
  return out;
}

inline Complex dot(const std::vector<Complex>& bra, const std::vector<Complex>& ket) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < bra.size(); ++i) s += std::conj(bra[i]) * ket[i];
  return s;
}

/// Collective operators assembled from dense one-orbital matrix products.
inline Matrix dense_collective(spinext::CollectiveKind kind, int modes) {
  using spinext::Spin;
  const std::size_t dim = std::size_t{1} << (2 * modes);
  Matrix sx(dim, dim), sy(dim, dim), sz(dim, dim), n(dim, dim);
  for (int k = 0; k < modes; ++k) {
    const Matrix cu = dense_creation(modes, {k, Spin::up});
    const Matrix cd = dense_creation(modes, {k, Spin::down});
    const Matrix splus = cu * cd.adjoint();   // d^dag_up d_down
    const Matrix sminus = cd * cu.adjoint();  // d^dag_down d_up
    n += cu * cu.adjoint() + cd * cd.adjoint();
    sz += (cu * cu.adjoint() - cd * cd.adjoint()) * Complex(0.5, 0.0);
    sx += (splus + sminus) * Complex(0.5, 0.0);
    sy += (splus - sminus) * Complex(0.0, -0.5);
  }
  switch (kind) {
    case spinext::CollectiveKind::N:
      return n;
    case spinext::CollectiveKind::Sz:
      return sz;
    case spinext::CollectiveKind::Sx:
      return sx;
    case spinext::CollectiveKind::Sy:
      return sy;
    case spinext::CollectiveKind::S2:
      return sx * sx + sy * sy + sz * sz;
  }
  return Matrix(dim, dim);
}

/// Dense partial-trace oracle: builds each (kept, environment) configuration
/// as an explicit operator product over the vacuum and reads amplitudes off
/// the dense state vector; signs come out of the dense operator algebra.
inline Matrix dense_partial_trace(const spinext::FockAmplitudeState& state,
                                  const std::vector<int>& kept) {
  const int m = state.modes();
  const std::vector<Complex> psi = dense_vector(state);
  std::vector<int> env;
  for (int mode = 0; mode < m; ++mode)
    if (std::find(kept.begin(), kept.end(), mode) == kept.end()) env.push_back(mode);

  const std::size_t kept_dim = std::size_t{1} << (2 * kept.size());
  const std::size_t env_dim = std::size_t{1} << (2 * env.size());
  std::vector<Complex> vac(std::size_t{1} << (2 * m), Complex(0.0, 0.0));
  vac[0] = 1.0;

  auto config_vector = [&](std::size_t kept_cfg, std::size_t env_cfg) {
    std::vector<Complex> v = vac;
    // Environment creations first (they sit to the right of kept creations).
    for (int t = static_cast<int>(env.size()) - 1; t >= 0; --t)
      for (int spin = 1; spin >= 0; --spin)
        if ((env_cfg >> (2 * t + spin)) & 1u)
          v = apply_dense(dense_creation(m, 2 * env[static_cast<std::size_t>(t)] + spin), v);
    for (int t = static_cast<int>(kept.size()) - 1; t >= 0; --t)
      for (int spin = 1; spin >= 0; --spin)
        if ((kept_cfg >> (2 * t + spin)) & 1u)
          v = apply_dense(dense_creation(m, 2 * kept[static_cast<std::size_t>(t)] + spin), v);
    return v;
  };

  Matrix rho(kept_dim, kept_dim);
  for (std::size_t e = 0; e < env_dim; ++e) {
    std::vector<std::pair<std::size_t, Complex>> amps;
    for (std::size_t a = 0; a < kept_dim; ++a) {
      const Complex alpha = dot(config_vector(a, e), psi);
      if (alpha != Complex(0.0, 0.0)) amps.push_back({a, alpha});
    }
    for (const auto& [ia, va] : amps)
      for (const auto& [ib, vb] : amps) rho(ia, ib) += va * std::conj(vb);
  }
  return rho;
}

/// Dense correlator oracle for the extracted spin state.
inline Matrix dense_nbrdm(const spinext::FockAmplitudeState& state, const std::vector<int>& modes) {
  const int n = static_cast<int>(modes.size());
  const std::vector<Complex> psi = dense_vector(state);
  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::vector<Complex>> vs(dim);
  for (std::size_t cfg = 0; cfg < dim; ++cfg) {
    std::vector<Complex> v = psi;
    for (int t = n - 1; t >= 0; --t) {
      const spinext::Spin s =
          ((cfg >> (n - 1 - t)) & 1u) ? spinext::Spin::down : spinext::Spin::up;
      v = apply_dense(dense_annihilation(state.modes(), {modes[static_cast<std::size_t>(t)], s}), v);
    }
    vs[cfg] = std::move(v);
  }
  Matrix gamma(dim, dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c) gamma(r, c) = dot(vs[c], vs[r]);
  return gamma;
}

/// Spin multiplicities by numeric diagonalization of S^2 on 2^q spins.
inline std::int64_t numeric_multiplicity(int q, int s2) {
  const Matrix s2m = spinext::spin_s2_matrix(q);
  const std::vector<double> ev = spinext::hermitian_eigenvalues(s2m);
  const double target = 0.25 * s2 * (s2 + 2);  // S(S+1) with S = s2/2
  std::int64_t count = 0;
  for (double e : ev)
    if (std::abs(e - target) < 1e-6) ++count;
  return count / (s2 + 1);
}

/// Counts perfect (even q) or near-perfect (odd q) matchings by explicit
/// recursive enumeration.
inline std::int64_t count_matchings(std::vector<int> items) {
  if (items.size() <= 1) return 1;
  std::int64_t total = 0;
  // Pair the first item with each other item.
  for (std::size_t j = 1; j < items.size(); ++j) {
    std::vector<int> rest;
    for (std::size_t k = 1; k < items.size(); ++k)
      if (k != j) rest.push_back(items[k]);
    total += count_matchings(rest);
  }
  // For odd sizes the first item may be the single unmatched one.
  if (items.size() % 2 == 1) {
    std::vector<int> rest(items.begin() + 1, items.end());
    total += count_matchings(rest);
  }
  return total;
}

inline std::int64_t count_matchings(int q) {
  std::vector<int> items(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) items[static_cast<std::size_t>(i)] = i;
  return count_matchings(items);
}

}  // namespace oracles
