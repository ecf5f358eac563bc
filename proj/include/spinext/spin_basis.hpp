#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinext/matrix.hpp"
#include "spinext/rational.hpp"
#include "spinext/sco.hpp"

namespace spinext {

// States of q spin-1/2's live on 2^q product configurations. Position t
// (0-based, first position most significant) contributes bit (q-1-t):
// 0 = up, 1 = down.

using SpinVector = std::vector<Complex>;

inline bool spin_is_down(std::size_t config, int position, int q) {
  return (config >> (q - 1 - position)) & 1u;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

/// One member of the overcomplete family: disjoint singlet pairs plus the
/// remaining positions coupled into the fully symmetric multiplet.
struct PairingPattern {
  std::vector<ModePair> pairs;     // positions, first < second
  std::vector<int> unpaired;       // positions, ascending
};

/// All ways to pair up (q - unpaired_count) of q positions, in lexicographic
/// pair-list order (smallest position pairs first, then stays unpaired);
/// unmatched positions are ascending.
inline std::vector<PairingPattern> enumerate_pairings(int q, int unpaired_count) {
  if ((q - unpaired_count) % 2 != 0 || unpaired_count < 0 || unpaired_count > q)
    throw std::invalid_argument("enumerate_pairings: inconsistent arguments");
  const int num_pairs = (q - unpaired_count) / 2;
  std::vector<PairingPattern> out;

  struct Rec {
    int num_pairs;
    std::vector<PairingPattern>* out;
    void run(const std::vector<int>& avail, int pairs_left, int skip_budget,
             PairingPattern& current) {
      if (pairs_left == 0) {
        PairingPattern done = current;
        done.unpaired.insert(done.unpaired.end(), avail.begin(), avail.end());
        std::sort(done.unpaired.begin(), done.unpaired.end());
        out->push_back(std::move(done));
        return;
      }
      const int a = avail.front();
      for (std::size_t bi = 1; bi < avail.size(); ++bi) {
        std::vector<int> rest;
        for (std::size_t k = 1; k < avail.size(); ++k)
          if (k != bi) rest.push_back(avail[k]);
        current.pairs.push_back({a, avail[bi]});
        run(rest, pairs_left - 1, skip_budget, current);
        current.pairs.pop_back();
      }
      if (skip_budget > 0) {
        std::vector<int> rest(avail.begin() + 1, avail.end());
        current.unpaired.push_back(a);
        run(rest, pairs_left, skip_budget - 1, current);
        current.unpaired.pop_back();
      }
    }
  } rec{num_pairs, &out};

  std::vector<int> all(q);
  for (int i = 0; i < q; ++i) all[i] = i;
  PairingPattern current;
  if (num_pairs == 0) {
    current.unpaired = all;
    out.push_back(current);
  } else {
    rec.run(all, num_pairs, unpaired_count, current);
  }
  return out;
}

/// Product of singlet pairs times the fully symmetric (Dicke) state of the
/// unpaired positions with total spin s2/2 and projection m2/2.
inline SpinVector pairing_state(int q, const PairingPattern& pattern, int s2, int m2) {
  if (static_cast<int>(pattern.unpaired.size()) != s2)
    throw std::invalid_argument("pairing_state: unpaired count must equal 2S");
  if ((s2 - m2) % 2 != 0 || m2 < -s2 || m2 > s2)
    throw std::invalid_argument("pairing_state: invalid projection");
  const int downs_needed = (s2 - m2) / 2;
  const double dicke_norm =
      1.0 / std::sqrt(static_cast<double>(binomial(s2, downs_needed)));
  const double pair_norm = 1.0 / std::sqrt(2.0);

  SpinVector v(std::size_t{1} << q, Complex(0.0, 0.0));
  for (std::size_t c = 0; c < v.size(); ++c) {
    double amp = 1.0;
    for (const auto& [a, b] : pattern.pairs) {
      const bool da = spin_is_down(c, a, q);
      const bool db = spin_is_down(c, b, q);
      if (da == db) {
        amp = 0.0;
        break;
      }
      amp *= da ? -pair_norm : pair_norm;  // up-down: +, down-up: -
    }
    if (amp == 0.0) continue;
    int downs = 0;
    for (int u : pattern.unpaired)
      if (spin_is_down(c, u, q)) ++downs;
    if (downs != downs_needed) continue;
    v[c] = amp * dicke_norm;
  }
  return v;
}

inline Complex spin_dot(const SpinVector& a, const SpinVector& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

struct MultipletBasis {
  int q = 0;
  int s2 = 0;
  int m2 = 0;
  std::vector<SpinVector> vectors;          // orthonormal
  std::vector<PairingPattern> generators;   // family member behind each vector
};

/// Orthonormal basis of the (S, M) eigenspace of q spins, Gram-Schmidt over
/// the overcomplete singlet-pairing family in its canonical order. The same
/// generator order at every M makes the bases related by pure lowering, so
/// block matrices of rotationally invariant operators agree across M.
inline MultipletBasis multiplet_basis(int q, int s2, int m2) {
  if (q < 0 || s2 < 0 || s2 > q || (q - s2) % 2 != 0)
    throw std::invalid_argument("multiplet_basis: invalid (q, 2S)");
  if (m2 < -s2 || m2 > s2 || (s2 - m2) % 2 != 0)
    throw std::invalid_argument("multiplet_basis: invalid 2M");

  MultipletBasis basis;
  basis.q = q;
  basis.s2 = s2;
  basis.m2 = m2;
  if (q == 0) {
    basis.vectors.push_back(SpinVector{Complex(1.0, 0.0)});
    basis.generators.push_back(PairingPattern{});
    return basis;
  }

  const auto family = enumerate_pairings(q, s2);
  for (const auto& pattern : family) {
    SpinVector v = pairing_state(q, pattern, s2, m2);
    for (const auto& prev : basis.vectors) {
      const Complex proj = spin_dot(prev, v);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * prev[i];
    }
    double nrm = 0.0;
    for (const auto& x : v) nrm += std::norm(x);
    nrm = std::sqrt(nrm);
    if (nrm < 1e-7) continue;  // linearly dependent family member
    for (auto& x : v) x /= nrm;
    basis.vectors.push_back(std::move(v));
    basis.generators.push_back(pattern);
  }
  return basis;
}

// ---- collective spin components on n distinguishable spins ----

inline Matrix spin_sz_matrix(int n) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const int downs = std::popcount(c & (dim - 1));
    m(c, c) = 0.5 * static_cast<double>(n - 2 * downs);
  }
  return m;
}

inline Matrix spin_sx_matrix(int n) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (int t = 0; t < n; ++t) m(c ^ (std::size_t{1} << t), c) += 0.5;
  return m;
}

inline Matrix spin_sy_matrix(int n) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix m(dim, dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (int t = 0; t < n; ++t) {
      const bool down = (c >> t) & 1u;
      // sigma_y |up> = i |down>, sigma_y |down> = -i |up>
      m(c ^ (std::size_t{1} << t), c) += down ? Complex(0.0, -0.5) : Complex(0.0, 0.5);
    }
  return m;
}

inline Matrix spin_component_matrix(char axis, int n) {
  switch (axis) {
    case 'x':
      return spin_sx_matrix(n);
    case 'y':
      return spin_sy_matrix(n);
    case 'z':
      return spin_sz_matrix(n);
    default:
      throw std::invalid_argument("spin_component_matrix: axis must be x, y or z");
  }
}

inline Matrix spin_s2_matrix(int n) {
  const Matrix sx = spin_sx_matrix(n);
  const Matrix sy = spin_sy_matrix(n);
  const Matrix sz = spin_sz_matrix(n);
  return sx * sx + sy * sy + sz * sz;
}

}  // namespace spinext
