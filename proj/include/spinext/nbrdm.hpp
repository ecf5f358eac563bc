#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinext/errors.hpp"
#include "spinext/fock.hpp"
#include "spinext/matrix.hpp"
#include "spinext/rdo.hpp"
#include "spinext/spin_basis.hpp"

namespace spinext {

/// Extracted n-spin state: the matrix of n-fold correlators diagonal in the
/// mode labels. `matrix` is over the product basis |sigma_1 ... sigma_n> in
/// the order of `modes`, up = 0, down = 1, first mode most significant.
struct SpinDensityMatrix {
  int n = 0;
  std::vector<int> modes;
  Matrix matrix;
  double raw_trace = 0.0;
  bool normalized = false;

  SpinDensityMatrix normalized_copy() const {
    if (normalized) return *this;
    if (raw_trace <= 0.0)
      throw std::invalid_argument("SpinDensityMatrix: cannot normalize a traceless matrix");
    SpinDensityMatrix g = *this;
    g.matrix *= Complex(1.0 / raw_trace, 0.0);
    g.normalized = true;
    return g;
  }
};

/// Correlator route: Gamma[s, s'] = <A_{s'} Psi | A_s Psi> where A_s is the
/// annihilator string d_{m1,s1} d_{m2,s2} ... applied rightmost first.
/// Being a Gram matrix, the result is Hermitian and positive semidefinite
/// by construction.
inline SpinDensityMatrix compute_nbrdm_direct(const FockAmplitudeState& state,
                                              const std::vector<int>& modes) {
  const int n = static_cast<int>(modes.size());
  if (n < 1) throw std::invalid_argument("compute_nbrdm_direct: empty mode list");
  if (n > 6) throw capacity_error("compute_nbrdm_direct: limited to n <= 6 modes");
  {
    std::vector<int> sorted = modes;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw std::invalid_argument("compute_nbrdm_direct: duplicate mode");
  }

  const std::size_t dim = std::size_t{1} << n;
  std::vector<FockAmplitudeState> annihilated;
  annihilated.reserve(dim);
  for (std::size_t cfg = 0; cfg < dim; ++cfg) {
    FockAmplitudeState v = state;
    for (int t = n - 1; t >= 0; --t) {
      const Spin s = ((cfg >> (n - 1 - t)) & 1u) ? Spin::down : Spin::up;
      v = apply_annihilation(v, {modes[static_cast<std::size_t>(t)], s});
    }
    annihilated.push_back(std::move(v));
  }

  SpinDensityMatrix gamma;
  gamma.n = n;
  gamma.modes = modes;
  gamma.matrix = Matrix(dim, dim);
  for (std::size_t row = 0; row < dim; ++row)
    for (std::size_t col = 0; col < dim; ++col)
      gamma.matrix(row, col) = inner_product(annihilated[col], annihilated[row]);
  gamma.raw_trace = gamma.matrix.trace().real();
  return gamma;
}

/// Block-mapping route: every fermionic block basis state maps onto its spin
/// image (delocalized singlets stay singlets, aligned spins stay aligned)
/// and each doubly-occupied mode becomes an unpolarized spin-1/2 factor.
/// Blocks containing unoccupied modes do not contribute and are skipped.
inline SpinDensityMatrix nbrdm_from_rdo(const RdoBlockSet& set) {
  const int n = static_cast<int>(set.modes.size());
  int k = n;
  if (k == 0) {
    // Mode ids were not recorded; infer the position count from the keys.
    if (set.blocks.empty()) throw std::invalid_argument("nbrdm_from_rdo: empty block set");
    k = static_cast<int>(set.blocks.front().key.occ.size());
  }
  for (const auto& block : set.blocks)
    if (static_cast<int>(block.key.occ.size()) != k)
      throw std::invalid_argument("nbrdm_from_rdo: blocks over mismatched mode sets");

  const std::size_t dim = std::size_t{1} << k;
  SpinDensityMatrix gamma;
  gamma.n = k;
  gamma.modes = set.modes;
  gamma.matrix = Matrix(dim, dim);

  for (const auto& block : set.blocks) {
    if (block.key.has_zero_occupation()) continue;
    if (block.matrix.max_abs() < 1e-16) continue;
    const int q = block.key.singly_occupied();
    MultipletBasis basis = multiplet_basis(q, block.key.s2, block.key.m2);

    std::vector<int> singles, doubles;
    for (int t = 0; t < k; ++t)
      (block.key.occ[t] == 1 ? singles : doubles).push_back(t);

    // Spread a spin configuration of the singles plus an assignment of the
    // doubly-occupied spins into a full product-basis index.
    auto full_index = [&](std::size_t single_cfg, std::size_t doubles_cfg) {
      std::size_t idx = 0;
      for (int t = 0; t < q; ++t)
        if (spin_is_down(single_cfg, t, q)) idx |= std::size_t{1} << (k - 1 - singles[t]);
      for (std::size_t t = 0; t < doubles.size(); ++t)
        if ((doubles_cfg >> t) & 1u) idx |= std::size_t{1} << (k - 1 - doubles[t]);
      return idx;
    };

    const std::size_t doubles_count = std::size_t{1} << doubles.size();
    for (std::size_t a = 0; a < basis.vectors.size(); ++a) {
      for (std::size_t b = 0; b < basis.vectors.size(); ++b) {
        const Complex w = block.matrix(a, b);
        if (w == Complex(0.0, 0.0)) continue;
        for (std::size_t ca = 0; ca < basis.vectors[a].size(); ++ca) {
          const Complex va = basis.vectors[a][ca];
          if (va == Complex(0.0, 0.0)) continue;
          for (std::size_t cb = 0; cb < basis.vectors[b].size(); ++cb) {
            const Complex vb = basis.vectors[b][cb];
            if (vb == Complex(0.0, 0.0)) continue;
            for (std::size_t tau = 0; tau < doubles_count; ++tau)
              gamma.matrix(full_index(ca, tau), full_index(cb, tau)) += w * va * std::conj(vb);
          }
        }
      }
    }
  }
  gamma.raw_trace = gamma.matrix.trace().real();
  return gamma;
}

struct SpinBlockKey {
  int s2 = 0;
  int m2 = 0;
  friend bool operator<(const SpinBlockKey& a, const SpinBlockKey& b) {
    return std::tie(a.s2, b.m2) < std::tie(b.s2, a.m2);
  }
};

struct SpinBlockDecomposition {
  std::map<SpinBlockKey, Matrix> blocks;
  double off_block_residual = 0.0;
  bool structure_ok = false;  // residual within tolerance
};

/// (S, M) block decomposition of an extracted spin state over the coupled
/// bases; for sources of the closed-shell kind the off-block residual
/// vanishes and blocks at fixed S agree across M.
inline SpinBlockDecomposition block_decompose_spin(const SpinDensityMatrix& gamma,
                                                   double tolerance = tol::structural) {
  const int n = gamma.n;
  SpinBlockDecomposition out;

  std::vector<std::pair<SpinBlockKey, SpinVector>> all;
  for (int s2 = n % 2; s2 <= n; s2 += 2)
    for (int m2 = s2; m2 >= -s2; m2 -= 2) {
      MultipletBasis basis = multiplet_basis(n, s2, m2);
      Matrix block(basis.vectors.size(), basis.vectors.size());
      out.blocks.emplace(SpinBlockKey{s2, m2}, std::move(block));
      for (auto& v : basis.vectors) all.push_back({SpinBlockKey{s2, m2}, std::move(v)});
    }

  auto project = [&gamma](const SpinVector& x, const SpinVector& y) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == Complex(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != Complex(0.0, 0.0)) s += std::conj(x[i]) * gamma.matrix(i, j) * y[j];
    }
    return s;
  };

  for (std::size_t a = 0; a < all.size(); ++a)
    for (std::size_t b = a + 1; b < all.size(); ++b) {
      if (all[a].first.s2 == all[b].first.s2 && all[a].first.m2 == all[b].first.m2) continue;
      const Complex v = project(all[a].second, all[b].second);
      out.off_block_residual = std::max(out.off_block_residual, std::abs(v));
    }

  for (auto& [key, block] : out.blocks) {
    std::vector<const SpinVector*> vecs;
    for (const auto& [k, v] : all)
      if (k.s2 == key.s2 && k.m2 == key.m2) vecs.push_back(&v);
    for (std::size_t a = 0; a < vecs.size(); ++a)
      for (std::size_t b = 0; b < vecs.size(); ++b) block(a, b) = project(*vecs[a], *vecs[b]);
  }

  out.structure_ok = out.off_block_residual <= tolerance;
  return out;
}

// ---- projector decomposition over the overcomplete singlet family ----

struct ProjectorDecomposition {
  bool applicable = false;      // gamma real in the product basis
  double imag_residual = 0.0;   // after the global phase fix
  std::vector<std::string> keys;
  std::vector<double> coefficients;
  double residual = 0.0;        // max-abs of gamma minus the combination
  double coefficient_sum = 0.0;
};

namespace detail {

/// Projector onto the singlet of positions (a, b) tensor identity elsewhere.
inline Matrix singlet_projector_matrix(int n, int a, int b) {
  const std::size_t dim = std::size_t{1} << n;
  Matrix p(dim, dim);
  const std::size_t bit_a = std::size_t{1} << (n - 1 - a);
  const std::size_t bit_b = std::size_t{1} << (n - 1 - b);
  for (std::size_t x = 0; x < dim; ++x) {
    const bool xa = x & bit_a, xb = x & bit_b;
    if (xa == xb) continue;
    for (std::size_t y : {x, x ^ bit_a ^ bit_b}) {
      const double sign_x = xa ? -1.0 : 1.0;
      const bool ya = y & bit_a;
      const double sign_y = ya ? -1.0 : 1.0;
      p(x, y) += 0.5 * sign_x * sign_y;
    }
  }
  return p;
}

inline Matrix double_singlet_projector_matrix(int n, int a, int b, int c, int d) {
  return singlet_projector_matrix(n, a, b) * singlet_projector_matrix(n, c, d);
}

/// Least squares fit of gamma (assumed real) onto a family of real symmetric
/// matrices; returns coefficients via normal equations.
inline std::vector<double> real_least_squares(const std::vector<Matrix>& family,
                                              const Matrix& gamma) {
  const std::size_t m = family.size();
  std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
  auto dot = [](const Matrix& a, const Matrix& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        s += a(i, j).real() * b(i, j).real() + a(i, j).imag() * b(i, j).imag();
    return s;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) g[i][j] = dot(family[i], family[j]);
    g[i][m] = dot(family[i], gamma);
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
    std::swap(g[col], g[piv]);
    if (std::abs(g[col][col]) < 1e-12)
      throw std::runtime_error("projector family is not linearly independent");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = g[r][col] / g[col][col];
      for (std::size_t c = col; c <= m; ++c) g[r][c] -= f * g[col][c];
    }
  }
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) x[i] = g[i][m] / g[i][i];
  return x;
}

}  // namespace detail

/// Expands a real extracted state over products of singlet projectors and
/// unpolarized single-spin factors (three or four spins). Coefficients sum
/// to one whenever the fit is exact, but may be negative.
inline ProjectorDecomposition projector_decomposition(const SpinDensityMatrix& gamma_in,
                                                      double tolerance = tol::structural) {
  if (gamma_in.n != 3 && gamma_in.n != 4)
    throw std::invalid_argument("projector_decomposition: defined for n = 3 or 4");
  const SpinDensityMatrix gamma = gamma_in.normalized ? gamma_in : gamma_in.normalized_copy();
  const int n = gamma.n;
  const std::size_t dim = std::size_t{1} << n;

  ProjectorDecomposition out;

  // Global phase fix: rotate the largest-magnitude entry to positive real,
  // then require the matrix to be real.
  Matrix work = gamma.matrix;
  Complex largest = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (std::abs(work(i, j)) > std::abs(largest)) largest = work(i, j);
  if (std::abs(largest) > 0.0) {
    const Complex phase = std::conj(largest) / std::abs(largest);
    work *= phase;
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      out.imag_residual = std::max(out.imag_residual, std::abs(work(i, j).imag()));
  if (out.imag_residual > tolerance) {
    out.applicable = false;
    return out;
  }
  out.applicable = true;

  std::vector<Matrix> family;
  if (n == 3) {
    const std::array<std::array<int, 2>, 3> pairs = {{{0, 1}, {1, 2}, {0, 2}}};
    for (const auto& [a, b] : pairs) {
      family.push_back(detail::singlet_projector_matrix(3, a, b) * Complex(0.5, 0.0));
      out.keys.push_back("p(" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    family.push_back(Matrix::identity(8) * Complex(1.0 / 8.0, 0.0));
    out.keys.push_back("p0");
  } else {
    const std::array<std::array<int, 4>, 3> pairings = {{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    for (const auto& [a, b, c, d] : pairings) {
      family.push_back(detail::double_singlet_projector_matrix(4, a, b, c, d));
      out.keys.push_back("p(" + std::to_string(a) + "," + std::to_string(b) + ")(" +
                         std::to_string(c) + "," + std::to_string(d) + ")");
    }
    for (const auto& [a, b, c, d] : pairings) {
      family.push_back(detail::singlet_projector_matrix(4, a, b) * Complex(0.25, 0.0));
      out.keys.push_back("p(" + std::to_string(a) + "," + std::to_string(b) + ")");
    }
    family.push_back(Matrix::identity(16) * Complex(1.0 / 16.0, 0.0));
    out.keys.push_back("p0");
  }

  out.coefficients = detail::real_least_squares(family, work);
  Matrix fit(dim, dim);
  for (std::size_t i = 0; i < family.size(); ++i) {
    fit += family[i] * Complex(out.coefficients[i], 0.0);
    out.coefficient_sum += out.coefficients[i];
  }
  out.residual = (work - fit).max_abs();
  return out;
}

/// The images of the three singlet projectors |S_ab, up_c><S_ab, up_c| inside
/// the two-dimensional (S, M) = (1/2, 1/2) subspace of three spins, in the
/// basis {singlet of (0,1) times up, triplet of (0,1) coupled down to 1/2}.
inline std::array<Matrix, 3> three_spin_singlet_projector_images() {
  const int n = 3;
  // Basis vectors in the product space (configurations uud, udu, duu, ...).
  auto basis_vec = [&](std::initializer_list<std::pair<int, double>> comps) {
    SpinVector v(8, Complex(0.0, 0.0));
    for (const auto& [idx, val] : comps) v[static_cast<std::size_t>(idx)] = val;
    return v;
  };
  const double r2 = 1.0 / std::sqrt(2.0);
  const double r6 = 1.0 / std::sqrt(6.0);
  // Configurations: bit 2 = spin 0, bit 1 = spin 1, bit 0 = spin 2 (0 = up).
  const SpinVector e1 = basis_vec({{0b010, r2}, {0b100, -r2}});  // S(0,1) x up(2)
  // Triplet of (0,1) coupled down to total 1/2, sign fixed so the all-up-but-
  // last component is negative.
  const SpinVector e2 = basis_vec({{0b010, r6}, {0b100, r6}, {0b001, -2 * r6}});
  const std::array<Matrix, 3> projectors = {detail::singlet_projector_matrix(n, 0, 1),
                                            detail::singlet_projector_matrix(n, 0, 2),
                                            detail::singlet_projector_matrix(n, 1, 2)};
  std::array<Matrix, 3> images = {Matrix(2, 2), Matrix(2, 2), Matrix(2, 2)};
  const std::array<const SpinVector*, 2> basis = {&e1, &e2};
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        Complex s = 0.0;
        for (std::size_t x = 0; x < 8; ++x)
          for (std::size_t y = 0; y < 8; ++y)
            s += std::conj((*basis[i])[x]) * projectors[p](x, y) * (*basis[j])[y];
        images[p](i, j) = s;
      }
  return images;
}

/// Checks factorization as (unpolarized spin at `position`) x (rest):
/// returns the max-abs deviation of gamma from identity_2 tensor its own
/// partial trace over that spin, scaled by 1/2.
inline double unpolarized_factor_residual(const SpinDensityMatrix& gamma, int position) {
  const int n = gamma.n;
  if (position < 0 || position >= n)
    throw std::invalid_argument("unpolarized_factor_residual: bad position");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t bit = std::size_t{1} << (n - 1 - position);

  const std::size_t rest_dim = dim >> 1;
  Matrix rest(rest_dim, rest_dim);
  auto expand = [&](std::size_t compact, bool set) {
    const std::size_t low = compact & (bit - 1);
    const std::size_t high = (compact & ~(bit - 1)) << 1;
    return high | (set ? bit : 0) | low;
  };
  for (std::size_t i = 0; i < rest_dim; ++i)
    for (std::size_t j = 0; j < rest_dim; ++j)
      rest(i, j) = 0.5 * (gamma.matrix(expand(i, false), expand(j, false)) +
                          gamma.matrix(expand(i, true), expand(j, true)));

  double residual = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const bool bi = i & bit, bj = j & bit;
      const Complex expected =
          bi == bj ? rest((i & (bit - 1)) | ((i & ~((bit << 1) - 1)) >> 1),
                          (j & (bit - 1)) | ((j & ~((bit << 1) - 1)) >> 1))
                   : Complex(0.0, 0.0);
      residual = std::max(residual, std::abs(gamma.matrix(i, j) - expected));
    }
  return residual;
}

}  // namespace spinext
