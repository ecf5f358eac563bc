#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinext/census.hpp"
#include "spinext/errors.hpp"
#include "spinext/fock.hpp"
#include "spinext/matrix.hpp"
#include "spinext/spin_basis.hpp"
#include "spinext/tolerances.hpp"

namespace spinext {

/// Label of a superselection-allowed block: particle number, total spin and
/// projection (stored doubled), and the per-position occupation vector.
struct BlockKey {
  int n_e = 0;
  int s2 = 0;
  int m2 = 0;
  std::vector<int> occ;

  int singly_occupied() const {
    int q = 0;
    for (int o : occ) q += (o == 1);
    return q;
  }
  bool has_zero_occupation() const {
    for (int o : occ)
      if (o == 0) return true;
    return false;
  }

  friend bool operator==(const BlockKey& a, const BlockKey& b) {
    return a.n_e == b.n_e && a.s2 == b.s2 && a.m2 == b.m2 && a.occ == b.occ;
  }
  friend bool operator<(const BlockKey& a, const BlockKey& b) {
    // M descending within a multiplet, mirroring the M = S first convention.
    return std::tie(a.n_e, a.occ, a.s2, b.m2) < std::tie(b.n_e, b.occ, b.s2, a.m2);
  }
};

namespace detail {

inline void validate_block_key(const BlockKey& key) {
  int sum = 0;
  for (int o : key.occ) {
    if (o < 0 || o > 2) throw std::invalid_argument("BlockKey: occupations must be 0, 1 or 2");
    sum += o;
  }
  if (sum != key.n_e) throw std::invalid_argument("BlockKey: occupations do not sum to Ne");
  const int q = key.singly_occupied();
  if (key.s2 < 0 || key.s2 > q || (q - key.s2) % 2 != 0)
    throw std::invalid_argument("BlockKey: 2S inconsistent with singly-occupied count");
  if (std::abs(key.m2) > key.s2 || (key.s2 - key.m2) % 2 != 0)
    throw std::invalid_argument("BlockKey: invalid 2M");
}

}  // namespace detail

/// Sparse vector over the kept-mode Fock space (4^K).
using SparseFockVector = std::vector<std::pair<std::uint64_t, Complex>>;

struct BlockBasis {
  BlockKey key;
  MultipletBasis spin;                    // over the singly-occupied positions
  std::vector<SparseFockVector> fermionic;  // embedded, orthonormal
  std::vector<std::string> labels;
};

/// Orthonormal basis of the block subspace: the (S, M) multiplet of the
/// singly-occupied positions tensored with local singlets on the doubly
/// occupied ones. Mode-grouped embedding into the kept Fock space (spin-up
/// orbital before spin-down within each mode, modes in position order) is
/// free of fermionic signs.
inline BlockBasis spin_basis_for_block(const BlockKey& key) {
  detail::validate_block_key(key);
  const int k = static_cast<int>(key.occ.size());
  const int q = key.singly_occupied();

  std::vector<int> singles;
  std::uint64_t base_bits = 0;
  for (int t = 0; t < k; ++t) {
    if (key.occ[t] == 1) singles.push_back(t);
    if (key.occ[t] == 2) base_bits |= 3ULL << (2 * t);
  }

  BlockBasis basis;
  basis.key = key;
  basis.spin = multiplet_basis(q, key.s2, key.m2);

  for (std::size_t v = 0; v < basis.spin.vectors.size(); ++v) {
    const SpinVector& sv = basis.spin.vectors[v];
    SparseFockVector fv;
    for (std::size_t cfg = 0; cfg < sv.size(); ++cfg) {
      if (sv[cfg] == Complex(0.0, 0.0)) continue;
      std::uint64_t bits = base_bits;
      for (int t = 0; t < q; ++t) {
        const bool down = spin_is_down(cfg, t, q);
        bits |= 1ULL << (2 * singles[t] + (down ? 1 : 0));
      }
      fv.push_back({bits, sv[cfg]});
    }
    std::sort(fv.begin(), fv.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    basis.fermionic.push_back(std::move(fv));

    std::string label;
    auto append = [&label](const std::string& piece) {
      label += (label.empty() ? "" : " ") + piece;
    };
    for (int t = 0; t < k; ++t)
      if (key.occ[t] == 2) append("S(" + std::to_string(t) + "," + std::to_string(t) + ")");
    const PairingPattern& gen = basis.spin.generators[v];
    for (const auto& [a, b] : gen.pairs)
      append("S(" + std::to_string(singles[a]) + "," + std::to_string(singles[b]) + ")");
    if (!gen.unpaired.empty()) {
      append("sym{");
      for (std::size_t i = 0; i < gen.unpaired.size(); ++i) {
        if (i) label += ",";
        label += std::to_string(singles[gen.unpaired[i]]);
      }
      label += "}";
    }
    if (label.empty()) label = "vac";
    basis.labels.push_back(std::move(label));
  }
  return basis;
}

namespace detail {

struct SplitIndex {
  std::uint64_t env_bits = 0;
  std::uint64_t local = 0;
  double sign = 1.0;
};

/// Splits a global occupation word into (kept local index, environment bits)
/// with the sign of reordering kept spin-orbitals (in kept-list order, up
/// before down) in front of the environment spin-orbitals (ascending).
inline SplitIndex split_global_index(std::uint64_t bits, const std::vector<int>& kept,
                                     std::uint64_t kept_mask) {
  SplitIndex s;
  s.env_bits = bits & ~kept_mask;
  std::vector<int> kept_sequence;
  for (std::size_t t = 0; t < kept.size(); ++t) {
    for (int spin = 0; spin < 2; ++spin) {
      const int lin = 2 * kept[t] + spin;
      if ((bits >> lin) & 1ULL) {
        s.local |= 1ULL << (2 * t + spin);
        kept_sequence.push_back(lin);
      }
    }
  }
  int inversions = 0;
  for (std::size_t i = 0; i < kept_sequence.size(); ++i) {
    for (std::size_t j = i + 1; j < kept_sequence.size(); ++j)
      if (kept_sequence[i] > kept_sequence[j]) ++inversions;
    const std::uint64_t below = (1ULL << kept_sequence[i]) - 1ULL;
    inversions += std::popcount(s.env_bits & below);
  }
  s.sign = (inversions & 1) ? -1.0 : 1.0;
  return s;
}

inline std::uint64_t kept_mask_for(const std::vector<int>& kept, int modes) {
  std::uint64_t mask = 0;
  for (int m : kept) {
    if (m < 0 || m >= modes)
      throw std::invalid_argument("partial_trace: mode index out of range");
    const std::uint64_t bits = 3ULL << (2 * m);
    if (mask & bits) throw std::invalid_argument("partial_trace: duplicate kept mode");
    mask |= bits;
  }
  return mask;
}

}  // namespace detail

/// Reduced density matrix of the kept modes on their 4^K Fock space,
/// rho[a,b] = sum_env <a,env|Psi><Psi|b,env> with per-amplitude signs.
inline Matrix partial_trace(const FockAmplitudeState& state, const std::vector<int>& kept) {
  if (kept.empty()) throw std::invalid_argument("partial_trace: kept mode list is empty");
  if (kept.size() > 6) throw capacity_error("partial_trace: dense path limited to K <= 6");
  const std::uint64_t kept_mask = detail::kept_mask_for(kept, state.modes());

  std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, Complex>>> buckets;
  for (const auto& [b, a] : state.amplitudes()) {
    const auto split = detail::split_global_index(b.bits, kept, kept_mask);
    buckets[split.env_bits].push_back({split.local, split.sign * a});
  }

  const std::size_t dim = std::size_t{1} << (2 * kept.size());
  Matrix rho(dim, dim);
  for (const auto& [env, entries] : buckets)
    for (const auto& [ia, va] : entries)
      for (const auto& [ib, vb] : entries) rho(ia, ib) += va * std::conj(vb);
  return rho;
}

/// Partial trace of a kept-space density matrix down to a subset of its
/// positions; used for contraction consistency checks.
inline Matrix partial_trace_matrix(const Matrix& rho, int modes, const std::vector<int>& kept) {
  const std::size_t dim = std::size_t{1} << (2 * modes);
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("partial_trace_matrix: dimension mismatch");
  const std::uint64_t kept_mask = detail::kept_mask_for(kept, modes);

  std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, std::pair<std::uint64_t, double>>>>
      buckets;  // env -> list of (global, (local, sign))
  for (std::uint64_t x = 0; x < dim; ++x) {
    const auto split = detail::split_global_index(x, kept, kept_mask);
    buckets[split.env_bits].push_back({x, {split.local, split.sign}});
  }

  const std::size_t out_dim = std::size_t{1} << (2 * kept.size());
  Matrix out(out_dim, out_dim);
  for (const auto& [env, entries] : buckets)
    for (const auto& [xa, la] : entries)
      for (const auto& [xb, lb] : entries)
        out(la.first, lb.first) += la.second * lb.second * rho(xa, xb);
  return out;
}

/// Probability of each kept-mode occupation pattern, straight from the
/// amplitudes; light enough for any K.
inline std::map<std::vector<int>, double> occupation_probabilities(
    const FockAmplitudeState& state, const std::vector<int>& kept) {
  detail::kept_mask_for(kept, state.modes());
  std::map<std::vector<int>, double> out;
  for (const auto& [b, a] : state.amplitudes()) {
    std::vector<int> occ(kept.size());
    for (std::size_t t = 0; t < kept.size(); ++t) occ[t] = b.mode_occupation(kept[t]);
    out[std::move(occ)] += std::norm(a);
  }
  return out;
}

struct ResidualReport {
  double cross_sector = 0.0;      // coherences across different (Ne, S, M)
  double cross_occupation = 0.0;  // same (Ne, S, M), different occupations
};

struct RdoBlock {
  BlockKey key;
  Matrix matrix;
  std::vector<std::string> basis_labels;
  double probability = 0.0;
};

struct RdoBlockSet {
  std::vector<int> modes;  // kept mode ids, for context
  std::vector<RdoBlock> blocks;
  ResidualReport residual;
  double total_trace = 0.0;
};

/// Projects a kept-mode density matrix onto every (Ne, S, M, occ) subspace.
/// Diagonal blocks are stored; coherences between different subspaces feed
/// the residual report and are discarded.
inline RdoBlockSet block_decompose(const Matrix& rho, const std::vector<int>& modes = {}) {
  std::size_t dim = rho.rows();
  if (dim != rho.cols() || dim == 0)
    throw std::invalid_argument("block_decompose: density matrix must be square");
  int k = 0;
  while ((std::size_t{1} << (2 * k)) < dim) ++k;
  if ((std::size_t{1} << (2 * k)) != dim)
    throw std::invalid_argument("block_decompose: dimension is not a power of 4");

  RdoBlockSet set;
  set.modes = modes;
  set.total_trace = rho.trace().real();

  struct Entry {
    BlockKey key;
    std::size_t block_index;  // into set.blocks
    std::size_t column;       // within the block
    SparseFockVector vec;
  };
  std::vector<Entry> all;

  std::vector<int> occ(k, 0);
  for (;;) {
    int n_e = 0, q = 0;
    for (int o : occ) {
      n_e += o;
      q += (o == 1);
    }
    for (int s2 = q % 2; s2 <= q; s2 += 2) {
      for (int m2 = s2; m2 >= -s2; m2 -= 2) {
        BlockKey key{n_e, s2, m2, occ};
        BlockBasis basis = spin_basis_for_block(key);
        RdoBlock block;
        block.key = key;
        block.basis_labels = basis.labels;
        block.matrix = Matrix(basis.fermionic.size(), basis.fermionic.size());
        const std::size_t bi = set.blocks.size();
        for (std::size_t c = 0; c < basis.fermionic.size(); ++c)
          all.push_back({key, bi, c, std::move(basis.fermionic[c])});
        set.blocks.push_back(std::move(block));
      }
    }
    int pos = k - 1;
    while (pos >= 0 && ++occ[static_cast<std::size_t>(pos)] == 3) {
      occ[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  auto project = [&rho](const SparseFockVector& x, const SparseFockVector& y) {
    Complex s = 0.0;
    for (const auto& [ix, vx] : x)
      for (const auto& [iy, vy] : y) s += std::conj(vx) * rho(ix, iy) * vy;
    return s;
  };

  for (std::size_t a = 0; a < all.size(); ++a) {
    for (std::size_t b = a; b < all.size(); ++b) {
      const Complex v = project(all[a].vec, all[b].vec);
      if (all[a].block_index == all[b].block_index) {
        set.blocks[all[a].block_index].matrix(all[a].column, all[b].column) = v;
        if (a != b) set.blocks[all[a].block_index].matrix(all[b].column, all[a].column) = std::conj(v);
        continue;
      }
      const BlockKey& ka = all[a].key;
      const BlockKey& kb = all[b].key;
      const bool same_sector = ka.n_e == kb.n_e && ka.s2 == kb.s2 && ka.m2 == kb.m2;
      double& slot = same_sector ? set.residual.cross_occupation : set.residual.cross_sector;
      slot = std::max(slot, std::abs(v));
    }
  }

  for (auto& block : set.blocks) block.probability = block.matrix.trace().real();
  std::sort(set.blocks.begin(), set.blocks.end(),
            [](const RdoBlock& a, const RdoBlock& b) { return a.key < b.key; });
  return set;
}

struct SuperselectionReport {
  bool pass = false;
  double cross_sector = 0.0;
  double max_probability_asymmetry = 0.0;  // across M within a multiplet
  double max_block_asymmetry = 0.0;        // block matrices across M
  double max_bound_violation = 0.0;        // of 0 <= p <= total/(2S+1)
  std::vector<std::string> failures;
};

/// Checks the structural constraints: no cross-sector coherences, equal
/// blocks and probabilities across M, and per-multiplet probability bounds.
inline SuperselectionReport verify_superselection(const RdoBlockSet& set,
                                                  double tolerance = tol::structural) {
  SuperselectionReport report;
  report.cross_sector = set.residual.cross_sector;
  if (report.cross_sector > tolerance)
    report.failures.push_back("cross-sector coherence " + std::to_string(report.cross_sector));

  std::map<std::tuple<int, int, std::vector<int>>, std::vector<const RdoBlock*>> families;
  for (const auto& block : set.blocks)
    families[{block.key.n_e, block.key.s2, block.key.occ}].push_back(&block);

  const double total = set.total_trace > 0.0 ? set.total_trace : 1.0;
  for (const auto& [fam, blocks] : families) {
    const int s2 = std::get<1>(fam);
    double mean = 0.0;
    for (const auto* b : blocks) mean += b->probability;
    mean /= static_cast<double>(blocks.size());
    for (const auto* b : blocks) {
      report.max_probability_asymmetry =
          std::max(report.max_probability_asymmetry, std::abs(b->probability - mean));
      const double upper = total / static_cast<double>(s2 + 1);
      const double viol = std::max(-b->probability, b->probability - upper);
      report.max_bound_violation = std::max(report.max_bound_violation, viol);
      if (b->matrix.rows() == blocks.front()->matrix.rows()) {
        const Matrix diff = b->matrix - blocks.front()->matrix;
        report.max_block_asymmetry = std::max(report.max_block_asymmetry, diff.max_abs());
      } else {
        report.failures.push_back("block dimension differs across M within a multiplet");
      }
    }
  }
  if (report.max_probability_asymmetry > tolerance)
    report.failures.push_back("rotational-invariance probability asymmetry " +
                              std::to_string(report.max_probability_asymmetry));
  if (report.max_block_asymmetry > tolerance)
    report.failures.push_back("rotational-invariance block asymmetry " +
                              std::to_string(report.max_block_asymmetry));
  if (report.max_bound_violation > tolerance)
    report.failures.push_back("probability bound violation " +
                              std::to_string(report.max_bound_violation));
  report.pass = report.failures.empty();
  return report;
}

}  // namespace spinext
