#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinext/spin_basis.hpp"

namespace spinext {

// Closed-form combinatorics of the block structure: multiplicities d_S,
// overcomplete-basis sizes w, occupation counts z, and the subspace totals
// A (reduced density operator) and B (reduced spin state). All exact.

/// Multiplicity of the total-spin-(s2/2) multiplet among q coupled spin-1/2's:
/// even q uses q!(2S+1)/((q/2-S)!(S+q/2+1)!), odd q recurses one spin down.
inline std::int64_t d_s(int q, int s2) {
  if (q < 0 || s2 < 0 || s2 > q) throw std::invalid_argument("d_s: need 0 <= 2S <= q");
  if ((q - s2) % 2 != 0) throw std::invalid_argument("d_s: parity of 2S must match q");
  if (q % 2 == 1) return d_s(q - 1, s2 - 1) + (s2 + 1 <= q - 1 ? d_s(q - 1, s2 + 1) : 0);
  std::int64_t num = s2 + 1;
  for (int i = 2; i <= q; ++i) num *= i;  // q! * (2S+1)
  std::int64_t den = 1;
  for (int i = 2; i <= (q - s2) / 2; ++i) den *= i;          // (q/2 - S)!
  for (int i = 2; i <= (q + s2) / 2 + 1; ++i) den *= i;      // (S + q/2 + 1)!
  return num / den;
}

/// Size of the overcomplete pairing basis: perfect matchings of q elements
/// for even q, near-perfect (one unmatched slot placed anywhere) for odd q.
inline std::int64_t overcomplete_basis_size(int q) {
  if (q < 0) throw std::invalid_argument("overcomplete_basis_size: q must be >= 0");
  if (q == 0) return 1;
  std::int64_t fact = 1;
  for (int i = 2; i <= q; ++i) fact *= i;
  const int half = q / 2;  // floor for odd q
  std::int64_t den = 1;
  for (int i = 0; i < half; ++i) den *= 2;
  for (int i = 2; i <= half; ++i) den *= i;
  return fact / den;
}

struct CensusRow {
  int n_e = 0;                   // particle number of the sector
  std::vector<int> occ_class;    // descending occupation multiset, e.g. {2,1,1}
  int s2 = 0;                    // 2S
  std::int64_t d = 0;            // multiplicity d_S
  std::int64_t w = 0;            // overcomplete basis size for q singles
  std::int64_t z = 0;            // number of occupation vectors in the class
  int m_count = 0;               // 2S+1
};

struct Census {
  int n_modes = 0;
  std::vector<CensusRow> rows;
  std::int64_t total_rdo_subspaces = 0;   // A
  std::int64_t total_spin_subspaces = 0;  // B
};

/// Full table of (occupation class, S) subspaces for particle numbers from
/// n to 2n, i.e. the sectors with no unoccupied mode.
inline Census census(int n_modes) {
  if (n_modes < 1 || n_modes > 8) throw std::invalid_argument("census: need 1 <= n <= 8");
  Census c;
  c.n_modes = n_modes;
  for (int n_e = n_modes; n_e <= 2 * n_modes; ++n_e) {
    const int doubles = n_e - n_modes;
    const int q = 2 * n_modes - n_e;  // singly-occupied modes
    const std::int64_t z = binomial(n_modes, doubles);
    std::vector<int> occ_class(n_modes, 1);
    for (int i = 0; i < doubles; ++i) occ_class[i] = 2;
    for (int s2 = q % 2; s2 <= q; s2 += 2) {
      CensusRow row;
      row.n_e = n_e;
      row.occ_class = occ_class;
      row.s2 = s2;
      row.d = d_s(q, s2);
      row.w = overcomplete_basis_size(q);
      row.z = z;
      row.m_count = s2 + 1;
      c.total_rdo_subspaces += z * row.m_count;
      if (n_e == n_modes) c.total_spin_subspaces += row.m_count;
      c.rows.push_back(std::move(row));
    }
  }
  return c;
}

/// Example-state label in the style of the subspace tables: localized
/// singlets on the doubly occupied modes, then pairs, then aligned spins.
inline std::string census_example_label(const CensusRow& row) {
  static const char* names = "ijklmn";
  const int n = static_cast<int>(row.occ_class.size());
  std::string s = "|";
  int pos = 0;
  auto name = [&](int p) {
    return p < 6 ? std::string(1, names[p]) : "m" + std::to_string(p);
  };
  for (; pos < n && row.occ_class[pos] == 2; ++pos) {
    if (pos) s += ",";
    s += "S_" + name(pos) + name(pos);
  }
  const int q = n - pos;
  const int paired = q - row.s2;
  for (int t = 0; t < paired; t += 2) {
    if (pos + t > 0) s += ",";
    s += "S_" + name(pos + t) + name(pos + t + 1);
  }
  for (int t = paired; t < q; ++t) {
    if (pos + t > 0) s += ",";
    s += "Up_" + name(pos + t);
  }
  s += ">";
  return s;
}

}  // namespace spinext
