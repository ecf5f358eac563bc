#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinext/matrix.hpp"
#include "spinext/nbrdm.hpp"
#include "spinext/rdo.hpp"
#include "spinext/spin_basis.hpp"
#include "spinext/tolerances.hpp"

namespace spinext {

struct CollectiveMoments {
  int n = 0;
  std::array<double, 3> mean = {0.0, 0.0, 0.0};      // <S_x>, <S_y>, <S_z>
  std::array<double, 3> square = {0.0, 0.0, 0.0};    // <S_a^2>
  std::array<double, 3> variance = {0.0, 0.0, 0.0};  // (Delta S_a)^2
  double s_total_sq = 0.0;                           // <S^2>
};

/// First and second moments of the collective spin components, by trace
/// against the normalized extracted state.
inline CollectiveMoments collective_moments(const SpinDensityMatrix& gamma_in) {
  const SpinDensityMatrix gamma = gamma_in.normalized ? gamma_in : gamma_in.normalized_copy();
  CollectiveMoments m;
  m.n = gamma.n;
  const char axes[3] = {'x', 'y', 'z'};
  for (int a = 0; a < 3; ++a) {
    const Matrix op = spin_component_matrix(axes[a], gamma.n);
    m.mean[a] = (gamma.matrix * op).trace().real();
    m.square[a] = (gamma.matrix * (op * op)).trace().real();
    m.variance[a] = m.square[a] - m.mean[a] * m.mean[a];
    m.s_total_sq += m.square[a];
  }
  return m;
}

enum class InequalityStatus { satisfied, violated, marginal };
enum class SqueezingVerdict { separable_compatible, entanglement_detected, inconclusive };

struct InequalityResult {
  int id = 0;          // 1..3
  char gamma_axis = '-';  // distinguished axis for inequalities 2 and 3
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // >= 0 means satisfied (lhs/rhs oriented per inequality)
  InequalityStatus status = InequalityStatus::satisfied;
};

struct SqueezingReport {
  CollectiveMoments moments;
  std::vector<InequalityResult> inequalities;
  SqueezingVerdict verdict = SqueezingVerdict::separable_compatible;
  double tolerance = tol::structural;
};

namespace detail {

inline InequalityStatus classify_margin(double margin, double tolerance) {
  if (margin <= -tolerance) return InequalityStatus::violated;
  if (margin < tolerance) return InequalityStatus::marginal;
  return InequalityStatus::satisfied;
}

inline SqueezingReport report_from_moments(const CollectiveMoments& m, double tolerance) {
  SqueezingReport report;
  report.moments = m;
  report.tolerance = tolerance;
  const double n = static_cast<double>(m.n);
  const char axes[3] = {'x', 'y', 'z'};

  {
    InequalityResult r;
    r.id = 1;
    r.lhs = m.variance[0] + m.variance[1] + m.variance[2];
    r.rhs = n / 2.0;
    r.margin = r.lhs - r.rhs;
    r.status = classify_margin(r.margin, tolerance);
    report.inequalities.push_back(r);
  }
  for (int g = 0; g < 3; ++g) {
    const int a = (g + 1) % 3, b = (g + 2) % 3;
    InequalityResult r;
    r.id = 2;
    r.gamma_axis = axes[g];
    r.lhs = m.square[a] + m.square[b] - n / 2.0;
    r.rhs = (n - 1.0) * m.variance[g];
    r.margin = r.rhs - r.lhs;
    r.status = classify_margin(r.margin, tolerance);
    report.inequalities.push_back(r);
  }
  for (int g = 0; g < 3; ++g) {
    const int a = (g + 1) % 3, b = (g + 2) % 3;
    InequalityResult r;
    r.id = 3;
    r.gamma_axis = axes[g];
    r.lhs = (n - 1.0) * (m.variance[a] + m.variance[b]);
    r.rhs = m.square[g] + 0.25 * n * (n - 2.0);
    r.margin = r.lhs - r.rhs;
    r.status = classify_margin(r.margin, tolerance);
    report.inequalities.push_back(r);
  }

  bool any_violated = false, any_marginal = false;
  for (const auto& r : report.inequalities) {
    any_violated |= r.status == InequalityStatus::violated;
    any_marginal |= r.status == InequalityStatus::marginal;
  }
  report.verdict = any_violated   ? SqueezingVerdict::entanglement_detected
                   : any_marginal ? SqueezingVerdict::inconclusive
                                  : SqueezingVerdict::separable_compatible;
  return report;
}

}  // namespace detail

/// The three collective-spin separability inequalities, each distinguished
/// axis in turn; a fully separable n-spin state satisfies all of them, so
/// any violation certifies entanglement.
inline SqueezingReport evaluate_inequalities(const SpinDensityMatrix& gamma,
                                             double tolerance = tol::structural) {
  return detail::report_from_moments(collective_moments(gamma), tolerance);
}

/// Closed forms for |S, M> eigenstates (distinguished axis z):
/// <Sx^2> = <Sy^2> = [S(S+1) - M^2]/2, <Sz^2> = M^2, (Delta Sz)^2 = 0.
inline SqueezingReport eigenstate_inequalities(int s2, int m2, int n,
                                               double tolerance = tol::structural) {
  if (s2 < 0 || s2 > n || (n - s2) % 2 != 0)
    throw std::invalid_argument("eigenstate_inequalities: invalid 2S for n spins");
  if (std::abs(m2) > s2 || (s2 - m2) % 2 != 0)
    throw std::invalid_argument("eigenstate_inequalities: invalid 2M");
  const double S = 0.5 * s2;
  const double M = 0.5 * m2;
  CollectiveMoments m;
  m.n = n;
  m.mean = {0.0, 0.0, M};
  m.square[0] = m.square[1] = 0.5 * (S * (S + 1.0) - M * M);
  m.square[2] = M * M;
  m.variance = {m.square[0], m.square[1], 0.0};
  m.s_total_sq = S * (S + 1.0);
  return detail::report_from_moments(m, tolerance);
}

struct RotInvReport {
  SqueezingReport report;
  bool first_is_binding = true;       // the sum-of-variances inequality decides
  bool second_always_satisfied = true;  // over the scanned (n, S) range
};

/// Closed forms for the rotationally invariant uniform-M mixture within one
/// S multiplet: every component moment equals S(S+1)/3. The second
/// inequality is additionally scanned over S <= n/2 for all n up to 12 and
/// flagged, rather than assumed, to be satisfied.
inline RotInvReport rotinv_inequalities(int s2, int n, double tolerance = tol::structural) {
  if (s2 < 0 || s2 > n || (n - s2) % 2 != 0)
    throw std::invalid_argument("rotinv_inequalities: invalid 2S for n spins");
  const double S = 0.5 * s2;
  CollectiveMoments m;
  m.n = n;
  const double third = S * (S + 1.0) / 3.0;
  m.square = {third, third, third};
  m.variance = {third, third, third};
  m.s_total_sq = S * (S + 1.0);
  RotInvReport out;
  out.report = detail::report_from_moments(m, tolerance);

  for (int nn = 1; nn <= 12 && out.second_always_satisfied; ++nn)
    for (int ss2 = nn % 2; ss2 <= nn; ss2 += 2) {
      const double SS = 0.5 * ss2;
      const double t = SS * (SS + 1.0) / 3.0;
      const double margin = (nn - 1.0) * t - (2.0 * t - 0.5 * nn);
      if (margin < -tolerance) {
        out.second_always_satisfied = false;
        break;
      }
    }

  // The first inequality implies the third whenever it is violated at all:
  // margin_3 = (2n - 3) / 3 * <S^2> - n(n-2)/4 is weaker for n >= 2.
  out.first_is_binding = true;
  return out;
}

struct SeparabilityBound {
  int p = 0;  // doubly-occupied modes common to every populated configuration
  std::vector<int> split_positions;  // those positions, ascending
  bool fully_separable = false;      // every position split off
  bool gme_excluded = false;  // every populated configuration has a doublon
  std::string partition;
};

/// Separability guaranteed by double occupations: if every populated
/// occupation vector doubly occupies a common set of p modes, the extracted
/// state factorizes there and is at least (p+1)-separable. If every
/// populated vector has at least one doublon, genuine multipartite
/// entanglement is excluded even without a common mode.
inline SeparabilityBound separability_bound(const std::set<std::vector<int>>& populated) {
  SeparabilityBound out;
  if (populated.empty())
    throw std::invalid_argument("separability_bound: no populated configurations");
  const int k = static_cast<int>(populated.begin()->size());

  std::vector<bool> common(static_cast<std::size_t>(k), true);
  out.gme_excluded = true;
  for (const auto& occ : populated) {
    bool has_doublon = false;
    for (int t = 0; t < k; ++t) {
      if (occ[static_cast<std::size_t>(t)] == 2)
        has_doublon = true;
      else
        common[static_cast<std::size_t>(t)] = false;
    }
    if (!has_doublon) out.gme_excluded = false;
  }
  for (int t = 0; t < k; ++t)
    if (common[static_cast<std::size_t>(t)]) out.split_positions.push_back(t);
  out.p = static_cast<int>(out.split_positions.size());
  out.fully_separable = out.p >= k - 1;

  std::vector<std::string> parts;
  for (int t : out.split_positions) parts.push_back("s" + std::to_string(t));
  std::string rest;
  for (int t = 0; t < k; ++t) {
    if (std::find(out.split_positions.begin(), out.split_positions.end(), t) !=
        out.split_positions.end())
      continue;
    rest += (rest.empty() ? "" : ",") + std::to_string(t);
  }
  if (!rest.empty()) parts.push_back("{" + rest + "}");
  for (std::size_t i = 0; i < parts.size(); ++i)
    out.partition += (i ? " | " : "") + parts[i];
  return out;
}

inline SeparabilityBound separability_bound(const RdoBlockSet& set,
                                            double probability_floor = 1e-12) {
  std::set<std::vector<int>> populated;
  for (const auto& block : set.blocks) {
    if (block.key.has_zero_occupation()) continue;
    if (block.probability <= probability_floor) continue;
    populated.insert(block.key.occ);
  }
  return separability_bound(populated);
}

/// Same bound computed from the amplitudes directly, with no density matrix.
inline SeparabilityBound separability_bound(const FockAmplitudeState& state,
                                            const std::vector<int>& modes,
                                            double probability_floor = 1e-12) {
  std::set<std::vector<int>> populated;
  for (const auto& [occ, prob] : occupation_probabilities(state, modes)) {
    if (prob <= probability_floor) continue;
    bool zero = false;
    for (int o : occ) zero = zero || o == 0;
    if (!zero) populated.insert(occ);
  }
  return separability_bound(populated);
}

}  // namespace spinext
