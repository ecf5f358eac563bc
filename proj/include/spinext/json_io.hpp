#pragma once

#include <string>

#include <json.hpp>

#include "spinext/census.hpp"
#include "spinext/entanglement.hpp"
#include "spinext/nbrdm.hpp"
#include "spinext/rdo.hpp"
#include "spinext/sco.hpp"

namespace spinext {

// JSON conventions: complex numbers as [re, im] pairs, matrices row-major,
// half-integer quantum numbers as doubled integers under "2S" / "2M" keys.
// ordered_json keeps field order fixed so equal inputs give equal bytes.

using Json = nlohmann::ordered_json;

inline Json to_json(const Complex& c) { return Json::array({c.real(), c.imag()}); }

inline Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const BlockKey& key) {
  Json j;
  j["Ne"] = key.n_e;
  j["2S"] = key.s2;
  j["2M"] = key.m2;
  j["occ"] = key.occ;
  return j;
}

inline Json to_json(const RdoBlockSet& set, double keep_threshold = 1e-14) {
  Json j;
  j["modes"] = set.modes;
  j["total_trace"] = set.total_trace;
  Json blocks = Json::array();
  for (const auto& block : set.blocks) {
    if (block.matrix.max_abs() < keep_threshold) continue;
    Json b;
    b["key"] = to_json(block.key);
    b["probability"] = block.probability;
    b["basis_labels"] = block.basis_labels;
    b["matrix"] = to_json(block.matrix);
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  j["residual_report"] = {{"cross_sector", set.residual.cross_sector},
                          {"cross_occupation", set.residual.cross_occupation}};
  return j;
}

inline Json to_json(const SpinDensityMatrix& gamma) {
  Json j;
  j["n"] = gamma.n;
  j["modes"] = gamma.modes;
  j["normalized"] = gamma.normalized;
  j["raw_trace"] = gamma.raw_trace;
  j["matrix"] = to_json(gamma.matrix);
  return j;
}

inline Json to_json(const SpinBlockDecomposition& d) {
  Json j;
  Json blocks = Json::array();
  for (const auto& [key, m] : d.blocks) {
    Json b;
    b["2S"] = key.s2;
    b["2M"] = key.m2;
    b["matrix"] = to_json(m);
    blocks.push_back(std::move(b));
  }
  j["blocks"] = std::move(blocks);
  j["off_block_residual"] = d.off_block_residual;
  j["structure_ok"] = d.structure_ok;
  return j;
}

inline Json to_json(const Census& c) {
  Json j;
  j["n_modes"] = c.n_modes;
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    Json row;
    row["Ne"] = r.n_e;
    row["occ_class"] = r.occ_class;
    row["2S"] = r.s2;
    row["d_S"] = r.d;
    row["w"] = r.w;
    row["z"] = r.z;
    row["m_count"] = r.m_count;
    row["example"] = census_example_label(r);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["A"] = c.total_rdo_subspaces;
  j["B"] = c.total_spin_subspaces;
  return j;
}

inline const char* to_string(InequalityStatus s) {
  switch (s) {
    case InequalityStatus::satisfied:
      return "satisfied";
    case InequalityStatus::violated:
      return "violated";
    case InequalityStatus::marginal:
      return "marginal";
  }
  return "?";
}

inline const char* to_string(SqueezingVerdict v) {
  switch (v) {
    case SqueezingVerdict::separable_compatible:
      return "no violation";
    case SqueezingVerdict::entanglement_detected:
      return "entanglement detected";
    case SqueezingVerdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

inline Json to_json(const SqueezingReport& r) {
  Json j;
  Json m;
  m["mean"] = r.moments.mean;
  m["square"] = r.moments.square;
  m["variance"] = r.moments.variance;
  m["S_total_sq"] = r.moments.s_total_sq;
  j["moments"] = std::move(m);
  Json ineqs = Json::array();
  for (const auto& q : r.inequalities) {
    Json e;
    e["id"] = q.id;
    e["gamma_axis"] = std::string(1, q.gamma_axis);
    e["lhs"] = q.lhs;
    e["rhs"] = q.rhs;
    e["margin"] = q.margin;
    e["status"] = to_string(q.status);
    ineqs.push_back(std::move(e));
  }
  j["inequalities"] = std::move(ineqs);
  j["verdict"] = to_string(r.verdict);
  return j;
}

inline Json to_json(const SeparabilityBound& b) {
  Json j;
  j["p"] = b.p;
  j["split_positions"] = b.split_positions;
  j["fully_separable"] = b.fully_separable;
  j["gme_excluded"] = b.gme_excluded;
  j["partition"] = b.partition;
  return j;
}

inline Json to_json(const ProjectorDecomposition& d) {
  Json j;
  j["applicable"] = d.applicable;
  j["imag_residual"] = d.imag_residual;
  if (d.applicable) {
    Json coeffs;
    for (std::size_t i = 0; i < d.keys.size(); ++i) coeffs[d.keys[i]] = d.coefficients[i];
    j["coefficients"] = std::move(coeffs);
    j["coefficient_sum"] = d.coefficient_sum;
    j["residual"] = d.residual;
  }
  return j;
}

template <typename Scalar>
Json to_json(const ShellExpansion<Scalar>& e) {
  Json j;
  j["raw_summands"] = e.raw_summands;
  j["pauli_vanishing"] = e.pauli_vanishing;
  Json terms = Json::array();
  for (const auto& t : e.terms) {
    Json term;
    term["form"] = to_string(t);
    term["configuration_amplitude"] = to_json(scalar_to_complex(t.configuration_amplitude()));
    term["ket_coefficient"] = to_json(t.ket_coefficient());
    terms.push_back(std::move(term));
  }
  j["terms"] = std::move(terms);
  return j;
}

}  // namespace spinext
