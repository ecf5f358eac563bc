#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "spinext/census.hpp"
#include "spinext/closed_shell.hpp"
#include "spinext/collective.hpp"
#include "spinext/entanglement.hpp"
#include "spinext/nbrdm.hpp"
#include "spinext/rdo.hpp"
#include "spinext/sco.hpp"
#include "spinext/unitary.hpp"

namespace spinext {

// Built-in verification suite: every structural invariant the library
// promises, run over a seeded corpus. The CLI `verify` subcommand returns
// success only if all checks pass.

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct VerificationOptions {
  std::uint64_t base_seed = 1000;
  double tolerance = tol::structural;
  int unitary_seeds = 20;   // rdo / nbrdm corpus size
  int sco_seeds = 200;      // symbolic differential corpus size
};

struct VerificationOutcome {
  std::vector<CheckResult> checks;
  bool all_pass = true;

  void add(const std::string& name, bool pass, const std::string& detail) {
    checks.push_back({name, pass, detail});
    all_pass = all_pass && pass;
  }
};

/// Multiplicity of total spin s2/2 among q spin-1/2's by direct iterative
/// coupling; an independent route to the closed-form counts.
inline std::int64_t coupling_multiplicity(int q, int s2) {
  std::vector<std::int64_t> mult = {1};  // indexed by 2S, starting at q = 0
  for (int step = 0; step < q; ++step) {
    std::vector<std::int64_t> next(static_cast<std::size_t>(step) + 2, 0);
    for (int t2 = step % 2; t2 <= step; t2 += 2) {
      const std::int64_t m = mult[static_cast<std::size_t>(t2)];
      if (m == 0) continue;
      next[static_cast<std::size_t>(t2 + 1)] += m;
      if (t2 >= 1) next[static_cast<std::size_t>(t2 - 1)] += m;
    }
    mult = std::move(next);
  }
  if (s2 < 0 || s2 >= static_cast<int>(mult.size())) return 0;
  return mult[static_cast<std::size_t>(s2)];
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline FockAmplitudeState corpus_state(int m, int p, std::uint64_t seed) {
  return transform_to_extraction_basis(build_closed_shell(p, m), random_unitary(m, seed));
}

inline Matrix pure_density(const SpinVector& v) {
  Matrix rho(v.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) rho(i, j) = v[i] * std::conj(v[j]);
  return rho;
}

inline SpinDensityMatrix spin_state(int n, Matrix m, bool normalized = true) {
  SpinDensityMatrix g;
  g.n = n;
  g.matrix = std::move(m);
  g.raw_trace = g.matrix.trace().real();
  g.normalized = normalized;
  return g;
}

}  // namespace detail

inline VerificationOutcome run_verification(const VerificationOptions& opt = {}) {
  VerificationOutcome out;
  const double tolerance = opt.tolerance;

  // --- state construction and mode transformation ---
  {
    double worst_norm = 0.0, worst_s2 = 0.0, worst_round = 0.0;
    bool conserved = true;
    int idx = 0;
    for (int m = 2; m <= 4; ++m) {
      const Matrix s2op = collective_operator(CollectiveKind::S2, m);
      for (int rep = 0; rep < (m == 2 ? 34 : 33); ++rep, ++idx) {
        const ModeUnitary u = random_unitary(m, opt.base_seed + 100 + idx);
        const int p = (m + 1) / 2;
        const FockAmplitudeState phi = build_closed_shell(p, m);
        const FockAmplitudeState psi = transform_to_extraction_basis(phi, u);
        worst_norm = std::max(worst_norm, std::abs(psi.norm() - 1.0));
        for (const auto& [b, a] : psi.amplitudes())
          conserved = conserved && b.particle_count() == 2 * p && b.spin_projection_x2() == 0;
        // <S^2> against the dense operator.
        Complex acc = 0.0;
        for (const auto& [br, ar] : psi.amplitudes())
          for (const auto& [bc, ac] : psi.amplitudes())
            acc += std::conj(ar) * s2op(br.bits, bc.bits) * ac;
        worst_s2 = std::max(worst_s2, std::abs(acc));
        // Transforming with U and then re-expressing in the original basis
        // must recover the source determinant.
        FockAmplitudeState diff = change_mode_basis(psi, u.adjoint());
        for (const auto& [b, a] : phi.amplitudes()) diff.add(b, -a);
        worst_round = std::max(worst_round, diff.norm());
      }
    }
    out.add("fock/transform-unitarity", worst_norm < tolerance,
            "max norm deviation " + detail::fmt(worst_norm));
    out.add("fock/conservation", conserved, "Ne and 2Mz exact on every stored determinant");
    out.add("fock/singlet-s2", worst_s2 < tolerance, "max <S^2> " + detail::fmt(worst_s2));
    out.add("fock/transform-roundtrip", worst_round < tolerance,
            "max |U-then-Udag - source| " + detail::fmt(worst_round));
  }

  // --- anticommutation: double creation annihilates ---
  {
    bool ok = true;
    for (int m = 2; m <= 3 && ok; ++m) {
      const std::uint64_t dim = 1ULL << (2 * m);
      for (std::uint64_t bits = 0; bits < dim && ok; ++bits) {
        FockAmplitudeState s(m);
        s.add(FockBasisState{bits}, 1.0);
        for (int mode = 0; mode < m && ok; ++mode)
          for (Spin sp : {Spin::up, Spin::down}) {
            const FockAmplitudeState twice =
                apply_creation(apply_creation(s, {mode, sp}), {mode, sp});
            if (twice.norm() != 0.0) ok = false;
          }
      }
    }
    out.add("fock/pauli-exclusion", ok, "d^dag d^dag = 0 on every basis state, M <= 3");
  }

  // --- symbolic contraction vs numeric expansion ---
  {
    double worst = 0.0;
    bool zero_sound = true, confluent = true;
    detail::GaussianRng rng(opt.base_seed + 2000);
    for (int rep = 0; rep < opt.sco_seeds; ++rep) {
      const int m = 2 + static_cast<int>(rng.uniform() * 5.0);  // 2..6
      const int pairs = 1 + static_cast<int>(rng.uniform() * 3.0);
      ScoTerm<Complex> term;
      term.coeff = Complex(rng.normal(), rng.normal());
      for (int p = 0; p < pairs; ++p)
        term.pairs.push_back({static_cast<int>(rng.uniform() * m), static_cast<int>(rng.uniform() * m)});
      const NormalForm<Complex> nf = normalize(term);
      const FockAmplitudeState direct = expand_to_fock(term, m);
      const FockAmplitudeState via_nf = expand_to_fock(nf, m);
      FockAmplitudeState diff = direct;
      for (const auto& [b, a] : via_nf.amplitudes()) diff.add(b, -a);
      worst = std::max(worst, diff.norm());
      if (nf.zero != (direct.norm() < 1e-12)) zero_sound = false;
      // Confluence under pair permutation (reversal suffices as a probe).
      ScoTerm<Complex> rev = term;
      std::reverse(rev.pairs.begin(), rev.pairs.end());
      const NormalForm<Complex> nf2 = normalize(rev);
      if (nf2.zero != nf.zero) confluent = false;
      if (!nf.zero && (nf2.localized != nf.localized || nf2.delocalized != nf.delocalized ||
                       std::abs(nf2.coeff - nf.coeff) > 1e-14))
        confluent = false;
    }
    out.add("sco/differential-oracle", worst < 1e-12, "max route difference " + detail::fmt(worst));
    out.add("sco/zero-soundness", zero_sound, "Zero verdicts match numeric norms");
    out.add("sco/confluence", confluent, "normal form independent of pair order");
  }

  // --- exact coefficient law on the rewrite path ---
  {
    bool ok = true;
    detail::GaussianRng rng(opt.base_seed + 2500);
    for (int rep = 0; rep < 50 && ok; ++rep) {
      ScoTerm<GaussianRational> term;
      term.coeff = GaussianRational(Rational(3, 7), Rational(-2, 5));
      const int pairs = 1 + static_cast<int>(rng.uniform() * 3.0);
      for (int p = 0; p < pairs; ++p)
        term.pairs.push_back(
            {static_cast<int>(rng.uniform() * 5.0), static_cast<int>(rng.uniform() * 5.0)});
      const auto outc = normalize_with_count(term);
      if (outc.form.zero) continue;
      GaussianRational expect = term.coeff;
      for (int r = 0; r < outc.rewrite_count; ++r) expect = scalar_minus_half(expect);
      if (!(expect == outc.form.coeff)) ok = false;
    }
    out.add("sco/coefficient-law", ok, "coefficient ratio is exactly (-1/2)^rewrites");
  }

  // --- shell expansion against the numeric transform ---
  {
    double worst = 0.0;
    for (int rep = 0; rep < 4; ++rep) {
      const int m = 3 + (rep % 2);
      const int p = 2;
      const ModeUnitary u = rep == 0 ? identity_unitary(m)
                            : rep == 1 ? qft_unitary(m)
                                       : random_unitary(m, opt.base_seed + 400 + rep);
      const auto expansion = shell_expansion(u, p);
      FockAmplitudeState sum(m);
      for (const auto& term : expansion.terms)
        for (const auto& [b, a] : expand_to_fock(term, m).amplitudes()) sum.add(b, a);
      const FockAmplitudeState direct = transform_to_extraction_basis(build_closed_shell(p, m), u);
      FockAmplitudeState diff = direct;
      for (const auto& [b, a] : sum.amplitudes()) diff.add(b, -a);
      worst = std::max(worst, diff.norm());
    }
    out.add("sco/shell-expansion-numeric", worst < tolerance,
            "max |symbolic - numeric| " + detail::fmt(worst));
  }

  // --- superselection structure of reduced density operators ---
  {
    double worst_cross = 0.0, worst_asym = 0.0, worst_bound = 0.0, worst_psd = 0.0;
    double worst_contraction = 0.0;
    bool census_contained = true;
    const Census cens3 = census(3);
    for (int seed = 0; seed < opt.unitary_seeds; ++seed) {
      const FockAmplitudeState psi = detail::corpus_state(4, 2, opt.base_seed + seed);
      for (int k = 1; k <= 3; ++k) {
        std::vector<int> kept(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) kept[static_cast<std::size_t>(t)] = t;
        const Matrix rho = partial_trace(psi, kept);
        const RdoBlockSet blocks = block_decompose(rho, kept);
        const SuperselectionReport rep = verify_superselection(blocks, tolerance);
        worst_cross = std::max(worst_cross, rep.cross_sector);
        worst_asym = std::max(worst_asym, std::max(rep.max_probability_asymmetry,
                                                   rep.max_block_asymmetry));
        worst_bound = std::max(worst_bound, rep.max_bound_violation);
        for (const auto& block : blocks.blocks) {
          if (block.matrix.rows() == 0 || block.matrix.max_abs() < 1e-14) continue;
          worst_psd = std::max(worst_psd, -min_eigenvalue(block.matrix));
          if (block.probability > 1e-12 && !block.key.has_zero_occupation() && k == 3) {
            std::vector<int> occ_class = block.key.occ;
            std::sort(occ_class.begin(), occ_class.end(), std::greater<int>());
            bool found = false;
            for (const auto& row : cens3.rows)
              found = found || (row.occ_class == occ_class && row.s2 == block.key.s2 &&
                                row.n_e == block.key.n_e);
            census_contained = census_contained && found;
          }
        }
      }
      const Matrix rho3 = partial_trace(psi, {0, 1, 2});
      const Matrix sub = partial_trace_matrix(rho3, 3, {0, 1});
      const Matrix direct = partial_trace(psi, {0, 1});
      worst_contraction = std::max(worst_contraction, (sub - direct).max_abs());
    }
    out.add("rdo/cross-sector-coherence", worst_cross < tolerance,
            "max coherence " + detail::fmt(worst_cross));
    out.add("rdo/rotational-invariance", worst_asym < tolerance,
            "max probability/block asymmetry across M " + detail::fmt(worst_asym));
    out.add("rdo/probability-bounds", worst_bound < tolerance,
            "max bound violation " + detail::fmt(worst_bound));
    out.add("rdo/block-psd", worst_psd < tolerance,
            "worst negative eigenvalue " + detail::fmt(worst_psd));
    out.add("rdo/contraction-compatibility", worst_contraction < 1e-12,
            "max trace-route difference " + detail::fmt(worst_contraction));
    out.add("rdo/census-containment", census_contained,
            "populated (occ, S) always appears in the closed-form census");
  }

  // --- closed-form census identities ---
  {
    bool ok = census(3).total_rdo_subspaces == 25 && census(3).total_spin_subspaces == 6 &&
              census(4).total_rdo_subspaces == 66 && census(4).total_spin_subspaces == 9 &&
              census(5).total_rdo_subspaces == 168 && census(5).total_spin_subspaces == 12 &&
              census(6).total_rdo_subspaces == 416 && census(6).total_spin_subspaces == 16;
    bool sum_rule = true, coupling = true;
    for (int q = 0; q <= 12; ++q) {
      std::int64_t sum = 0;
      for (int s2 = q % 2; s2 <= q; s2 += 2) {
        sum += d_s(q, s2) * (s2 + 1);
        if (d_s(q, s2) != coupling_multiplicity(q, s2)) coupling = false;
      }
      if (sum != (std::int64_t{1} << q)) sum_rule = false;
    }
    out.add("census/subspace-totals", ok, "A/B = 25/6, 66/9, 168/12, 416/16");
    out.add("census/dimension-sum-rule", sum_rule, "sum d_S (2S+1) = 2^q up to q = 12");
    out.add("census/coupling-oracle", coupling, "d_S equals iterative spin coupling up to q = 12");
  }

  // --- extracted spin states: dual route, symmetry, block structure ---
  {
    double worst_route = 0.0, worst_comm = 0.0, worst_psd = 0.0, worst_offblock = 0.0;
    bool block_counts = true;
    for (int seed = 0; seed < opt.unitary_seeds; ++seed) {
      const FockAmplitudeState psi = detail::corpus_state(4, 2, opt.base_seed + seed);
      for (int n = 2; n <= 4; ++n) {
        std::vector<int> modes(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t) modes[static_cast<std::size_t>(t)] = t;
        const SpinDensityMatrix direct = compute_nbrdm_direct(psi, modes);
        const RdoBlockSet blocks = block_decompose(partial_trace(psi, modes), modes);
        const SpinDensityMatrix mapped = nbrdm_from_rdo(blocks);
        worst_route = std::max(worst_route, (direct.matrix - mapped.matrix).max_abs());
        if (direct.raw_trace > 1e-12) {
          const SpinDensityMatrix norm = direct.normalized_copy();
          for (char axis : {'x', 'y', 'z'}) {
            const Matrix op = spin_component_matrix(axis, n);
            worst_comm = std::max(worst_comm, (norm.matrix * op - op * norm.matrix).max_abs());
          }
          worst_psd = std::max(worst_psd, -min_eigenvalue(norm.matrix));
          const SpinBlockDecomposition dec = block_decompose_spin(norm, tolerance);
          worst_offblock = std::max(worst_offblock, dec.off_block_residual);
          std::int64_t expected_b = census(n).total_spin_subspaces;
          if (static_cast<std::int64_t>(dec.blocks.size()) != expected_b) block_counts = false;
        }
      }
    }
    out.add("nbrdm/dual-route", worst_route < tolerance,
            "max |direct - mapped| " + detail::fmt(worst_route));
    out.add("nbrdm/rotational-invariance", worst_comm < tolerance,
            "max commutator with collective spin " + detail::fmt(worst_comm));
    out.add("nbrdm/psd", worst_psd < tolerance,
            "worst negative eigenvalue " + detail::fmt(worst_psd));
    out.add("nbrdm/spin-block-structure", worst_offblock < tolerance && block_counts,
            "off-block residual " + detail::fmt(worst_offblock) + ", block count = B");
  }

  // --- double occupations force factorization ---
  {
    double worst = 0.0;
    bool bound_ok = true;
    for (int seed = 0; seed < 5; ++seed) {
      Matrix u(4, 4);
      u(0, 0) = 1.0;
      const ModeUnitary v = random_unitary(3, opt.base_seed + 700 + seed);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) u(i + 1, j + 1) = v(i, j);
      const ModeUnitary block_u{std::move(u)};
      const FockAmplitudeState psi =
          transform_to_extraction_basis(build_closed_shell(2, 4), block_u);
      const std::vector<int> modes = {0, 1, 2};
      const SpinDensityMatrix gamma = compute_nbrdm_direct(psi, modes);
      worst = std::max(worst, unpolarized_factor_residual(gamma, 0));
      const SeparabilityBound b =
          separability_bound(block_decompose(partial_trace(psi, modes), modes));
      if (b.p < 1 || !b.gme_excluded) bound_ok = false;
    }
    out.add("nbrdm/doublon-factorization", worst < tolerance,
            "max factorization residual " + detail::fmt(worst));
    out.add("entanglement/separability-bound", bound_ok,
            "planted doublon yields p >= 1 and excludes genuine multipartite entanglement");
  }

  // --- squeezing inequalities: closed forms against numeric evaluation ---
  {
    double worst = 0.0;
    for (int n = 2; n <= 4; ++n) {
      for (int s2 = n % 2; s2 <= n; s2 += 2) {
        for (int m2 = s2; m2 >= -s2; m2 -= 2) {
          const MultipletBasis basis = multiplet_basis(n, s2, m2);
          const SpinDensityMatrix g =
              detail::spin_state(n, detail::pure_density(basis.vectors.front()));
          const SqueezingReport numeric = evaluate_inequalities(g, opt.tolerance);
          const SqueezingReport closed = eigenstate_inequalities(s2, m2, n, opt.tolerance);
          for (std::size_t i = 0; i < numeric.inequalities.size(); ++i)
            worst = std::max(worst, std::abs(numeric.inequalities[i].margin -
                                             closed.inequalities[i].margin));
        }
        // Uniform mixture over M: rotational invariance closed forms.
        const std::size_t dim = std::size_t{1} << n;
        Matrix mix(dim, dim);
        for (int m2 = s2; m2 >= -s2; m2 -= 2)
          mix += detail::pure_density(multiplet_basis(n, s2, m2).vectors.front()) *
                 Complex(1.0 / (s2 + 1.0), 0.0);
        const SqueezingReport numeric =
            evaluate_inequalities(detail::spin_state(n, std::move(mix)), opt.tolerance);
        const SqueezingReport closed = rotinv_inequalities(s2, n, opt.tolerance).report;
        for (std::size_t i = 0; i < numeric.inequalities.size(); ++i)
          worst = std::max(worst,
                           std::abs(numeric.inequalities[i].margin - closed.inequalities[i].margin));
      }
    }
    out.add("entanglement/closed-form-consistency", worst < tolerance,
            "max margin difference " + detail::fmt(worst));
  }

  // --- no false positives on separable product states ---
  {
    bool ok = true;
    detail::GaussianRng rng(opt.base_seed + 900);
    for (int rep = 0; rep < 50; ++rep) {
      const int n = 2 + (rep % 4);
      Matrix rho = Matrix::identity(1);
      for (int t = 0; t < n; ++t) {
        const double theta = rng.uniform() * 3.14159265358979323846;
        const double phi = rng.uniform() * 2.0 * 3.14159265358979323846;
        Matrix q(2, 2);
        const Complex a = std::cos(theta / 2.0);
        const Complex b = std::polar(std::sin(theta / 2.0), phi);
        q(0, 0) = a * std::conj(a);
        q(0, 1) = a * std::conj(b);
        q(1, 0) = b * std::conj(a);
        q(1, 1) = b * std::conj(b);
        rho = kron(rho, q);
      }
      const SqueezingReport rep2 = evaluate_inequalities(detail::spin_state(n, std::move(rho)),
                                                         opt.tolerance);
      for (const auto& q : rep2.inequalities)
        if (q.status == InequalityStatus::violated) ok = false;
    }
    out.add("entanglement/no-false-positives", ok,
            "no violation on 50 random fully separable product states");
  }

  // --- rotationally invariant scan and mixed-singlet values ---
  {
    bool second_ok = true;
    for (int n = 1; n <= 12; ++n)
      for (int s2 = n % 2; s2 <= n; s2 += 2)
        second_ok = second_ok && rotinv_inequalities(s2, n, opt.tolerance).second_always_satisfied;
    out.add("entanglement/rotinv-second-inequality", second_ok,
            "always satisfied for S <= n/2, n <= 12");

    double worst = 0.0;
    for (int l = 1; l <= 4; ++l) {
      for (int pairs = 1; pairs <= 2; ++pairs) {
        const int n = 2 * pairs + l;
        if (n > 6) continue;
        PairingPattern pattern;
        for (int t = 0; t < pairs; ++t) pattern.pairs.push_back({2 * t, 2 * t + 1});
        Matrix sing = detail::pure_density(pairing_state(2 * pairs, pattern, 0, 0));
        Matrix rho = kron(sing, Matrix::identity(std::size_t{1} << l) *
                                    Complex(1.0 / static_cast<double>(std::size_t{1} << l), 0.0));
        const CollectiveMoments m =
            collective_moments(detail::spin_state(n, std::move(rho)));
        worst = std::max(worst, std::abs(m.s_total_sq - 0.75 * l));
      }
    }
    out.add("entanglement/singlet-with-mixed-spins", worst < tolerance,
            "<S^2> = 3l/4, max deviation " + detail::fmt(worst));
  }

  return out;
}

}  // namespace spinext
