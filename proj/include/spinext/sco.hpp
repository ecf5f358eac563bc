#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spinext/closed_shell.hpp"
#include "spinext/errors.hpp"
#include "spinext/fock.hpp"
#include "spinext/rational.hpp"
#include "spinext/unitary.hpp"

namespace spinext {

// Symbolic algebra of singlet creation operators (SCOs). S^dag_{j,k} is
// symmetric in its indices and SCOs commute, so a product is canonicalized
// as a sorted list of sorted pairs. The algorithms are generic over the
// coefficient scalar: exact Gaussian rationals where the inputs permit,
// complex doubles otherwise.

using ModePair = std::pair<int, int>;

template <typename Scalar>
struct ScoTerm {
  std::vector<ModePair> pairs;
  Scalar coeff = scalar_one<Scalar>();
};

/// Fully contracted form: disjoint localized modes and delocalized pairs,
/// or Zero. `coeff` multiplies the plain operator product over the vacuum.
template <typename Scalar>
struct NormalForm {
  bool zero = true;
  std::vector<int> localized;
  std::vector<ModePair> delocalized;
  Scalar coeff = scalar_one<Scalar>();

  static NormalForm zero_form() { return NormalForm{}; }

  int delocalized_count() const { return static_cast<int>(delocalized.size()); }

  /// Coefficient over normalized singlet-product states (sqrt2 * S^dag per
  /// delocalized singlet), i.e. coeff / 2^(q/2). Irrational for odd q, so
  /// only available in floating point.
  Complex ket_coefficient() const {
    return scalar_to_complex(coeff) *
           std::pow(2.0, -0.5 * static_cast<double>(delocalized.size()));
  }

  /// Scaled coefficient coeff / 2^q: one factor 1/2 per delocalized singlet
  /// (1/sqrt2 from state normalization, 1/sqrt2 from the weight of each
  /// up/down component). This is the convention used in expansion summaries
  /// and stays exact in rational arithmetic.
  Scalar configuration_amplitude() const {
    Scalar c = coeff;
    for (std::size_t q = 0; q < delocalized.size(); ++q) c = scalar_half(c);
    return c;
  }

  ScoTerm<Scalar> as_term() const {
    ScoTerm<Scalar> t;
    t.coeff = coeff;
    for (int m : localized) t.pairs.push_back({m, m});
    for (const auto& p : delocalized) t.pairs.push_back(p);
    std::sort(t.pairs.begin(), t.pairs.end());
    return t;
  }

  friend bool operator==(const NormalForm& a, const NormalForm& b) {
    if (a.zero != b.zero) return false;
    if (a.zero) return true;
    return a.localized == b.localized && a.delocalized == b.delocalized && a.coeff == b.coeff;
  }
};

/// Sorts each pair and the pair list; both identities are sign-free.
template <typename Scalar>
ScoTerm<Scalar> canonicalize(ScoTerm<Scalar> term) {
  for (auto& [j, k] : term.pairs)
    if (j > k) std::swap(j, k);
  std::sort(term.pairs.begin(), term.pairs.end());
  return term;
}

template <typename Scalar>
struct NormalizeOutcome {
  NormalForm<Scalar> form;
  int rewrite_count = 0;  // applications of the contraction identity
};

/// Contracts a product of SCOs: it vanishes iff some mode index occurs three
/// or more times; otherwise repeated application of
///   S^dag_{j,a} S^dag_{j,b} = -1/2 S^dag_{j,j} S^dag_{a,b}
/// (smallest shared index first) yields disjoint factors, with a factor -1/2
/// per application. The index multiset is invariant under the rewrite, so
/// the vanishing test is final.
template <typename Scalar>
NormalizeOutcome<Scalar> normalize_with_count(const ScoTerm<Scalar>& input) {
  ScoTerm<Scalar> term = canonicalize(input);
  std::map<int, int> count;
  for (const auto& [j, k] : term.pairs) {
    ++count[j];
    ++count[k];
  }
  for (const auto& [idx, c] : count)
    if (c >= 3) return {NormalForm<Scalar>::zero_form(), 0};

  std::vector<ModePair> pairs = term.pairs;
  Scalar coeff = term.coeff;
  int rewrites = 0;
  for (;;) {
    // Smallest index shared by two distinct pairs; full scan keeps the
    // rewrite order deterministic.
    int shared = -1;
    std::size_t first = 0, second = 0;
    for (std::size_t a = 0; a < pairs.size(); ++a) {
      for (std::size_t b = a + 1; b < pairs.size(); ++b) {
        // Pairs are canonicalized, so first <= second; when both indices are
        // shared this picks the smaller.
        int hit = -1;
        if (pairs[a].first == pairs[b].first || pairs[a].first == pairs[b].second)
          hit = pairs[a].first;
        else if (pairs[a].second == pairs[b].first || pairs[a].second == pairs[b].second)
          hit = pairs[a].second;
        else
          continue;
        if (shared < 0 || hit < shared) {
          shared = hit;
          first = a;
          second = b;
        }
      }
    }
    if (shared < 0) break;
    const int other_a = pairs[first].first == shared ? pairs[first].second : pairs[first].first;
    const int other_b = pairs[second].first == shared ? pairs[second].second : pairs[second].first;
    pairs.erase(pairs.begin() + static_cast<std::ptrdiff_t>(second));
    pairs.erase(pairs.begin() + static_cast<std::ptrdiff_t>(first));
    pairs.push_back({shared, shared});
    pairs.push_back({std::min(other_a, other_b), std::max(other_a, other_b)});
    std::sort(pairs.begin(), pairs.end());
    coeff = scalar_minus_half(coeff);
    ++rewrites;
  }

  NormalForm<Scalar> nf;
  nf.zero = false;
  nf.coeff = coeff;
  for (const auto& [j, k] : pairs) {
    if (j == k)
      nf.localized.push_back(j);
    else
      nf.delocalized.push_back({j, k});
  }
  std::sort(nf.localized.begin(), nf.localized.end());
  std::sort(nf.delocalized.begin(), nf.delocalized.end());
  return {std::move(nf), rewrites};
}

template <typename Scalar>
NormalForm<Scalar> normalize(const ScoTerm<Scalar>& term) {
  return normalize_with_count(term).form;
}

/// Numeric evaluation: applies each S^dag_{j,k} to the vacuum via the Fock
/// engine. The result is generally unnormalized.
template <typename Scalar>
FockAmplitudeState expand_to_fock(const ScoTerm<Scalar>& term, int modes) {
  for (const auto& [j, k] : term.pairs)
    if (j < 0 || j >= modes || k < 0 || k >= modes)
      throw std::out_of_range("expand_to_fock: pair index out of range");
  FockAmplitudeState state = FockAmplitudeState::vacuum(modes);
  state.scale(scalar_to_complex(term.coeff));
  for (auto it = term.pairs.rbegin(); it != term.pairs.rend(); ++it)
    state = apply_singlet_creation(state, it->first, it->second);
  return state;
}

template <typename Scalar>
FockAmplitudeState expand_to_fock(const NormalForm<Scalar>& form, int modes) {
  if (form.zero) return FockAmplitudeState(modes);
  return expand_to_fock(form.as_term(), modes);
}

/// Square matrix of coefficients for the shell expansion; exact or floating.
template <typename Scalar>
struct CoeffMatrix {
  int dim = 0;
  std::vector<Scalar> entries;

  const Scalar& at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }
};

inline CoeffMatrix<GaussianRational> exact_identity(int m) {
  CoeffMatrix<GaussianRational> u;
  u.dim = m;
  u.entries.assign(static_cast<std::size_t>(m) * m, GaussianRational(0));
  for (int i = 0; i < m; ++i) u.entries[static_cast<std::size_t>(i) * m + i] = GaussianRational(1);
  return u;
}

/// The four-mode Fourier matrix (1/2) i^(j*k) is Gaussian-rational exactly.
inline CoeffMatrix<GaussianRational> exact_qft4() {
  CoeffMatrix<GaussianRational> u;
  u.dim = 4;
  u.entries.assign(16, GaussianRational(0));
  const Rational half(1, 2);
  const GaussianRational powers[4] = {
      GaussianRational(half, Rational(0)), GaussianRational(Rational(0), half),
      GaussianRational(-half, Rational(0)), GaussianRational(Rational(0), -half)};
  for (int j = 0; j < 4; ++j)
    for (int k = 0; k < 4; ++k) u.entries[static_cast<std::size_t>(j) * 4 + k] = powers[(j * k) % 4];
  return u;
}

inline CoeffMatrix<Complex> coeff_matrix(const ModeUnitary& u) {
  CoeffMatrix<Complex> c;
  c.dim = u.dim();
  c.entries.reserve(static_cast<std::size_t>(c.dim) * c.dim);
  for (int i = 0; i < c.dim; ++i)
    for (int j = 0; j < c.dim; ++j) c.entries.push_back(u(i, j));
  return c;
}

template <typename Scalar>
struct ShellExpansion {
  std::vector<NormalForm<Scalar>> terms;  // merged, sorted by structure
  std::uint64_t raw_summands = 0;
  std::uint64_t pauli_vanishing = 0;  // summands with a repeated spin-orbital
};

/// Expands the P-shell product of sum_{j,k} u_ij u_ik S^dag_{j,k} over the
/// vacuum. Raw summands are counted per index tuple (j_1,k_1,...,j_P,k_P);
/// a summand vanishes by exclusion when two shells create the same up
/// spin-orbital (duplicate j) or the same down spin-orbital (duplicate k).
/// Surviving products are contracted to normal form and merged.
template <typename Scalar>
ShellExpansion<Scalar> shell_expansion(const CoeffMatrix<Scalar>& u, int shells) {
  const int m = u.dim;
  if (shells < 1 || shells > m)
    throw std::invalid_argument("shell_expansion: need 1 <= P <= M");
  const double raw = std::pow(static_cast<double>(m), 2.0 * shells);
  if (raw > 1e8) throw capacity_error("shell_expansion: M^(2P) exceeds the expansion budget");

  ShellExpansion<Scalar> out;
  std::map<std::pair<std::vector<int>, std::vector<ModePair>>, Scalar> merged;

  std::vector<int> idx(static_cast<std::size_t>(2 * shells), 0);
  for (;;) {
    ++out.raw_summands;

    std::uint64_t up_mask = 0, dn_mask = 0;
    bool pauli_dead = false;
    for (int i = 0; i < shells; ++i) {
      const std::uint64_t jb = 1ULL << idx[2 * i];
      const std::uint64_t kb = 1ULL << idx[2 * i + 1];
      if ((up_mask & jb) || (dn_mask & kb)) pauli_dead = true;
      up_mask |= jb;
      dn_mask |= kb;
    }
    if (pauli_dead) ++out.pauli_vanishing;

    ScoTerm<Scalar> term;
    term.coeff = scalar_one<Scalar>();
    bool coeff_zero = false;
    for (int i = 0; i < shells && !coeff_zero; ++i) {
      term.coeff = term.coeff * u.at(i, idx[2 * i]);
      term.coeff = term.coeff * u.at(i, idx[2 * i + 1]);
      if (scalar_is_zero(term.coeff)) coeff_zero = true;
      term.pairs.push_back({idx[2 * i], idx[2 * i + 1]});
    }
    if (!coeff_zero) {
      NormalForm<Scalar> nf = normalize(term);
      if (!nf.zero) {
        auto key = std::make_pair(nf.localized, nf.delocalized);
        auto [it, inserted] = merged.try_emplace(std::move(key), nf.coeff);
        if (!inserted) it->second = it->second + nf.coeff;
      }
    }

    int pos = 2 * shells - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == m) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  for (auto& [key, coeff] : merged) {
    if (scalar_is_zero(coeff)) continue;
    if constexpr (std::is_same_v<Scalar, Complex>) {
      if (std::abs(coeff) < 1e-14) continue;
    }
    NormalForm<Scalar> nf;
    nf.zero = false;
    nf.localized = key.first;
    nf.delocalized = key.second;
    nf.coeff = coeff;
    out.terms.push_back(std::move(nf));
  }
  return out;
}

inline ShellExpansion<Complex> shell_expansion(const ModeUnitary& u, int shells) {
  return shell_expansion(coeff_matrix(u), shells);
}

// ---- canonical text form: "coeff * S(a,b) S(c,d) ..." ----

inline std::string coeff_to_string(const GaussianRational& g) { return g.str(); }
inline std::string coeff_to_string(const Complex& c) {
  std::ostringstream os;
  os.precision(17);
  os << '(' << c.real() << ',' << c.imag() << ')';
  return os.str();
}

template <typename Scalar>
std::string to_string(const NormalForm<Scalar>& nf) {
  if (nf.zero) return "0";
  std::string s = coeff_to_string(nf.coeff) + " *";
  bool any = false;
  for (int m : nf.localized) {
    s += " S(" + std::to_string(m) + "," + std::to_string(m) + ")";
    any = true;
  }
  for (const auto& [j, k] : nf.delocalized) {
    s += " S(" + std::to_string(j) + "," + std::to_string(k) + ")";
    any = true;
  }
  if (!any) s += " 1";
  return s;
}

namespace detail {

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(std::stoll(s));
  return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

inline GaussianRational parse_gaussian_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty coefficient");
  if (s.back() != 'i') return GaussianRational(parse_rational(s));
  const std::string body = s.substr(0, s.size() - 1);
  // Split off a trailing signed rational as the imaginary part.
  std::size_t split = std::string::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    if (body[p] == '+' || body[p] == '-') {
      split = p;
      break;
    }
  }
  if (split == std::string::npos) return GaussianRational(Rational(0), parse_rational(body));
  const Rational re = parse_rational(body.substr(0, split));
  std::string im = body.substr(split);
  if (im == "+") im = "1";
  if (im == "-") im = "-1";
  return GaussianRational(re, parse_rational(im));
}

template <typename Scalar>
Scalar parse_coeff(const std::string& s);

template <>
inline GaussianRational parse_coeff<GaussianRational>(const std::string& s) {
  return parse_gaussian_rational(s);
}

template <>
inline Complex parse_coeff<Complex>(const std::string& s) {
  std::istringstream is(s);
  Complex c;
  is >> c;
  if (is.fail()) throw std::invalid_argument("bad complex coefficient '" + s + "'");
  return c;
}

}  // namespace detail

template <typename Scalar>
NormalForm<Scalar> parse_normal_form(const std::string& text) {
  if (text == "0") return NormalForm<Scalar>::zero_form();
  const auto star = text.find(" *");
  if (star == std::string::npos)
    throw std::invalid_argument("normal form: missing ' *' separator");
  NormalForm<Scalar> nf;
  nf.zero = false;
  nf.coeff = detail::parse_coeff<Scalar>(text.substr(0, star));
  std::istringstream is(text.substr(star + 2));
  std::string tok;
  while (is >> tok) {
    if (tok == "1") continue;
    if (tok.rfind("S(", 0) != 0 || tok.back() != ')')
      throw std::invalid_argument("normal form: bad factor '" + tok + "'");
    const std::string inner = tok.substr(2, tok.size() - 3);
    const auto comma = inner.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("normal form: bad factor '" + tok + "'");
    const int j = std::stoi(inner.substr(0, comma));
    const int k = std::stoi(inner.substr(comma + 1));
    if (j == k)
      nf.localized.push_back(j);
    else
      nf.delocalized.push_back({std::min(j, k), std::max(j, k)});
  }
  std::sort(nf.localized.begin(), nf.localized.end());
  std::sort(nf.delocalized.begin(), nf.delocalized.end());
  return nf;
}

}  // namespace spinext
