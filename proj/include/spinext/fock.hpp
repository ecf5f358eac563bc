#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

#include "spinext/rational.hpp"
#include "spinext/tolerances.hpp"

namespace spinext {

enum class Spin : int { up = 0, down = 1 };

/// One spin-orbital (mode, spin). Spin-orbitals linearize as 2*mode + spin,
/// which fixes the fermionic sign convention everywhere in the library.
struct SpinOrbital {
  int mode = 0;
  Spin spin = Spin::up;

  int linear_index() const { return 2 * mode + static_cast<int>(spin); }
};

/// Occupation-number basis state over 2M spin-orbitals, bit b set iff the
/// spin-orbital with linear index b is occupied.
struct FockBasisState {
  std::uint64_t bits = 0;

  bool occupied(int linear_index) const { return (bits >> linear_index) & 1ULL; }
  int particle_count() const { return std::popcount(bits); }

  /// Twice the total spin projection, n_up - n_down.
  int spin_projection_x2() const {
    const std::uint64_t up_mask = 0x5555555555555555ULL;
    const int n_up = std::popcount(bits & up_mask);
    return 2 * n_up - particle_count();
  }

  int mode_occupation(int mode) const {
    return static_cast<int>((bits >> (2 * mode)) & 1ULL) +
           static_cast<int>((bits >> (2 * mode + 1)) & 1ULL);
  }

  friend auto operator<=>(const FockBasisState&, const FockBasisState&) = default;
};

/// Sparse state vector over the occupation-number basis of 2M spin-orbitals.
/// The ordered map keeps iteration (and therefore all reductions) deterministic.
class FockAmplitudeState {
 public:
  using AmplitudeMap = std::map<FockBasisState, Complex>;

  explicit FockAmplitudeState(int modes) : modes_(modes) {
    if (modes < 1 || modes > 32)
      throw std::invalid_argument("FockAmplitudeState: mode count must be in [1, 32]");
  }

  static FockAmplitudeState vacuum(int modes) {
    FockAmplitudeState s(modes);
    s.amps_[FockBasisState{0}] = Complex(1.0, 0.0);
    return s;
  }

  int modes() const { return modes_; }
  const AmplitudeMap& amplitudes() const& { return amps_; }
  // Iterating the amplitudes of a temporary is safe: the map is moved out.
  AmplitudeMap amplitudes() && { return std::move(amps_); }
  std::size_t term_count() const { return amps_.size(); }

  Complex amplitude(FockBasisState b) const {
    auto it = amps_.find(b);
    return it == amps_.end() ? Complex(0.0, 0.0) : it->second;
  }

  void add(FockBasisState b, Complex a) {
    auto [it, inserted] = amps_.try_emplace(b, a);
    if (!inserted) it->second += a;
  }

  void scale(Complex s) {
    for (auto& [b, a] : amps_) a *= s;
  }

  void prune(double threshold = tol::prune) {
    for (auto it = amps_.begin(); it != amps_.end();) {
      if (std::abs(it->second) < threshold)
        it = amps_.erase(it);
      else
        ++it;
    }
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [b, a] : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  friend Complex inner_product(const FockAmplitudeState& bra, const FockAmplitudeState& ket) {
    // <bra|ket>; iterate over the smaller map.
    const auto& small = bra.amps_.size() <= ket.amps_.size() ? bra.amps_ : ket.amps_;
    const bool small_is_bra = &small == &bra.amps_;
    Complex s = 0.0;
    for (const auto& [b, a] : small) {
      const auto& other = small_is_bra ? ket.amps_ : bra.amps_;
      auto it = other.find(b);
      if (it == other.end()) continue;
      s += small_is_bra ? std::conj(a) * it->second : std::conj(it->second) * a;
    }
    return s;
  }

 private:
  int modes_;
  AmplitudeMap amps_;
};

namespace detail {

inline int occupied_below(std::uint64_t bits, int linear_index) {
  const std::uint64_t mask = (1ULL << linear_index) - 1ULL;
  return std::popcount(bits & mask);
}

inline void check_orbital(const FockAmplitudeState& state, SpinOrbital orb) {
  if (orb.mode < 0 || orb.mode >= state.modes())
    throw std::out_of_range("spin-orbital mode index out of range");
}

}  // namespace detail

/// coeff * d^dag_orb |state>, with the fermionic sign (-1)^(occupied below).
/// Components where the spin-orbital is already occupied vanish.
inline FockAmplitudeState apply_creation(const FockAmplitudeState& state, SpinOrbital orb,
                                         Complex coeff = Complex(1.0, 0.0)) {
  detail::check_orbital(state, orb);
  const int idx = orb.linear_index();
  FockAmplitudeState out(state.modes());
  for (const auto& [b, a] : state.amplitudes()) {
    if (b.occupied(idx)) continue;
    const double sign = (detail::occupied_below(b.bits, idx) & 1) ? -1.0 : 1.0;
    out.add(FockBasisState{b.bits | (1ULL << idx)}, coeff * sign * a);
  }
  return out;
}

/// coeff * d_orb |state>, with the same sign convention.
inline FockAmplitudeState apply_annihilation(const FockAmplitudeState& state, SpinOrbital orb,
                                             Complex coeff = Complex(1.0, 0.0)) {
  detail::check_orbital(state, orb);
  const int idx = orb.linear_index();
  FockAmplitudeState out(state.modes());
  for (const auto& [b, a] : state.amplitudes()) {
    if (!b.occupied(idx)) continue;
    const double sign = (detail::occupied_below(b.bits, idx) & 1) ? -1.0 : 1.0;
    out.add(FockBasisState{b.bits & ~(1ULL << idx)}, coeff * sign * a);
  }
  return out;
}

}  // namespace spinext
