#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "spinext/errors.hpp"
#include "spinext/fock.hpp"
#include "spinext/matrix.hpp"

namespace spinext {

enum class CollectiveKind { N, Sz, S2, Sx, Sy };

// Mode-summed one-body spin/number operators applied to sparse states.
// Spin flips within a mode pick up no fermionic sign (the two sign factors
// from the annihilation/creation pair cancel), but everything is routed
// through the signed primitives anyway.

inline FockAmplitudeState apply_number(const FockAmplitudeState& state) {
  FockAmplitudeState out(state.modes());
  for (const auto& [b, a] : state.amplitudes()) out.add(b, a * static_cast<double>(b.particle_count()));
  return out;
}

inline FockAmplitudeState apply_spin_z(const FockAmplitudeState& state) {
  FockAmplitudeState out(state.modes());
  for (const auto& [b, a] : state.amplitudes())
    out.add(b, a * (0.5 * static_cast<double>(b.spin_projection_x2())));
  return out;
}

/// S_+ = sum_k d^dag_{k,up} d_{k,down}.
inline FockAmplitudeState apply_spin_plus(const FockAmplitudeState& state) {
  FockAmplitudeState out(state.modes());
  for (int k = 0; k < state.modes(); ++k) {
    const FockAmplitudeState t =
        apply_creation(apply_annihilation(state, {k, Spin::down}), {k, Spin::up});
    for (const auto& [b, a] : t.amplitudes()) out.add(b, a);
  }
  return out;
}

inline FockAmplitudeState apply_spin_minus(const FockAmplitudeState& state) {
  FockAmplitudeState out(state.modes());
  for (int k = 0; k < state.modes(); ++k) {
    const FockAmplitudeState t =
        apply_creation(apply_annihilation(state, {k, Spin::up}), {k, Spin::down});
    for (const auto& [b, a] : t.amplitudes()) out.add(b, a);
  }
  return out;
}

inline FockAmplitudeState apply_spin_x(const FockAmplitudeState& state) {
  FockAmplitudeState out = apply_spin_plus(state);
  const FockAmplitudeState minus = apply_spin_minus(state);
  for (const auto& [b, a] : minus.amplitudes()) out.add(b, a);
  out.scale(0.5);
  return out;
}

inline FockAmplitudeState apply_spin_y(const FockAmplitudeState& state) {
  FockAmplitudeState out = apply_spin_plus(state);
  out.scale(Complex(0.0, -0.5));
  FockAmplitudeState minus = apply_spin_minus(state);
  minus.scale(Complex(0.0, 0.5));
  for (const auto& [b, a] : minus.amplitudes()) out.add(b, a);
  return out;
}

/// <S^2> via S_- S_+ + S_z (S_z + 1); works at any sparse size.
inline double s_squared_expectation(const FockAmplitudeState& state) {
  const FockAmplitudeState sp = apply_spin_plus(state);
  const FockAmplitudeState sz = apply_spin_z(state);
  const double val = sp.norm_squared() + sz.norm_squared() +
                     inner_product(state, sz).real();
  return val;
}

/// Dense matrix of a collective operator on the full 4^M Fock space.
/// S^2 is assembled as Sx^2 + Sy^2 + Sz^2 by double application per column.
inline Matrix collective_operator(CollectiveKind kind, int modes) {
  if (modes > 6)
    throw capacity_error("collective_operator: dense path limited to M <= 6");
  if (modes < 1) throw std::invalid_argument("collective_operator: M must be >= 1");
  const std::size_t dim = std::size_t{1} << (2 * modes);
  Matrix op(dim, dim);

  auto column_state = [modes](std::size_t c) {
    FockAmplitudeState s(modes);
    s.add(FockBasisState{static_cast<std::uint64_t>(c)}, Complex(1.0, 0.0));
    return s;
  };

  for (std::size_t c = 0; c < dim; ++c) {
    const FockAmplitudeState e = column_state(c);
    FockAmplitudeState r(modes);
    switch (kind) {
      case CollectiveKind::N:
        r = apply_number(e);
        break;
      case CollectiveKind::Sz:
        r = apply_spin_z(e);
        break;
      case CollectiveKind::Sx:
        r = apply_spin_x(e);
        break;
      case CollectiveKind::Sy:
        r = apply_spin_y(e);
        break;
      case CollectiveKind::S2: {
        r = apply_spin_x(apply_spin_x(e));
        for (const auto& [b, a] : apply_spin_y(apply_spin_y(e)).amplitudes()) r.add(b, a);
        for (const auto& [b, a] : apply_spin_z(apply_spin_z(e)).amplitudes()) r.add(b, a);
        break;
      }
    }
    for (const auto& [b, a] : r.amplitudes()) op(b.bits, c) = a;
  }
  return op;
}

inline CollectiveKind collective_kind_from_name(const std::string& name) {
  if (name == "N") return CollectiveKind::N;
  if (name == "Sz") return CollectiveKind::Sz;
  if (name == "S2") return CollectiveKind::S2;
  if (name == "Sx") return CollectiveKind::Sx;
  if (name == "Sy") return CollectiveKind::Sy;
  throw std::invalid_argument("unknown collective operator '" + name + "'");
}

}  // namespace spinext
