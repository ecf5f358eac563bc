#pragma once

#include <stdexcept>
#include <vector>

#include "spinext/fock.hpp"
#include "spinext/unitary.hpp"

namespace spinext {

/// Product of P doubly-occupied orbitals over the vacuum, modes 0..P-1.
/// The canonical operator ordering (per mode, up before down, mode P-1
/// applied first) makes the single surviving amplitude exactly +1.
inline FockAmplitudeState build_closed_shell(int shells, int modes) {
  if (shells < 1 || shells > modes)
    throw std::invalid_argument("build_closed_shell: need 1 <= P <= M");
  FockAmplitudeState state = FockAmplitudeState::vacuum(modes);
  for (int i = shells - 1; i >= 0; --i) {
    state = apply_creation(state, {i, Spin::down});
    state = apply_creation(state, {i, Spin::up});
  }
  return state;
}

/// coeff * S^dag_{j,k} |state> with S^dag_{j,k} = (d^dag_{j,up} d^dag_{k,down}
/// - d^dag_{j,down} d^dag_{k,up}) / 2.
inline FockAmplitudeState apply_singlet_creation(const FockAmplitudeState& state, int j, int k,
                                                 Complex coeff = Complex(1.0, 0.0)) {
  FockAmplitudeState out =
      apply_creation(apply_creation(state, {k, Spin::down}), {j, Spin::up}, coeff * 0.5);
  const FockAmplitudeState minus =
      apply_creation(apply_creation(state, {k, Spin::up}), {j, Spin::down}, coeff * 0.5);
  for (const auto& [b, a] : minus.amplitudes()) out.add(b, -a);
  return out;
}

/// General change of mode basis on an arbitrary state: every creation
/// operator of the current basis is expanded as old^dag_i = sum_j V_ij
/// new^dag_j (row = current mode, column = new mode). Exponential in the
/// particle number, fine at desk scale.
inline FockAmplitudeState change_mode_basis(const FockAmplitudeState& state,
                                            const ModeUnitary& v) {
  const int m = state.modes();
  if (v.dim() != m) throw std::invalid_argument("change_mode_basis: dimension mismatch");
  FockAmplitudeState result(m);
  for (const auto& [det, amp] : state.amplitudes()) {
    FockAmplitudeState term = FockAmplitudeState::vacuum(m);
    term.scale(amp);
    // Apply the expansion of each occupied spin-orbital, rightmost first.
    for (int lin = 2 * m - 1; lin >= 0; --lin) {
      if (!det.occupied(lin)) continue;
      const int mode = lin / 2;
      const Spin spin = (lin & 1) ? Spin::down : Spin::up;
      FockAmplitudeState next(m);
      for (int j = 0; j < m; ++j) {
        if (scalar_is_zero(v(mode, j))) continue;
        const FockAmplitudeState piece = apply_creation(term, {j, spin}, v(mode, j));
        for (const auto& [b, a] : piece.amplitudes()) next.add(b, a);
      }
      next.prune();
      term = std::move(next);
    }
    for (const auto& [b, a] : term.amplitudes()) result.add(b, a);
  }
  result.prune();
  return result;
}

/// Re-expands a state of doubly-occupied orbitals in the transformed mode
/// basis: each occupied orbital i becomes sum_{j,k} u_ij u_ik S^dag_{j,k}.
/// Every stored determinant must consist of doubly-occupied modes only.
inline FockAmplitudeState transform_to_extraction_basis(const FockAmplitudeState& state,
                                                        const ModeUnitary& u) {
  const int m = state.modes();
  if (u.dim() != m)
    throw std::invalid_argument("transform_to_extraction_basis: unitary dimension mismatch");

  FockAmplitudeState result(m);
  for (const auto& [det, amp] : state.amplitudes()) {
    std::vector<int> shells;
    for (int mode = 0; mode < m; ++mode) {
      const int occ = det.mode_occupation(mode);
      if (occ == 1)
        throw std::invalid_argument(
            "transform_to_extraction_basis: input must contain only doubly-occupied modes");
      if (occ == 2) shells.push_back(mode);
    }
    FockAmplitudeState term = FockAmplitudeState::vacuum(m);
    term.scale(amp);
    for (int i : shells) {
      FockAmplitudeState next(m);
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const Complex w = u(i, j) * u(i, k);
          if (scalar_is_zero(w)) continue;
          const FockAmplitudeState piece = apply_singlet_creation(term, j, k, w);
          for (const auto& [b, a] : piece.amplitudes()) next.add(b, a);
        }
      next.prune();
      term = std::move(next);
    }
    for (const auto& [b, a] : term.amplitudes()) result.add(b, a);
  }
  result.prune();
  return result;
}

}  // namespace spinext
