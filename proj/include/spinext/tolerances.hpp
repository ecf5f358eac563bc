#pragma once

namespace spinext::tol {

// Sparse amplitudes below this are dropped after each shell application.
inline constexpr double prune = 1e-14;

// Structural zeros (forbidden coherences, commutators, route differences).
inline constexpr double structural = 1e-10;

// Hermiticity / trace checks.
inline constexpr double hermitian = 1e-12;

// Unitarity of mode transformations, checked at construction.
inline constexpr double unitary = 1e-12;

}  // namespace spinext::tol
