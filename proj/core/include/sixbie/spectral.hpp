#pragma once

// Problem constants of the sixth-order operator
//   A0 Δ³u + A1 λ² Δ²u + A2 λ⁴ Δu + λ⁶ u = 0,
// the roots of its characteristic cubic ν³ − A2 ν² + A1 ν − A0 = 0 and the
// admissible sector of the spectral parameter λ.

#include <array>
#include <string>

#include "sixbie/types.hpp"

namespace sixbie {

struct Coefficients {
  cplx a0{};
  cplx a1{};
  cplx a2{};

  /// Vieta: a2 = Σν, a1 = Σ_{k<s} ν_k ν_s, a0 = ν1 ν2 ν3.
  static Coefficients from_roots(const std::array<cplx, 3>& nu);
};

struct CharacteristicRoots {
  std::array<cplx, 3> nu{};
  /// d_k = ∏_{s≠k} (ν_k − ν_s)
  std::array<cplx, 3> denoms{};
  /// √(−ν_k) on the decaying branch
  std::array<cplx, 3> sqrt_neg_nu{};

  /// Builds the derived data for an arbitrary root triple without checking
  /// the root-sign condition. Used for synthetic kernels in tests.
  static CharacteristicRoots from_roots(const std::array<cplx, 3>& nu);
};

struct Sector {
  real radius = 1.0;             // R
  real delta = pi / 16.0;        // δ, must lie in (0, π/4)
};

struct SpectralParameter {
  cplx lambda{};
  Sector sector{};
};

struct CubicTolerances {
  real zero = 1e-10;  // |Re ν1| ≤ zero·|ν1|
  real sep = 1e-8;    // min |ν_k − ν_s| ≥ sep·max |ν_k|
};

/// Roots of ν³ − a2 ν² + a1 ν − a0, labelled so that ν1 has the smallest
/// |Re| (ties: larger Im). Throws NonDistinctRoots or SectorConditionViolated.
CharacteristicRoots solve_characteristic_cubic(const Coefficients& coeffs,
                                               CubicTolerances tol = {});

/// √(−ν) with positive real part (principal branch). Throws ZeroRoot.
cplx sqrt_neg_branch(cplx nu);

/// |λ| > R and −π/4 + δ ≤ arg λ < π/4.
bool in_sector(const SpectralParameter& p);

/// Human-readable reason for non-membership, empty when in the sector.
std::string sector_violation(const SpectralParameter& p);

/// κ_k r with κ_k = λ/√(−ν_k); throws SectorConditionViolated when the
/// result does not have a positive real part.
cplx scaled_argument(const SpectralParameter& p, const CharacteristicRoots& roots, int k, real r);

}  // namespace sixbie
