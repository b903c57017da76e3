#include "sixbie/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <limits>
#include <fmt/format.h>
#include <string>

#include "sixbie/error.hpp"

namespace sixbie {

Coefficients Coefficients::from_roots(const std::array<cplx, 3>& nu) {
  return {nu[0] * nu[1] * nu[2], nu[0] * nu[1] + nu[0] * nu[2] + nu[1] * nu[2],
          nu[0] + nu[1] + nu[2]};
}

CharacteristicRoots CharacteristicRoots::from_roots(const std::array<cplx, 3>& nu) {
  CharacteristicRoots out;
  out.nu = nu;
  for (int k = 0; k < 3; ++k) {
    cplx d{1.0, 0.0};
    for (int s = 0; s < 3; ++s)
      if (s != k) d *= nu[k] - nu[s];
    out.denoms[k] = d;
    out.sqrt_neg_nu[k] = sqrt_neg_branch(nu[k]);
  }
  return out;
}

namespace {

cplx cubic(const Coefficients& c, cplx v) { return ((v - c.a2) * v + c.a1) * v - c.a0; }
cplx cubic_prime(const Coefficients& c, cplx v) { return (3.0 * v - 2.0 * c.a2) * v + c.a1; }

}  // namespace

CharacteristicRoots solve_characteristic_cubic(const Coefficients& coeffs, CubicTolerances tol) {
  if (coeffs.a0 == cplx{}) throw Error(ErrorCode::ZeroRoot, "a0 = 0 gives a zero characteristic root");

  // Companion matrix of the monic cubic ν³ + c2 ν² + c1 ν + c0.
  Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  comp(0, 2) = coeffs.a0;
  comp(1, 2) = -coeffs.a1;
  comp(2, 2) = coeffs.a2;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(comp, false);
  std::array<cplx, 3> nu{es.eigenvalues()(0), es.eigenvalues()(1), es.eigenvalues()(2)};

  for (auto& v : nu) {
    for (int it = 0; it < 2; ++it) {
      const cplx dp = cubic_prime(coeffs, v);
      if (std::abs(dp) == 0.0) break;
      v -= cubic(coeffs, v) / dp;
    }
  }

  // A repeated root spreads to O(eps^{1/m}) under any eigensolver, which can
  // exceed tol.sep; the discriminant from the coefficients catches it.
  {
    const cplx b = -coeffs.a2, c = coeffs.a1, d = -coeffs.a0;
    const cplx terms[5] = {18.0 * b * c * d, -4.0 * b * b * b * d, b * b * c * c, -4.0 * c * c * c, -27.0 * d * d};
    cplx disc = 0.0;
    real mag = 0.0;
    for (const cplx& t : terms) {
      disc += t;
      mag += std::abs(t);
    }
    if (std::abs(disc) <= 64.0 * std::numeric_limits<real>::epsilon() * mag)
      throw Error(ErrorCode::NonDistinctRoots, "discriminant vanishes to roundoff: repeated root");
  }

  real scale = 0.0;
  for (const auto& v : nu) scale = std::max(scale, std::abs(v));
  for (int k = 0; k < 3; ++k)
    for (int s = k + 1; s < 3; ++s)
      if (std::abs(nu[k] - nu[s]) < tol.sep * scale)
        throw Error(ErrorCode::NonDistinctRoots,
                    fmt::format("roots {} and {} are closer than {:.1e} relative", k, s, tol.sep));

  std::sort(nu.begin(), nu.end(), [](cplx a, cplx b) {
    const real ra = std::abs(a.real()), rb = std::abs(b.real());
    if (ra != rb) return ra < rb;
    return a.imag() > b.imag();
  });

  if (std::abs(nu[0].real()) > tol.zero * std::abs(nu[0]))
    throw Error(ErrorCode::SectorConditionViolated, "no root with vanishing real part");
  for (int k = 1; k < 3; ++k) {
    if (nu[k].real() >= -tol.zero * std::abs(nu[k]))
      throw Error(ErrorCode::SectorConditionViolated,
                  fmt::format("root {} has Re = {:.3e}, expected negative", k + 1, nu[k].real()));
  }
  // The zero-real-part root is reported exactly on the imaginary axis.
  nu[0] = cplx{0.0, nu[0].imag()};
  return CharacteristicRoots::from_roots(nu);
}

cplx sqrt_neg_branch(cplx nu) {
  if (nu == cplx{}) throw Error(ErrorCode::ZeroRoot, "root is zero");
  return std::sqrt(-nu);
}

std::string sector_violation(const SpectralParameter& p) {
  const real mod = std::abs(p.lambda);
  const real arg = std::arg(p.lambda);
  if (!(p.sector.delta > 0.0 && p.sector.delta < pi / 4.0))
    return fmt::format("delta = {} outside (0, pi/4)", p.sector.delta);
  if (!(mod > p.sector.radius))
    return fmt::format("|lambda| = {} does not exceed R = {}", mod, p.sector.radius);
  if (arg < -pi / 4.0 + p.sector.delta)
    return fmt::format("arg lambda = {} below -pi/4 + delta = {}", arg, -pi / 4.0 + p.sector.delta);
  if (!(arg < pi / 4.0)) return fmt::format("arg lambda = {} not below pi/4", arg);
  return {};
}

bool in_sector(const SpectralParameter& p) { return sector_violation(p).empty(); }

cplx scaled_argument(const SpectralParameter& p, const CharacteristicRoots& roots, int k, real r) {
  if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "r must be positive");
  if (k < 0 || k > 2) throw Error(ErrorCode::InvalidArgument, "root index out of range");
  if (const auto why = sector_violation(p); !why.empty())
    throw Error(ErrorCode::SectorConditionViolated, why);
  const cplx z = p.lambda / roots.sqrt_neg_nu[k] * r;
  if (!(z.real() > 0.0))
    throw Error(ErrorCode::SectorConditionViolated,
                fmt::format("kernel argument for root {} has Re = {:.3e}", k + 1, z.real()));
  return z;
}

}  // namespace sixbie
