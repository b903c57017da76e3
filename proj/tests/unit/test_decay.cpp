#include <gtest/gtest.h>

#include "sixbie/error.hpp"
#include "sixbie/kernels.hpp"

using namespace sixbie;

namespace {

const Coefficients kCoeffs{cplx(0, 2), cplx(2, -3), cplx(-3, 1)};
constexpr KernelId kAll[] = {KernelId::P0, KernelId::P1, KernelId::P2, KernelId::P3, KernelId::P3star};

std::vector<real> grid(real a, real b, int n) {
  std::vector<real> r(n);
  for (int i = 0; i < n; ++i) r[i] = a + (b - a) * i / (n - 1);
  return r;
}

// Moduli × arguments spanning R_δ up to its edges.
std::vector<SpectralParameter> family(const std::vector<real>& mods, real delta) {
  const Sector s{1.0, delta};
  std::vector<SpectralParameter> f;
  for (real m : mods)
    for (real a : {-pi / 4 + delta + 1e-12, 0.0, pi / 4 - delta}) f.push_back({std::polar(m, a), s});
  return f;
}

}  // namespace

TEST(Decay, BoundHoldsForEveryKernelAndPower) {
  const std::vector<real> r = grid(0.05, 3.0, 60);
  const auto fam = family({8, 16, 32}, pi / 16);
  for (KernelId id : kAll)
    for (int m = 0; m <= 2; ++m) {
      const DecayFit f = verify_decay_bound(id, m, kCoeffs, fam, r);
      EXPECT_GE(f.margin, 0.0) << to_string(id) << " m=" << m;
      EXPECT_GT(f.eps, f.eps_min) << to_string(id) << " m=" << m;
      EXPECT_GT(f.c, 0.0);
    }
}

TEST(Decay, FiveParametersAcrossSector) {
  const std::vector<real> r = grid(0.05, 3.0, 40);
  const Sector s{};
  const std::vector<SpectralParameter> fam{{std::polar(8.0, -pi / 4 + s.delta + 1e-12), s}, {16.0, s},
                                          {std::polar(20.0, 0.5), s}, {std::polar(32.0, -0.3), s},
                                          {std::polar(64.0, pi / 4 - s.delta), s}};
  for (KernelId id : kAll)
    for (int m = 0; m <= 2; ++m) EXPECT_GE(verify_decay_bound(id, m, kCoeffs, fam, r).margin, 0.0);
}

TEST(Decay, NegativeRealRootsGiveHalfRate) {
  const std::array<cplx, 3> nu{-1.0, -2.0, -4.0};
  const std::vector<real> r = grid(0.05, 3.0, 80);
  std::vector<KernelContext> fam;
  for (real l : {8.0, 16.0, 32.0}) fam.push_back(KernelContext::from_roots(nu, {l, {}}));
  const real u_max = 32.0 * 3.0;
  for (KernelId id : {KernelId::P0, KernelId::P1, KernelId::P3}) {
    const DecayFit f = verify_decay_bound(id, 0, fam, r);
    // The slowest term decays like e^{−|λ| r/2}; the r^{−1/2} prefactor
    // lowers the finite-grid slope by about 1/(2u).
    EXPECT_GE(f.eps, 0.5 - 1.0 / (2.0 * u_max) - 1e-3) << to_string(id);
    EXPECT_LE(f.eps, 0.5 + 1e-3) << to_string(id);
  }
}

TEST(Decay, NarrowerSectorDecaysFaster) {
  const std::vector<real> r = grid(0.05, 3.0, 60);
  for (KernelId id : kAll) {
    const real wide = verify_decay_bound(id, 0, kCoeffs, family({8, 16, 32}, pi / 32), r).eps;
    const real narrow = verify_decay_bound(id, 0, kCoeffs, family({8, 16, 32}, pi / 8), r).eps;
    EXPECT_GE(narrow, wide) << to_string(id);
  }
}

TEST(Decay, PowerScalingAbsorbedByNormalisation) {
  const std::vector<real> r = grid(0.05, 3.0, 60);
  const auto fam = family({8, 16, 32}, pi / 16);
  for (KernelId id : kAll) {
    const DecayFit f0 = verify_decay_bound(id, 0, kCoeffs, fam, r);
    const DecayFit f1 = verify_decay_bound(id, 1, kCoeffs, fam, r);
    EXPECT_GE(f1.margin, 0.0);
    EXPECT_GT(f1.c / f0.c, 1e-2) << to_string(id);
    EXPECT_LT(f1.c / f0.c, 1e2) << to_string(id);
  }
}

// With Im ν1 > 0 the κ1 argument reaches π/2 at the open edge arg λ → π/4,
// where no uniform rate survives; the mirrored root keeps its rate there.
TEST(Decay, UpperSectorEdgeDependsOnImaginaryRootSign) {
  const std::vector<real> r = grid(0.05, 3.0, 60);
  std::vector<SpectralParameter> edge;
  for (real m : {8.0, 16.0, 32.0}) edge.push_back({std::polar(m, pi / 4 - 1e-3), {}});
  const Coefficients upper = Coefficients::from_roots({cplx(0, 1), -1.0, -2.0});
  const Coefficients lower = Coefficients::from_roots({cplx(0, -1), -1.0, -2.0});
  try {
    verify_decay_bound(KernelId::P0, 0, upper, edge, r);
    ADD_FAILURE() << "expected BoundViolated";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundViolated);
  }
  const DecayFit f = verify_decay_bound(KernelId::P0, 0, lower, edge, r);
  EXPECT_GT(f.eps, 0.45);
  EXPECT_GE(f.margin, 0.0);
}

TEST(Decay, Guards) {
  EXPECT_THROW(verify_decay_bound(KernelId::P0, 3, kCoeffs, family({8}, pi / 16), grid(0.1, 1, 5)), Error);
  EXPECT_THROW(verify_decay_bound(KernelId::P0, 0, kCoeffs, family({8}, pi / 16), {0.5}), Error);
}
