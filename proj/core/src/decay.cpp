#include <fmt/format.h>

#include <algorithm>
#include <limits>

#include "sixbie/error.hpp"
#include "sixbie/kernels.hpp"

namespace sixbie {

namespace {

struct Sample {
  real u, y;
};

// |∂x_k Δᵐ P| maximised over k and, for P2, over source-normal orientations.
real lhs(KernelId id, int m, const KernelContext& ctx, real r) {
  const Vec2 dx{r, 0.0};
  auto mag = [](const CVec2& g) { return std::max(std::abs(g.x), std::abs(g.y)); };
  if (id != KernelId::P2) return mag(eval_kernel_gradient_laplacian_power(id, m, ctx, dx));
  real best = 0.0;
  for (real th : {0.0, pi / 4.0, pi / 2.0, 3.0 * pi / 4.0})
    best = std::max(best, mag(eval_kernel_gradient_laplacian_power(id, m, ctx, dx, Vec2{std::cos(th), std::sin(th)})));
  return best;
}

// Upper convex hull of points sorted by u.
std::vector<Sample> upper_hull(std::vector<Sample> pts) {
  std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return a.u < b.u || (a.u == b.u && a.y > b.y); });
  std::vector<Sample> h;
  for (const Sample& p : pts) {
    if (!h.empty() && h.back().u == p.u) continue;
    while (h.size() >= 2) {
      const Sample& a = h[h.size() - 2];
      const Sample& b = h.back();
      // drop b when it lies on or below the chord a→p
      if ((b.y - a.y) * (p.u - a.u) <= (p.y - a.y) * (b.u - a.u)) h.pop_back();
      else break;
    }
    h.push_back(p);
  }
  return h;
}

}  // namespace

DecayFit verify_decay_bound(KernelId id, int m, const std::vector<KernelContext>& family,
                            const std::vector<real>& r_grid) {
  if (family.empty() || r_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "decay fit needs contexts and ≥ 2 radii");
  if (m < 0 || m > 2) throw Error(ErrorCode::InvalidArgument, "decay fit is defined for m in 0..2");
  std::vector<Sample> pts;
  real eps_true = std::numeric_limits<real>::infinity();
  for (const KernelContext& ctx : family) {
    const real lam = std::abs(ctx.lambda.lambda);
    for (const cplx& k : ctx.kappa) eps_true = std::min(eps_true, k.real() / lam);
    for (real r : r_grid) {
      if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "radii must be positive");
      const real v = lhs(id, m, ctx, r);
      if (!(v > 0.0) || !std::isfinite(v)) continue;  // underflow far out
      pts.push_back({lam * r, std::log(v) + (4.0 - 2.0 * m) * std::log(lam) + std::log(r)});
    }
  }
  DecayFit fit;
  fit.eps_min = 0.5 * eps_true;
  const std::vector<Sample> hull = upper_hull(pts);
  if (hull.size() < 2) throw Error(ErrorCode::BoundViolated, "decay fit has fewer than two distinct abscissae");
  const Sample& a = hull[hull.size() - 2];
  const Sample& b = hull.back();
  fit.eps = -(b.y - a.y) / (b.u - a.u);
  real lnc = -std::numeric_limits<real>::infinity();
  for (const Sample& p : pts) lnc = std::max(lnc, p.y + fit.eps * p.u);
  fit.c = std::exp(lnc);
  fit.margin = std::numeric_limits<real>::infinity();
  for (const Sample& p : pts) fit.margin = std::min(fit.margin, lnc - (p.y + fit.eps * p.u));
  if (!(fit.eps > fit.eps_min))
    throw Error(ErrorCode::BoundViolated,
                fmt::format("{} m={}: fitted eps {:.4g} below floor {:.4g}", to_string(id), m, fit.eps, fit.eps_min));
  return fit;
}

DecayFit verify_decay_bound(KernelId id, int m, const Coefficients& coeffs,
                            const std::vector<SpectralParameter>& family, const std::vector<real>& r_grid) {
  std::vector<KernelContext> ctxs;
  ctxs.reserve(family.size());
  for (const SpectralParameter& p : family) ctxs.push_back(KernelContext::make(coeffs, p));
  return verify_decay_bound(id, m, ctxs, r_grid);
}

}  // namespace sixbie
