#include "sixbie/nystrom.hpp"

#include <fftw3.h>
#include <fmt/format.h>

#include <algorithm>
#include <mutex>

#include "sixbie/bessel.hpp"
#include "sixbie/error.hpp"
#include "sixbie/parallel.hpp"

namespace sixbie {

namespace {

// FFTW planning is not thread-safe; execution with fresh arrays is.
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

constexpr KernelId kRadial[4] = {KernelId::P0, KernelId::P1, KernelId::P3, KernelId::P3star};

// Beyond this decay exponent a source contributes below 1e−17 of the
// near-field entries.
constexpr real kFarCutoff = 40.0;

}  // namespace

real smooth_window(real u, real u1, real u2) {
  const real x = std::clamp((u - u1) / (u2 - u1), 0.0, 1.0);
  auto psi = [](real y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; };
  const real a = psi(x), b = psi(1.0 - x);
  return 1.0 - a / (a + b);
}

JumpTable analytic_jumps(const KernelContext& ctx) {
  JumpTable j{};
  for (int row = 1; row < 3; ++row) {
    const int m = row == 1 ? 0 : 2;
    auto prof = [&](KernelId id) { return RadialProfile(ctx.weights(id, m), ctx.kappa); };
    // ∂/∂n of c ln r jumps by π c; ∂/∂n of ∂²/∂n_y² (C r² ln r) jumps by 4π C.
    j[row][0] = pi * prof(KernelId::P0).log_coefficient();
    j[row][1] = pi * prof(KernelId::P1).log_coefficient();
    j[row][2] = pi * prof(KernelId::P3).log_coefficient() -
                ctx.beta * 4.0 * pi * prof(KernelId::P3star).r2log_coefficient();
  }
  return j;
}

TraceBlock::TraceBlock(const KernelContext& ctx) : ctx_(ctx) {
  for (int mi = 0; mi < 2; ++mi)
    for (int k = 0; k < 4; ++k) prof_[k + 4 * mi] = RadialProfile(ctx.weights(kRadial[k], 2 * mi), ctx.kappa);
}

void TraceBlock::combine(const std::array<RadialDerivs, 8>& d, real r, Vec2 e, Vec2 nx, Vec2 ny, cplx* out) const {
  const cplx beta = ctx_.beta;
  out[0] = d[0].f;
  out[1] = d[1].f;
  out[2] = d[2].f - beta * trace::hess_nn(d[3], e, ny);
  for (int row = 1; row < 3; ++row) {
    const int o = 4 * (row - 1);
    out[3 * row + 0] = trace::normal(d[o + 0], e, nx);
    out[3 * row + 1] = trace::normal(d[o + 1], e, nx);
    out[3 * row + 2] = trace::normal(d[o + 2], e, nx) - beta * trace::normal_hess_nn(d[o + 3], e, nx, ny, r);
  }
}

void TraceBlock::eval(real r, Vec2 e, Vec2 nx, Vec2 ny, cplx* out) const {
  std::array<RadialDerivs, 8> d;
  if (ctx_.kappa_max * r <= RadialProfile::kSeriesLimit) {
    for (int i = 0; i < 8; ++i) d[i] = prof_[i].eval_series(r);
  } else {
    std::array<cplx, 3> k0{}, k1{};
    for (int k = 0; k < 3; ++k) bessel_k01(ctx_.kappa[k] * r, k0[k], k1[k]);
    for (int i = 0; i < 8; ++i) d[i] = prof_[i].eval_bessel(r, k0, k1);
  }
  combine(d, r, e, nx, ny, out);
}

void TraceBlock::eval_log(real r, Vec2 e, Vec2 nx, Vec2 ny, cplx* out) const {
  std::array<RadialDerivs, 8> d;
  for (int i = 0; i < 8; ++i) d[i] = prof_[i].eval_log_part(r);
  combine(d, r, e, nx, ny, out);
}

int NystromAssembler::choose_upsample(const KernelContext& ctx, const BoundaryCurve& curve, int n,
                                      const NystromOptions& opts) {
  if (opts.upsample > 0) return opts.upsample;
  real vmax = 0.0;
  for (int j = 0; j < 1024; ++j) vmax = std::max(vmax, curve.speed(2.0 * pi * j / 1024));
  const real need = 2.0 * pi * ctx.kappa_max * vmax / opts.resolution;
  int p = std::max(2, int(std::ceil(need / n)));
  return p + p % 2;
}

NystromAssembler::NystromAssembler(const KernelContext& ctx, const BoundaryCurve& curve, int n, NystromOptions opts)
    : ctx_(ctx), curve_(curve), n_(n), opts_(opts), block_(ctx) {
  if (n < 8 || n % 2 != 0) throw Error(ErrorCode::InvalidArgument, fmt::format("node count {} must be even and ≥ 8", n));
  p_ = choose_upsample(ctx, curve, n, opts_);
  nf_ = p_ * n_;
  wscale_ = opts_.window_scale.value_or(ctx.kappa_max);
  coarse_ = sample_nodes(curve, n_);
  fine_ = sample_nodes(curve, nf_);
  jumps_ = analytic_jumps(ctx);

  // Kress weights R(x) = −(2π/m) Σ_{k<m} cos(kx)/k − (π/m²) cos(mx), m = n_f/2.
  const int half = nf_ / 2;
  std::vector<real> cosine(nf_);
  for (int j = 0; j < nf_; ++j) cosine[j] = std::cos(2.0 * pi * j / nf_);
  kress_.assign(nf_, 0.0);
  for (int j = 0; j < nf_; ++j) {
    real s = 0.0;
    long idx = 0;
    for (int k = 1; k < half; ++k) {
      idx = (idx + j) % nf_;
      s += cosine[idx] / k;
    }
    kress_[j] = -(2.0 * pi / half) * s - (pi / (real(half) * half)) * cosine[(long(half) * j) % nf_];
  }

  const int d = opts_.diag_points;
  const real hf = 2.0 * pi / nf_;
  for (int k = d; k >= 1; --k) offsets_.push_back(-0.5 * k * hf);
  for (int k = 1; k <= d; ++k) offsets_.push_back(0.5 * k * hf);
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    real w = 1.0;
    for (std::size_t j = 0; j < offsets_.size(); ++j)
      if (j != i) w *= (0.0 - offsets_[j]) / (offsets_[i] - offsets_[j]);
    lagrange_.push_back(w);
  }

  std::lock_guard<std::mutex> lock(fftw_mutex());
  fftw_complex* a = fftw_alloc_complex(nf_);
  fftw_complex* b = fftw_alloc_complex(n_);
  plan_fine_ = fftw_plan_dft_1d(nf_, a, a, FFTW_BACKWARD, FFTW_ESTIMATE);
  plan_coarse_ = fftw_plan_dft_1d(n_, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_free(a);
  fftw_free(b);
}

NystromAssembler::~NystromAssembler() {
  std::lock_guard<std::mutex> lock(fftw_mutex());
  if (plan_fine_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fine_));
  if (plan_coarse_) fftw_destroy_plan(static_cast<fftw_plan>(plan_coarse_));
}

void NystromAssembler::fine_row(int q, cplx* rows) const {
  const real t = fine_.params[q];
  const Vec2 x = fine_.points[q], nx = fine_.normals[q];
  const real hf = 2.0 * pi / nf_;
  const real u1 = opts_.window_u1, u2 = opts_.window_u2;
  real re_min = ctx_.kappa[0].real();
  for (const cplx& k : ctx_.kappa) re_min = std::min(re_min, k.real());

  cplx T[9], Lr[9];
  // L and M at source parameter s ≠ t.
  auto split = [&](real s, Vec2 y, Vec2 ny, real sp, cplx* L, cplx* M) {
    const Vec2 dx = x - y;
    const real r = dx.norm();
    const Vec2 e = dx * (1.0 / r);
    const real chi = smooth_window(wscale_ * r, u1, u2);
    block_.eval(r, e, nx, ny, T);
    if (chi > 0.0) {
      block_.eval_log(r, e, nx, ny, Lr);
      const real sn = std::sin(0.5 * (t - s));
      const real lg = std::log(4.0 * sn * sn);
      for (int k = 0; k < 9; ++k) {
        L[k] = -0.5 * Lr[k] * (sp * chi);
        M[k] = T[k] * sp - L[k] * lg;
      }
    } else {
      for (int k = 0; k < 9; ++k) {
        L[k] = 0.0;
        M[k] = T[k] * sp;
      }
    }
  };

  cplx L[9], M[9];
  for (int j = 0; j < nf_; ++j) {
    if (j == q) continue;
    const Vec2 y = fine_.points[j];
    const real r = (x - y).norm();
    if (re_min * r > kFarCutoff && wscale_ * r >= u2) {
      for (int k = 0; k < 9; ++k) rows[k * nf_ + j] = 0.0;
      continue;
    }
    split(fine_.params[j], y, fine_.normals[j], fine_.speeds[j], L, M);
    const real R = kress_[((q - j) % nf_ + nf_) % nf_];
    for (int k = 0; k < 9; ++k) rows[k * nf_ + j] = R * L[k] + hf * M[k];
  }
  cplx Ld[9] = {}, Md[9] = {};
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    const real s = t + offsets_[i];
    split(s, curve_.position(s), curve_.inward_normal(s), curve_.speed(s), L, M);
    for (int k = 0; k < 9; ++k) {
      Ld[k] += lagrange_[i] * L[k];
      Md[k] += lagrange_[i] * M[k];
    }
  }
  for (int k = 0; k < 9; ++k) rows[k * nf_ + q] = kress_[0] * Ld[k] + hf * Md[k];
}

void NystromAssembler::restrict_row(const cplx* fine, cplx* coarse, void* work) const {
  // (G T)_k = Σ_j G_j D(s_j − t_k), D the coarse interpolation kernel.
  auto* buf = static_cast<fftw_complex*>(work);
  auto* cbuf = buf + nf_;
  std::copy(fine, fine + nf_, reinterpret_cast<cplx*>(buf));
  fftw_execute_dft(static_cast<fftw_plan>(plan_fine_), buf, buf);
  const cplx* g = reinterpret_cast<const cplx*>(buf);
  cplx* c = reinterpret_cast<cplx*>(cbuf);
  const int h = n_ / 2;
  c[0] = g[0];
  for (int m = 1; m < h; ++m) {
    c[m] = g[m];
    c[n_ - m] = g[nf_ - m];
  }
  c[h] = 0.5 * (g[h] + g[nf_ - h]);
  fftw_execute_dft(static_cast<fftw_plan>(plan_coarse_), cbuf, cbuf);
  const real scale = 1.0 / n_;
  for (int k = 0; k < n_; ++k) coarse[k] = c[k] * scale;
}

CMatrix NystromAssembler::assemble(bool include_jumps) const {
  std::vector<int> targets(n_);
  for (int i = 0; i < n_; ++i) targets[i] = i * p_;
  const CMatrix rows = trace_rows(targets, include_jumps);
  // trace_rows is target-major; reorder to trace-major.
  CMatrix a(3 * n_, 3 * n_);
  for (int i = 0; i < n_; ++i)
    for (int row = 0; row < 3; ++row) a.row(row * n_ + i) = rows.row(3 * i + row);
  return a;
}

CMatrix NystromAssembler::trace_rows(const std::vector<int>& fine_targets, bool include_jumps) const {
  const int nt = int(fine_targets.size());
  CMatrix out(3 * nt, 3 * n_);
  const int workers = resolve_threads(opts_.threads);
  std::vector<std::vector<cplx>> rows(workers, std::vector<cplx>(9 * nf_));
  std::vector<fftw_complex*> work(workers);
  for (auto& w : work) w = fftw_alloc_complex(nf_ + n_);
  std::vector<std::vector<cplx>> coarse(workers, std::vector<cplx>(n_));
  try {
    parallel_for(nt, workers, [&](int w, int ti) {
      const int q = ((fine_targets[ti] % nf_) + nf_) % nf_;
      fine_row(q, rows[w].data());
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
          restrict_row(rows[w].data() + (3 * row + col) * nf_, coarse[w].data(), work[w]);
          for (int k = 0; k < n_; ++k) out(3 * ti + row, col * n_ + k) = coarse[w][k];
        }
      if (!include_jumps) return;
      // Jump term J μ(s_q), μ(s_q) the coarse interpolant.
      std::vector<real> interp(n_, 0.0);
      if (q % p_ == 0) {
        interp[q / p_] = 1.0;
      } else {
        const real s = fine_.params[q];
        for (int k = 0; k < n_; ++k) {
          const real x = s - coarse_.params[k];
          real v = 1.0 + std::cos(0.5 * n_ * x);
          for (int m = 1; m < n_ / 2; ++m) v += 2.0 * std::cos(m * x);
          interp[k] = v / n_;
        }
      }
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) {
          const cplx jv = jumps_[row][col];
          if (jv == cplx{}) continue;
          for (int k = 0; k < n_; ++k) out(3 * ti + row, col * n_ + k) += jv * interp[k];
        }
    });
  } catch (...) {
    for (auto& w : work) fftw_free(w);
    throw;
  }
  for (auto& w : work) fftw_free(w);
  return out;
}

CVector NystromAssembler::upsample_density(const CVector& coarse) const {
  if (coarse.size() != 3 * n_) throw Error(ErrorCode::InvalidArgument, "density length must be 3n");
  CVector fine(3 * nf_);
  fftw_complex* buf = fftw_alloc_complex(nf_ + n_);
  auto* b = reinterpret_cast<cplx*>(buf);
  auto* c = b + nf_;
  const int h = n_ / 2;
  for (int comp = 0; comp < 3; ++comp) {
    for (int k = 0; k < n_; ++k) c[k] = coarse[comp * n_ + k];
    fftw_execute_dft(static_cast<fftw_plan>(plan_coarse_), buf + nf_, buf + nf_);
    std::fill(b, b + nf_, cplx{});
    const real scale = 1.0 / n_;
    b[0] = c[0] * scale;
    for (int m = 1; m < h; ++m) {
      b[m] = c[m] * scale;
      b[nf_ - m] = c[n_ - m] * scale;
    }
    b[h] = 0.5 * c[h] * scale;
    b[nf_ - h] = 0.5 * c[h] * scale;
    fftw_execute_dft(static_cast<fftw_plan>(plan_fine_), buf, buf);
    for (int j = 0; j < nf_; ++j) fine[comp * nf_ + j] = b[j];
  }
  fftw_free(buf);
  return fine;
}

}  // namespace sixbie
