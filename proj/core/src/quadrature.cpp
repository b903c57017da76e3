#include "sixbie/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace sixbie {

namespace {

// Kronrod 15-point abscissae (positive half) and weights; the Gauss 7-point
// rule uses every other abscissa.
constexpr real xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr real wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr real wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  real a, b;
  cplx value;
  real error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<cplx(real)>& f, real a, real b) {
  const real c = 0.5 * (a + b), h = 0.5 * (b - a);
  cplx fv[15];
  fv[7] = f(c);
  for (int j = 0; j < 7; ++j) {
    const real dx = h * xk[j];
    fv[j] = f(c - dx);
    fv[14 - j] = f(c + dx);
  }
  cplx kron = fv[7] * wk[7];
  cplx gauss = fv[7] * wg[3];
  real resabs = wk[7] * std::abs(fv[7]);
  for (int j = 0; j < 7; ++j) {
    const cplx s = fv[j] + fv[14 - j];
    kron += wk[j] * s;
    resabs += wk[j] * (std::abs(fv[j]) + std::abs(fv[14 - j]));
    if (j % 2 == 1) gauss += wg[j / 2] * s;
  }
  const cplx mean = 0.5 * kron;
  real resasc = wk[7] * std::abs(fv[7] - mean);
  for (int j = 0; j < 7; ++j) resasc += wk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
  resabs *= std::abs(h);
  resasc *= std::abs(h);
  // QUADPACK error heuristic, floored at the roundoff level of the interval.
  real err = std::abs((kron - gauss) * h);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr real eps = std::numeric_limits<real>::epsilon();
  if (resabs > std::numeric_limits<real>::min() / (50.0 * eps)) err = std::max(eps * resabs, err);
  return {a, b, kron * h, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<cplx(real)>& f, real a, real b,
                                    real abs_tol, real rel_tol, int max_intervals) {
  std::priority_queue<Interval> heap;
  Interval first = gk15(f, a, b);
  cplx total = first.value;
  real err = first.error;
  heap.push(first);
  int evals = 15;
  int count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (count >= max_intervals) return {total, err, evals, false};
    Interval worst = heap.top();
    heap.pop();
    const real mid = 0.5 * (worst.a + worst.b);
    Interval left = gk15(f, worst.a, mid);
    Interval right = gk15(f, mid, worst.b);
    evals += 30;
    ++count;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {total, err, evals, true};
}

}  // namespace sixbie
