#include "ihf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ihf::kernels {

namespace {
constexpr int kMaxClasses = kMaxStencilClasses;
}

double local_midrange(const Domain& d, std::size_t k, const double* u) {
  const StencilSet& st = d.stencil();
  const int nc = st.classes_for_width[d.width(k)];
  const auto nbr = d.neighbors(k);
  double hi[kMaxClasses];
  double lo[kMaxClasses];
  for (int c = 0; c < nc; ++c) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (int o = st.class_begin[c]; o < st.class_begin[c + 1]; ++o) {
      const double v = u[nbr[o]];
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    hi[c] = mx;
    lo[c] = mn;
  }
  // t = max_a min_b of the balance point between the largest class-a value
  // and the smallest class-b value.
  const int stride = st.class_count();
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < nc; ++a) {
    const double* w = st.pair_weight.data() + a * stride;
    double worst = std::numeric_limits<double>::infinity();
    for (int b = 0; b < nc; ++b) worst = std::min(worst, w[b] * hi[a] + (1.0 - w[b]) * lo[b]);
    best = std::max(best, worst);
  }
  return best;
}

namespace serial {

double colored_sweep(const Domain& d, std::span<double> u) {
  const auto& interior = d.interior();
  double delta = 0.0;
  for (const auto& color : d.colors()) {
    for (const auto k : color) {
      const double t = local_midrange(d, k, u.data());
      double& cur = u[interior[k]];
      delta = std::max(delta, std::abs(t - cur));
      cur = t;
    }
  }
  return delta;
}

double jacobi_sweep(const Domain& d, std::span<const double> in, std::span<double> out) {
  const auto& interior = d.interior();
  double delta = 0.0;
  for (std::size_t k = 0; k < interior.size(); ++k) {
    const double t = local_midrange(d, k, in.data());
    delta = std::max(delta, std::abs(t - in[interior[k]]));
    out[interior[k]] = t;
  }
  return delta;
}

double residual_max(const Domain& d, std::span<const double> u) {
  const auto& interior = d.interior();
  double r = 0.0;
  for (std::size_t k = 0; k < interior.size(); ++k)
    r = std::max(r, std::abs(local_midrange(d, k, u.data()) - u[interior[k]]));
  return r;
}

}  // namespace serial

namespace omp {

double colored_sweep(const Domain& d, std::span<double> u) {
  const auto& interior = d.interior();
  double delta = 0.0;
  for (const auto& color : d.colors()) {
    const auto n = static_cast<std::ptrdiff_t>(color.size());
#pragma omp parallel for reduction(max : delta) schedule(static)
    for (std::ptrdiff_t q = 0; q < n; ++q) {
      const auto k = color[q];
      const double t = local_midrange(d, k, u.data());
      double& cur = u[interior[k]];
      delta = std::max(delta, std::abs(t - cur));
      cur = t;
    }
  }
  return delta;
}

double jacobi_sweep(const Domain& d, std::span<const double> in, std::span<double> out) {
  const auto& interior = d.interior();
  const auto n = static_cast<std::ptrdiff_t>(interior.size());
  double delta = 0.0;
#pragma omp parallel for reduction(max : delta) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const double t = local_midrange(d, k, in.data());
    delta = std::max(delta, std::abs(t - in[interior[k]]));
    out[interior[k]] = t;
  }
  return delta;
}

double residual_max(const Domain& d, std::span<const double> u) {
  const auto& interior = d.interior();
  const auto n = static_cast<std::ptrdiff_t>(interior.size());
  double r = 0.0;
#pragma omp parallel for reduction(max : r) schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k)
    r = std::max(r, std::abs(local_midrange(d, k, u.data()) - u[interior[k]]));
  return r;
}

}  // namespace omp

}  // namespace ihf::kernels
