#include "ihf/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace ihf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool live(const Domain& d, std::size_t i) { return d.classification(i) != NodeClass::Excluded; }

// Adds the pair ratio to the bucket of the largest radius not exceeding key.
void bucket_max(std::span<const double> radii, std::vector<double>& best, double key, double ratio) {
  const auto it = std::upper_bound(radii.begin(), radii.end(), key + 1e-12);
  if (it == radii.begin()) return;
  auto& slot = best[static_cast<std::size_t>(it - radii.begin() - 1)];
  slot = std::max(slot, ratio);
}

// Nearest node, or for points on the obstacle surface or the outer sphere the
// closest live node within two lattice steps.
std::optional<std::size_t> nearest_live(const Domain& d, const Point& x) {
  const auto i = d.nearest(x);
  if (i && live(d, *i)) return i;
  const double h = d.spacing();
  Lattice c{};
  for (int a = 0; a < d.dimension(); ++a) c[a] = static_cast<int>(std::lround(x[a] / h));
  const int zr = d.dimension() == 3 ? 2 : 0;
  std::optional<std::size_t> best;
  double best_dist = kInf;
  for (int k = -zr; k <= zr; ++k)
    for (int j = -2; j <= 2; ++j)
      for (int a = -2; a <= 2; ++a) {
        const auto n = d.find({c[0] + a, c[1] + j, c[2] + k});
        if (!n || !live(d, *n)) continue;
        const double dist = distance(d.point(*n), x);
        if (dist < best_dist - 1e-12 * h) {
          best_dist = dist;
          best = n;
        }
      }
  return best;
}

struct LinearFit {
  Eigen::VectorXd coef;
  double error = 0.0;
};

// Least squares followed by Lawson reweighting towards the sup-norm optimum;
// returns the best iterate seen.
LinearFit minimax_fit(const Eigen::MatrixXd& basis, const Eigen::VectorXd& v) {
  constexpr int kLawsonSteps = 40;
  Eigen::VectorXd w = Eigen::VectorXd::Constant(v.size(), 1.0 / static_cast<double>(v.size()));
  LinearFit best;
  for (int step = 0; step <= kLawsonSteps; ++step) {
    const Eigen::MatrixXd weighted = w.asDiagonal() * basis;
    const Eigen::VectorXd coef = (basis.transpose() * weighted).ldlt().solve(weighted.transpose() * v);
    const Eigen::VectorXd r = (v - basis * coef).cwiseAbs();
    const double err = r.maxCoeff();
    if (step == 0 || err < best.error) best = {coef, err};
    w = w.cwiseProduct(r);
    const double total = w.sum();
    if (!(total > 0.0)) break;
    w /= total;
  }
  return best;
}

}  // namespace

double SlopeProfile::eps_mono() const {
  if (samples.empty()) return 0.0;
  return 5.0 * spacing / samples.front().radius;
}

std::vector<std::string> SlopeProfile::monotonicity_violations() const {
  std::vector<std::string> out;
  const double eps = eps_mono();
  for (std::size_t k = 1; k < samples.size(); ++k) {
    const auto& a = samples[k - 1];
    const auto& b = samples[k];
    std::ostringstream where;
    where << " between r=" << a.radius << " and r=" << b.radius;
    if (b.s_plus < a.s_plus - eps) out.push_back("S+ decreases" + where.str());
    if (b.s_minus < a.s_minus - eps) out.push_back("S- decreases" + where.str());
    if (b.lip_exterior > a.lip_exterior + eps) out.push_back("exterior Lipschitz constant increases" + where.str());
  }
  return out;
}

SlopeProfile slope_profile(const SolutionField& u, std::span<const double> radii, const ProfileOptions& opts) {
  const Domain& d = u.grid();
  if (radii.empty()) throw InvalidArgument("slope profile needs at least one radius");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw InvalidArgument("profile radii must increase strictly");
  const double h = d.spacing();
  const double r_dom = d.spec().outer_radius;
  for (const double r : radii)
    if (!(r > 1.0) || r > r_dom + 1e-12)
      throw RadiusOutOfDomain("profile radius " + std::to_string(r) + " outside (1, R]");

  SlopeProfile p;
  p.spacing = h;
  p.m_plus = -kInf;
  p.m_minus = kInf;
  for (const auto i : d.nodes_of(NodeClass::ObstacleBoundary)) {
    p.m_plus = std::max(p.m_plus, u[i]);
    p.m_minus = std::min(p.m_minus, u[i]);
  }
  if (!std::isfinite(p.m_plus)) throw InvalidArgument("slope profile needs an obstacle boundary");

  std::vector<std::size_t> nodes;
  std::vector<double> node_r;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (live(d, i)) {
      nodes.push_back(i);
      node_r.push_back(d.radius(i));
    }

  for (const double r : radii) {
    SlopeSample s;
    s.radius = r;
    s.sphere_max = -kInf;
    s.sphere_min = kInf;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (std::abs(node_r[n] - r) > h * (1.0 + 1e-12)) continue;
      s.sphere_max = std::max(s.sphere_max, u[nodes[n]]);
      s.sphere_min = std::min(s.sphere_min, u[nodes[n]]);
    }
    if (!std::isfinite(s.sphere_max)) throw RadiusOutOfDomain("no nodes on the sphere of radius " + std::to_string(r));
    s.s_plus = (std::max(s.sphere_max, p.m_plus) - p.m_plus) / r;
    s.s_minus = (p.m_minus - std::min(s.sphere_min, p.m_minus)) / r;
    p.samples.push_back(s);
  }

  // Exterior Lipschitz constants: all pairs of a stride subsample plus all
  // stencil pairs. Both pair sets are nested in r, so the result is
  // nonincreasing by construction.
  const std::size_t stride = std::max<std::size_t>(1, (nodes.size() + opts.subsample - 1) / opts.subsample);
  std::vector<std::size_t> sub;
  for (std::size_t n = 0; n < nodes.size(); n += stride) sub.push_back(n);
  std::vector<double> best(radii.size(), 0.0);
  const auto n_sub = static_cast<std::ptrdiff_t>(sub.size());
#pragma omp parallel
  {
    std::vector<double> local(radii.size(), 0.0);
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t a = 0; a < n_sub; ++a) {
      const std::size_t na = sub[a];
      const Point xa = d.point(nodes[na]);
      for (std::size_t b = static_cast<std::size_t>(a) + 1; b < sub.size(); ++b) {
        const std::size_t nb = sub[b];
        const double ratio = std::abs(u[nodes[na]] - u[nodes[nb]]) / distance(xa, d.point(nodes[nb]));
        bucket_max(radii, local, std::min(node_r[na], node_r[nb]), ratio);
      }
    }
#pragma omp critical
    for (std::size_t k = 0; k < best.size(); ++k) best[k] = std::max(best[k], local[k]);
  }
  const StencilSet& st = d.stencil();
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    const auto& l = d.lattice(nodes[n]);
    for (std::size_t o = 0; o < st.size(); ++o) {
      const auto& off = st.offsets[o];
      const auto j = d.find({l[0] + off[0], l[1] + off[1], l[2] + off[2]});
      if (!j || !live(d, *j)) continue;
      const double ratio = std::abs(u[nodes[n]] - u[*j]) / (st.lengths[o] * h);
      bucket_max(radii, best, std::min(node_r[n], d.radius(*j)), ratio);
    }
  }
  double running = 0.0;
  for (std::size_t k = radii.size(); k-- > 0;) {
    running = std::max(running, best[k]);
    p.samples[k].lip_exterior = running;
  }

  const auto& last = p.samples.back();
  p.s_inf_plus = last.s_plus;
  p.s_inf_minus = last.s_minus;
  p.s_inf = std::max(p.s_inf_plus, p.s_inf_minus);
  std::size_t i0 = 0;
  while (i0 + 1 < p.samples.size() && p.samples[i0].radius < 0.5 * last.radius) ++i0;
  if (i0 + 1 == p.samples.size()) i0 = 0;
  if (i0 + 1 < p.samples.size()) {
    const auto& first = p.samples[i0];
    const double dr = last.radius - first.radius;
    p.tail_slope_plus =
        (std::max(last.sphere_max, p.m_plus) - std::max(first.sphere_max, p.m_plus)) / dr;
    p.tail_slope_minus =
        (std::min(first.sphere_min, p.m_minus) - std::min(last.sphere_min, p.m_minus)) / dr;
  } else {
    p.tail_slope_plus = p.s_inf_plus;
    p.tail_slope_minus = p.s_inf_minus;
  }
  return p;
}

std::vector<Point> annulus_samples(int dimension, const Annulus& annulus) {
  std::vector<Point> out;
  if (dimension == 2) {
    constexpr int kRadii = 8, kAngles = 64;
    for (int a = 0; a < kRadii; ++a) {
      const double r = annulus.inner + (annulus.outer - annulus.inner) * a / (kRadii - 1);
      for (int t = 0; t < kAngles; ++t) {
        const double th = 2.0 * std::numbers::pi * t / kAngles;
        out.push_back({r * std::cos(th), r * std::sin(th), 0.0});
      }
    }
  } else {
    constexpr int kRadii = 6, kDirs = 128;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int a = 0; a < kRadii; ++a) {
      const double r = annulus.inner + (annulus.outer - annulus.inner) * a / (kRadii - 1);
      for (int t = 0; t < kDirs; ++t) {
        const double z = 1.0 - 2.0 * (t + 0.5) / kDirs;
        const double rho = std::sqrt(1.0 - z * z);
        out.push_back({r * rho * std::cos(golden * t), r * rho * std::sin(golden * t), r * z});
      }
    }
  }
  return out;
}

BlowDownFit blow_down(const SolutionField& u, double r_k, const Annulus& annulus) {
  const Domain& d = u.grid();
  if (annulus.inner < 0.5 || !(annulus.outer > annulus.inner))
    throw InvalidArgument("blow-down annulus needs 0.5 <= inner < outer");
  if (!(r_k > 0.0) || r_k * annulus.outer > d.spec().outer_radius + 1e-12)
    throw RadiusOutOfDomain("blow-down radius " + std::to_string(r_k) + " leaves the domain");
  const int dim = d.dimension();

  BlowDownFit fit;
  fit.r_k = r_k;
  fit.annulus = annulus;
  fit.samples = annulus_samples(dim, annulus);
  for (const auto& y : fit.samples) {
    const Point x{r_k * y[0], r_k * y[1], r_k * y[2]};
    const auto i = nearest_live(d, x);
    if (!i) throw RadiusOutOfDomain("blow-down sample outside the live domain");
    fit.values.push_back(u[*i] / r_k);
  }

  const auto n = static_cast<Eigen::Index>(fit.samples.size());
  Eigen::MatrixXd plane_basis(n, dim);
  Eigen::MatrixXd cone_basis(n, 1);
  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& y = fit.samples[static_cast<std::size_t>(k)];
    for (int a = 0; a < dim; ++a) plane_basis(k, a) = y[a];
    cone_basis(k, 0) = norm(y);
    v[k] = fit.values[static_cast<std::size_t>(k)];
  }
  const auto plane = minimax_fit(plane_basis, v);
  for (int a = 0; a < dim; ++a) fit.plane[a] = plane.coef[a];
  fit.plane_error = plane.error;
  const auto cone = minimax_fit(cone_basis, v);
  fit.cone_sign = cone.coef[0] < 0.0 ? -1 : 1;
  fit.cone_slope = std::abs(cone.coef[0]);
  fit.cone_error = cone.error;
  return fit;
}

const char* to_string(AsymptoticKind k) {
  switch (k) {
    case AsymptoticKind::Bounded:
      return "bounded";
    case AsymptoticKind::ConeUp:
      return "cone_up";
    case AsymptoticKind::ConeDown:
      return "cone_down";
    case AsymptoticKind::Plane:
      return "plane";
  }
  return "?";
}

AsymptoticClass classify(const SlopeProfile& profile, std::span<const BlowDownFit> fits,
                         std::optional<double> eps_class) {
  if (profile.samples.size() < 3) throw InvalidArgument("classification needs at least 3 profile samples");
  if (fits.size() < 2) throw InvalidArgument("classification needs blow-down fits at 2 or more radii");
  for (std::size_t k = 1; k < fits.size(); ++k)
    if (!(fits[k].r_k > fits[k - 1].r_k)) throw InvalidArgument("blow-down radii must increase");

  AsymptoticClass c;
  c.s_inf_plus = profile.s_inf_plus;
  c.s_inf_minus = profile.s_inf_minus;
  c.s_inf = profile.s_inf;
  c.eps_class = eps_class.value_or(default_eps_class(profile.s_inf));
  c.margin = profile.s_inf_plus - profile.s_inf_minus;
  for (const auto& f : fits) c.plane_errors.push_back(f.plane_error);

  if (c.s_inf < c.eps_class) {
    c.kind = AsymptoticKind::Bounded;
  } else if (c.margin > c.eps_class) {
    c.kind = AsymptoticKind::ConeUp;
    c.slope = profile.tail_slope_plus;
  } else if (-c.margin > c.eps_class) {
    c.kind = AsymptoticKind::ConeDown;
    c.slope = profile.tail_slope_minus;
  } else {
    if (c.plane_errors.back() > c.plane_errors.front() + 0.1 * c.eps_class) {
      std::ostringstream msg;
      msg << "S+ and S- agree within " << c.eps_class << " but the plane-fit error grows from "
          << c.plane_errors.front() << " to " << c.plane_errors.back() << "; extend the domain";
      throw Inconclusive(msg.str());
    }
    c.kind = AsymptoticKind::Plane;
    c.direction = fits.back().plane;
  }
  return c;
}

LinearityDiagnostic check_blow_down_linearity(const BlowDownFit& fit, double lip, double tol) {
  LinearityDiagnostic diag;
  diag.plane_error = fit.plane_error;
  diag.cone_error = fit.cone_error;
  diag.slope_ratio = lip > 0.0 ? norm(fit.plane) / lip : 0.0;
  if (fit.plane_error <= tol && fit.plane_error <= fit.cone_error) {
    diag.branch = "plane";
  } else if (fit.cone_error <= tol) {
    diag.branch = "cone";
  } else {
    diag.branch = "none";
    diag.consistent = false;
  }
  return diag;
}

}  // namespace ihf
