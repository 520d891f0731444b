#include "ihf/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ihf/kernels.hpp"

namespace ihf {

namespace forms {

ScalarFn constant(double c) {
  return [c](const Point&) { return c; };
}

ScalarFn linear(const Point& a, double b) {
  return [a, b](const Point& x) { return dot(a, x) + b; };
}

ScalarFn radial(double alpha, double beta) {
  return [alpha, beta](const Point& x) { return alpha * norm(x) + beta; };
}

}  // namespace forms

void BoundaryCondition::validate(const Domain& d) const {
  if (values.size() != d.size()) throw InvalidArgument("boundary data size does not match the domain");
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.is_boundary(i) && !std::isfinite(values[i]))
      throw InvalidArgument("boundary node without finite data");
}

BoundaryCondition make_boundary(const Domain& d, const ScalarFn& obstacle_data, const ScalarFn& outer_data) {
  BoundaryCondition bc;
  bc.values.assign(d.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < d.size(); ++i) {
    switch (d.classification(i)) {
      case NodeClass::ObstacleBoundary:
        bc.values[i] = obstacle_data(d.point(i));
        break;
      case NodeClass::OuterBoundary:
        bc.values[i] = outer_data(d.point(i));
        break;
      default:
        break;
    }
  }
  return bc;
}

double FarFieldSpec::profile(const Point& x) const {
  if (const auto* c = std::get_if<Cone>(&shape)) return c->slope * norm(x);
  return dot(std::get<Plane>(shape).direction, x);
}

void FarFieldSpec::validate() const {
  if (const auto* p = std::get_if<Plane>(&shape)) {
    if (!(norm(p->direction) > 0.0)) throw InvalidArgument("plane far field needs |a| > 0");
  } else if (!std::isfinite(std::get<Cone>(shape).slope)) {
    throw InvalidArgument("cone slope must be finite");
  }
}

FarFieldAnchors far_field_anchors(const Domain& d, const ScalarFn& g, const FarFieldSpec& far) {
  far.validate();
  FarFieldAnchors a;
  a.c_plus = -std::numeric_limits<double>::infinity();
  a.c_minus = std::numeric_limits<double>::infinity();
  for (const auto i : d.nodes_of(NodeClass::ObstacleBoundary)) {
    const Point x = d.point(i);
    const double v = g(x) - far.profile(x);
    a.c_plus = std::max(a.c_plus, v);
    a.c_minus = std::min(a.c_minus, v);
  }
  if (!std::isfinite(a.c_plus)) throw InvalidArgument("far-field anchors need a nonempty obstacle boundary");
  switch (far.anchor) {
    case Anchor::CPlus:
      a.chosen = a.c_plus;
      break;
    case Anchor::CMinus:
      a.chosen = a.c_minus;
      break;
    case Anchor::Midpoint:
      a.chosen = 0.5 * (a.c_plus + a.c_minus);
      break;
  }
  return a;
}

NotConverged::NotConverged(long max_iter, double last_update, std::shared_ptr<const SolutionField> partial)
    : Error("not converged after " + std::to_string(max_iter) + " iterations (last update " +
            std::to_string(last_update) + ")"),
      max_iter_(max_iter),
      last_update_(last_update),
      partial_(std::move(partial)) {}

double discrete_inf_laplacian(const SolutionField& field, std::size_t node) {
  const Domain& d = field.grid();
  const auto slot = d.interior_slot(node);
  if (slot < 0) throw InvalidArgument("discrete_inf_laplacian needs an interior node");
  const StencilSet& st = d.stencil();
  const auto nbr = d.neighbors(static_cast<std::size_t>(slot));
  const double u0 = field.values[node];
  const double h = d.spacing();
  double up = -std::numeric_limits<double>::infinity(), up_len = 0.0;
  double down = -std::numeric_limits<double>::infinity(), down_len = 0.0;
  for (std::size_t o = 0; o < nbr.size(); ++o) {
    const double len = st.lengths[o] * h;
    const double v = field.values[static_cast<std::size_t>(nbr[o])];
    if ((v - u0) / len > up) {
      up = (v - u0) / len;
      up_len = len;
    }
    if ((u0 - v) / len > down) {
      down = (u0 - v) / len;
      down_len = len;
    }
  }
  return (up - down) * 2.0 / (up_len + down_len);
}

double residual_max(const Domain& d, std::span<const double> values, Backend backend) {
  return backend == Backend::Parallel ? kernels::omp::residual_max(d, values)
                                      : kernels::serial::residual_max(d, values);
}

SolutionField solve_dirichlet(DomainPtr domain, const BoundaryCondition& bc, const SolveOptions& opts,
                              std::span<const double> init) {
  const Domain& d = *domain;
  bc.validate(d);
  if (!(opts.tol > 0.0)) throw InvalidArgument("solver tolerance must be positive");

  SolutionField f;
  f.domain = domain;
  f.tolerance = opts.tol;
  f.values.assign(d.size(), std::numeric_limits<double>::quiet_NaN());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.is_boundary(i)) continue;
    f.values[i] = bc.values[i];
    lo = std::min(lo, bc.values[i]);
    hi = std::max(hi, bc.values[i]);
  }
  const bool warm = !init.empty();
  if (warm && init.size() != d.size()) throw InvalidArgument("initial field size does not match the domain");
  for (const auto i : d.interior()) f.values[i] = warm ? init[i] : 0.5 * (lo + hi);

  const bool parallel = opts.backend == Backend::Parallel;
  std::vector<double> scratch;
  if (opts.order == SweepOrder::Jacobi) scratch = f.values;
  // Updates below this are rounding noise and end the iteration.
  double scale = std::max(std::abs(lo), std::abs(hi));
  for (const auto i : d.interior()) scale = std::max(scale, std::abs(f.values[i]));
  const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
  constexpr int kWindow = 16;
  std::vector<double> history;
  double delta = std::numeric_limits<double>::infinity();
  while (f.iterations < opts.max_iter) {
    ++f.iterations;
    if (opts.order == SweepOrder::Colored) {
      delta = parallel ? kernels::omp::colored_sweep(d, f.values) : kernels::serial::colored_sweep(d, f.values);
    } else {
      delta = parallel ? kernels::omp::jacobi_sweep(d, f.values, scratch)
                       : kernels::serial::jacobi_sweep(d, f.values, scratch);
      f.values.swap(scratch);
    }
    history.push_back(delta);
    if (delta < opts.tol) {
      if (opts.stop == StopRule::Update || delta <= noise_floor || delta == 0.0) {
        f.converged = true;
        break;
      }
      if (history.size() > kWindow) {
        const double past = history[history.size() - 1 - kWindow];
        const double q = past > 0.0 ? std::pow(delta / past, 1.0 / kWindow) : 0.0;
        if (q < 1.0 && delta * q / (1.0 - q) < opts.tol) {
          f.converged = true;
          break;
        }
      }
    }
  }
  f.last_update = delta;
  f.residual_max = residual_max(d, f.values, opts.backend);
  if (!f.converged && opts.throw_on_failure)
    throw NotConverged(opts.max_iter, delta, std::make_shared<const SolutionField>(f));
  return f;
}

}  // namespace ihf
