#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <vector>

#include "ihf/grid.hpp"
#include "ihf/solver.hpp"

namespace ihf::test {

inline GridSpec spec2(double h, double R, int m, ObstacleShape obstacle = BallObstacle{},
                      OuterShape outer = OuterShape::Ball) {
  GridSpec s;
  s.dimension = 2;
  s.spacing = h;
  s.outer_radius = R;
  s.stencil_width = m;
  s.obstacle = std::move(obstacle);
  s.outer = outer;
  return s;
}

// Field equal to f on every live node, NaN on excluded ones.
inline SolutionField field_from(DomainPtr d, const ScalarFn& f) {
  SolutionField u;
  u.domain = d;
  u.values.assign(d->size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < d->size(); ++i)
    if (d->classification(i) != NodeClass::Excluded) u.values[i] = f(d->point(i));
  u.converged = true;
  return u;
}

inline SolveOptions tight(double tol = 1e-10) {
  SolveOptions o;
  o.tol = tol;
  return o;
}

inline double max_abs_diff(const SolutionField& u, const ScalarFn& f, bool interior_only = false) {
  const Domain& d = u.grid();
  double e = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto c = d.classification(i);
    if (c == NodeClass::Excluded || (interior_only && c != NodeClass::Interior)) continue;
    e = std::max(e, std::abs(u[i] - f(d.point(i))));
  }
  return e;
}

// Euclidean length of a lattice vector, in lattice units.
inline double lattice_length(const Lattice& l) {
  return std::sqrt(double(l[0]) * l[0] + double(l[1]) * l[1] + double(l[2]) * l[2]);
}

}  // namespace ihf::test
