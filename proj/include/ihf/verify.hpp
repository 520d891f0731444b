#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ihf/asymptotics.hpp"
#include "ihf/solver.hpp"

namespace ihf {

enum class ViolationKind { CcpAbove, CcpBelow, Comparison, Envelope, Extremal, Reflection };

const char* to_string(ViolationKind k);

// c(x) = slope |x - vertex| + offset
struct ConeFunction {
  double slope = 0.0;
  Point vertex{};
  double offset = 0.0;

  double operator()(const Point& x) const { return slope * distance(x, vertex) + offset; }
  bool operator==(const ConeFunction&) const = default;
};

// Shortest-path length through stencil offsets, in lattice units. Cones in
// this metric are discrete supersolutions away from their vertex, so discrete
// solutions compare with them exactly; Euclidean cones only up to O(h).
class StencilMetric {
 public:
  // Table of distances for lattice vectors with max-norm <= radius.
  StencilMetric(const StencilSet& stencil, int radius);
  double operator()(const Lattice& v) const;
  int radius() const { return radius_; }

 private:
  int dim_;
  int radius_;
  std::vector<double> table_;
};

enum class ConeMetric { Stencil, Euclidean };

// Closed lattice box [lo, hi] (inclusive per axis).
struct Box {
  Lattice lo{};
  Lattice hi{};
  bool contains(const Lattice& l) const;
  bool operator==(const Box&) const = default;
};

struct ViolationRecord {
  ViolationKind kind = ViolationKind::CcpAbove;
  std::vector<std::size_t> nodes;
  double magnitude = 0.0;
  std::string context;
  // For CCP records: vertex, slope and offset; with ConeMetric::Stencil the
  // cone is slope * stencil distance + offset.
  std::optional<ConeFunction> cone;
  std::optional<Box> box;
};

// Boxes of side 4, 8 and 16 lattice units anchored on a stride of half the
// side, keeping those made entirely of interior nodes.
std::vector<Box> dyadic_boxes(const Domain& d);

// Nodes lying in the interior of at least one of the boxes, in node order.
std::vector<std::size_t> box_interior_nodes(const Domain& d, std::span<const Box> boxes);

// Extremal cone test on every box. The discrete boundary of a box is the set
// of its nodes whose stencil leaves the box; the others form its interior.
// For each vertex x0 in the box the cone u(x0) + a d(x, x0) with a the largest
// boundary slope from x0 must stay above u on the box interior (and the
// smallest-slope cone below it), d the chosen metric. One record per
// (box, node, kind) carrying the largest excess over all vertices; its nodes
// are the violating node, the cone vertex and the boundary node fixing the
// cone slope. The list is sorted by violating node then magnitude.
// Boxes without interior nodes are skipped.
std::vector<ViolationRecord> check_ccp(const SolutionField& u, std::span<const Box> boxes, double tol,
                                       ConeMetric metric = ConeMetric::Stencil);

// max (u - v) over common live nodes with |x| <= 0.8 min(R_u, R_v) against
// max (u - v) on the obstacle boundary. Fields must share dimension, spacing,
// stencil width and obstacle; the outer radius may differ.
std::optional<ViolationRecord> check_comparison(const SolutionField& u, const SolutionField& v, double tol);

// phi = u - lambda|x| (or u - a.x): its extremes over |x| <= 0.8 R must be
// attained on the obstacle boundary within tol.
std::optional<ViolationRecord> check_extremal_location(const SolutionField& u, const FarFieldSpec& far, double tol);

// V(x', x_axis) = -u(x', -x_axis) on the same domain, residual recomputed.
SolutionField reflect_field(const SolutionField& u, int axis);

// m- - S-_inf |x| - eps <= u <= m+ + S+_inf |x| + eps at every live node with
// eps = 5h + tol.
std::vector<ViolationRecord> check_envelope(const SolutionField& u, const SlopeProfile& profile, double tol);

// Reference solver for small domains: Jacobi iteration of the all-pairs
// midrange formula from the boundary midpoint until the update drops below
// kOracleStop.
SolutionField oracle_solve(DomainPtr domain, const BoundaryCondition& bc);

inline constexpr std::size_t kOracleMaxNodes = 2500;
inline constexpr long kOracleMaxIter = 10'000'000;
// The error left behind is about update / (1 - q), q the Jacobi contraction
// rate, so the stop sits below the 1e-12 the oracle is trusted to.
inline constexpr double kOracleStop = 1e-13;

}  // namespace ihf
