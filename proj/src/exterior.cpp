#include <algorithm>
#include <cmath>
#include <limits>

#include "ihf/solver.hpp"

namespace ihf {

namespace {

void check_schedule(std::span<const double> schedule) {
  if (schedule.empty()) throw InvalidArgument("exhaustion schedule is empty");
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (!(schedule[k] > schedule[k - 1])) throw InvalidArgument("exhaustion radii must increase strictly");
}

std::vector<double> restrict_to(const SolutionField& f, const std::vector<Lattice>& nodes) {
  std::vector<double> out;
  out.reserve(nodes.size());
  for (const auto& l : nodes) out.push_back(f.values[*f.grid().find(l)]);
  return out;
}

}  // namespace

ExteriorResult solve_exterior(const GridSpec& base, const ScalarFn& g, const FarFieldSpec& far,
                              std::span<const double> schedule, const Annulus& monitor,
                              const ExteriorOptions& opts) {
  check_schedule(schedule);
  far.validate();
  if (!(monitor.inner > 0.0) || !(monitor.outer > monitor.inner))
    throw InvalidArgument("monitor annulus must satisfy 0 < inner < outer");
  if (!(schedule.front() > monitor.outer))
    throw InvalidArgument("first exhaustion radius must exceed the monitor annulus");

  ExteriorResult result;
  ExhaustionLog& log = result.log;
  std::shared_ptr<const SolutionField> previous;

  for (const double radius : schedule) {
    GridSpec spec = base;
    spec.outer_radius = radius;
    spec.outer = OuterShape::Ball;
    auto domain = make_domain(spec);
    const FarFieldAnchors anchors = far_field_anchors(*domain, g, far);
    const double anchor = anchors.chosen;
    auto outer = [&far, anchor](const Point& x) { return anchor + far.profile(x); };
    const BoundaryCondition bc = make_boundary(*domain, g, outer);

    if (log.monitor_nodes.empty()) {
      log.anchors = anchors;
      for (std::size_t i = 0; i < domain->size(); ++i) {
        if (!monitor.contains(domain->radius(i))) continue;
        if (domain->classification(i) == NodeClass::Excluded)
          throw InvalidArgument("monitor annulus intersects the obstacle");
        log.monitor_nodes.push_back(domain->lattice(i));
      }
      if (log.monitor_nodes.empty()) throw InvalidArgument("monitor annulus contains no nodes");
    }

    std::vector<double> init;
    if (opts.warm_start && previous) {
      // Previous stage inside B_{R_{k-1}}, far-field datum outside.
      init.resize(domain->size());
      const Domain& prev = previous->grid();
      for (std::size_t i = 0; i < domain->size(); ++i) {
        const auto j = prev.find(domain->lattice(i));
        init[i] = (j && prev.classification(*j) != NodeClass::Excluded) ? previous->values[*j]
                                                                        : outer(domain->point(i));
      }
    }

    SolutionField field = solve_dirichlet(domain, bc, opts.solve, init);
    log.stages.push_back({radius, field.iterations, field.residual_max, field.last_update});
    log.monitor_values.push_back(restrict_to(field, log.monitor_nodes));
    if (log.monitor_values.size() > 1) {
      const auto& a = log.monitor_values[log.monitor_values.size() - 2];
      const auto& b = log.monitor_values.back();
      double sup = 0.0;
      for (std::size_t n = 0; n < a.size(); ++n) sup = std::max(sup, std::abs(a[n] - b[n]));
      log.sup_differences.push_back(sup);
    }
    previous = std::make_shared<const SolutionField>(std::move(field));
  }

  log.converged = !log.sup_differences.empty() && log.sup_differences.back() < opts.stage_tol;
  result.field = *previous;
  return result;
}

SolutionField entire_envelope(const SolutionField& u, std::span<const double> radii, EnvelopeSide side,
                              const SolveOptions& opts) {
  check_schedule(radii);
  const Domain& ud = u.grid();
  const auto obstacle_nodes = ud.nodes_of(NodeClass::ObstacleBoundary);
  if (obstacle_nodes.empty()) throw InvalidArgument("envelope needs a field with an obstacle boundary");

  std::optional<SolutionField> best;
  for (const double radius : radii) {
    auto domain = std::make_shared<const Domain>(build_matching_ball(ud, radius));

    BoundaryCondition bc;
    bc.values.assign(domain->size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto i : domain->nodes_of(NodeClass::OuterBoundary)) {
      const auto j = ud.find(domain->lattice(i));
      if (!j || ud.classification(*j) == NodeClass::Excluded)
        throw RadiusOutOfDomain("envelope radius exceeds the field's domain");
      bc.values[i] = u.values[*j];
    }
    SolutionField w = solve_dirichlet(domain, bc, opts);

    // Shift so the envelope touches u on the obstacle boundary.
    double gap_hi = -std::numeric_limits<double>::infinity();
    double gap_lo = std::numeric_limits<double>::infinity();
    for (const auto i : obstacle_nodes) {
      const auto j = domain->find(ud.lattice(i));
      const double diff = w.values[*j] - u.values[i];
      gap_hi = std::max(gap_hi, diff);
      gap_lo = std::min(gap_lo, diff);
    }
    const double shift = side == EnvelopeSide::Below ? gap_hi : gap_lo;
    if (side == EnvelopeSide::Below ? shift < 0.0 : shift > 0.0) continue;
    for (auto& v : w.values) v -= shift;

    // One-sided bound on every node shared with u.
    const double slack = 10.0 * opts.tol;
    for (std::size_t i = 0; i < domain->size(); ++i) {
      const auto j = ud.find(domain->lattice(i));
      if (!j || ud.classification(*j) == NodeClass::Excluded) continue;
      const double excess = side == EnvelopeSide::Below ? w.values[i] - u.values[*j] : u.values[*j] - w.values[i];
      if (excess > slack)
        throw EnvelopeViolation("envelope crosses the field by " + std::to_string(excess) + " at radius " +
                                std::to_string(radius));
    }
    best = std::move(w);
  }
  if (!best) throw EnvelopeViolation("no envelope radius admits the requested side");
  return *best;
}

}  // namespace ihf
