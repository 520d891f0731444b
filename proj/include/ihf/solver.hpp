#pragma once

#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "ihf/grid.hpp"

namespace ihf {

using ScalarFn = std::function<double(const Point&)>;

namespace forms {
ScalarFn constant(double c);
// a . x + b
ScalarFn linear(const Point& a, double b = 0.0);
// alpha |x| + beta
ScalarFn radial(double alpha, double beta);
}  // namespace forms

// Dirichlet data indexed by node; entries off the boundary are NaN.
struct BoundaryCondition {
  std::vector<double> values;

  // Throws InvalidArgument unless every boundary node of d carries exactly
  // one finite value.
  void validate(const Domain& d) const;
};

BoundaryCondition make_boundary(const Domain& d, const ScalarFn& obstacle_data, const ScalarFn& outer_data);

struct Cone {
  double slope = 0.0;
  bool operator==(const Cone&) const = default;
};

struct Plane {
  Point direction{};
  bool operator==(const Plane&) const = default;
};

// Which constant anchors the far-field datum: c+ reproduces the exhaustion
// construction; the others are for non-uniqueness probes.
enum class Anchor { CPlus, CMinus, Midpoint };

struct FarFieldSpec {
  std::variant<Cone, Plane> shape = Cone{};
  Anchor anchor = Anchor::CPlus;

  // lambda |x| or a . x
  double profile(const Point& x) const;
  void validate() const;
  bool operator==(const FarFieldSpec&) const = default;
};

struct FarFieldAnchors {
  double c_plus = 0.0;   // max over obstacle boundary of g - profile
  double c_minus = 0.0;  // min over obstacle boundary of g - profile
  double chosen = 0.0;
};

FarFieldAnchors far_field_anchors(const Domain& d, const ScalarFn& g, const FarFieldSpec& far);

enum class SweepOrder { Colored, Jacobi };
enum class Backend { Parallel, Serial };

enum class StopRule {
  // max |update| < tol
  Update,
  // max |update| < tol and the geometric tail bound update * q / (1 - q)
  // < tol, q the contraction rate measured over the last sweeps
  ErrorBound,
};

struct SolveOptions {
  double tol = 1e-8;
  StopRule stop = StopRule::ErrorBound;
  long max_iter = 5'000'000;
  SweepOrder order = SweepOrder::Colored;
  Backend backend = Backend::Parallel;
  // When false a solve that hits max_iter returns the partial field with
  // converged == false instead of throwing.
  bool throw_on_failure = true;
};

struct SolutionField {
  DomainPtr domain;
  std::vector<double> values;
  // max |T(u) - u| over interior nodes, T the local midrange update
  double residual_max = 0.0;
  long iterations = 0;
  double tolerance = 0.0;
  double last_update = 0.0;
  bool converged = false;

  const Domain& grid() const { return *domain; }
  double operator[](std::size_t i) const { return values[i]; }
};

class NotConverged : public Error {
 public:
  NotConverged(long max_iter, double last_update, std::shared_ptr<const SolutionField> partial);
  long max_iter() const { return max_iter_; }
  double last_update() const { return last_update_; }
  const std::shared_ptr<const SolutionField>& partial() const { return partial_; }

 private:
  long max_iter_;
  double last_update_;
  std::shared_ptr<const SolutionField> partial_;
};

// Slope-form discrete infinity Laplacian at an interior node:
//   (S+ - S-) * 2 / (l+ + l-),
// S+ = max_j (u_j - u) / l_j, S- = max_k (u - u_k) / l_k, l+- the lengths of
// the maximising offsets. With equal lengths rho this is
// (max u_j + min u_j - 2u) / rho^2.
double discrete_inf_laplacian(const SolutionField& field, std::size_t node);

double residual_max(const Domain& d, std::span<const double> values, Backend backend = Backend::Parallel);

// Iterates u <- T(u) on interior nodes until the max update drops below
// opts.tol. Boundary values are copied from bc and never touched. Without
// init the interior starts at the midpoint of the boundary range.
SolutionField solve_dirichlet(DomainPtr domain, const BoundaryCondition& bc, const SolveOptions& opts = {},
                              std::span<const double> init = {});

struct Annulus {
  double inner = 1.5;
  double outer = 3.0;
  bool contains(double r) const { return r >= inner - 1e-12 && r <= outer + 1e-12; }
  bool operator==(const Annulus&) const = default;
};

struct StageSummary {
  double radius = 0.0;
  long iterations = 0;
  double residual_max = 0.0;
  double last_update = 0.0;
};

struct ExhaustionLog {
  std::vector<StageSummary> stages;
  std::vector<Lattice> monitor_nodes;
  // Field values on monitor_nodes after each stage.
  std::vector<std::vector<double>> monitor_values;
  // sup over the monitor of |u_{k+1} - u_k|, one per consecutive pair.
  std::vector<double> sup_differences;
  FarFieldAnchors anchors;
  bool converged = false;
};

struct ExteriorOptions {
  SolveOptions solve;
  // Exhaustion converges once the last sup-difference on the monitor falls
  // below this.
  double stage_tol = 1e-4;
  bool warm_start = true;
};

struct ExteriorResult {
  SolutionField field;
  ExhaustionLog log;
};

// Solves on B_{R_k} \ A for each radius of the schedule with u = g on the
// obstacle boundary and u = anchor + profile on the outer boundary.
// Non-convergence of the exhaustion is reported through log.converged.
ExteriorResult solve_exterior(const GridSpec& base, const ScalarFn& g, const FarFieldSpec& far,
                              std::span<const double> schedule, const Annulus& monitor,
                              const ExteriorOptions& opts = {});

enum class EnvelopeSide { Below, Above };

// Entire discrete solution on B_k (obstacle ignored) with data u on the
// outer boundary, shifted to touch u from below (or above) on the obstacle
// boundary. Stages whose shift would lift the envelope over u on the
// outer boundary are skipped; the last admissible stage is returned.
SolutionField entire_envelope(const SolutionField& u, std::span<const double> radii, EnvelopeSide side,
                              const SolveOptions& opts = {});

}  // namespace ihf
