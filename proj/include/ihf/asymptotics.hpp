#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ihf/solver.hpp"

namespace ihf {

struct SlopeSample {
  double radius = 0.0;
  double s_plus = 0.0;
  double s_minus = 0.0;
  // Lipschitz constant of u over the nodes with |x| >= radius
  double lip_exterior = 0.0;
  // extremes of u over the discrete sphere |x| in [r - h, r + h]
  double sphere_max = 0.0;
  double sphere_min = 0.0;
};

struct SlopeProfile {
  double m_plus = 0.0;
  double m_minus = 0.0;
  std::vector<SlopeSample> samples;
  // Values at the largest sampled radius.
  double s_inf_plus = 0.0;
  double s_inf_minus = 0.0;
  double s_inf = 0.0;
  // Secant growth of max(sphere max, m+) and min(sphere min, m-) between the
  // first radius >= half the largest and the largest one. These converge to
  // S+ and S- without the m+-/r bias of the value at a finite radius.
  double tail_slope_plus = 0.0;
  double tail_slope_minus = 0.0;
  double spacing = 0.0;

  // 5h / r_min
  double eps_mono() const;
  // Descriptions of every sample pair breaking monotonicity by more than
  // eps_mono: S+- must not decrease, lip_exterior must not increase.
  std::vector<std::string> monotonicity_violations() const;
};

struct ProfileOptions {
  // Upper bound on the stride subsample used for far-apart pairs.
  std::size_t subsample = 4096;
};

SlopeProfile slope_profile(const SolutionField& u, std::span<const double> radii, const ProfileOptions& opts = {});

struct BlowDownFit {
  double r_k = 0.0;
  Annulus annulus{0.5, 2.0};
  std::vector<Point> samples;  // reference annulus points y
  std::vector<double> values;  // v_k(y) = u(r_k y) / r_k
  Point plane{};               // least-squares a in v ~ a . y
  double plane_error = 0.0;    // sup |v - a . y|
  double cone_slope = 0.0;     // |s| in v ~ s |y|
  int cone_sign = 1;
  double cone_error = 0.0;     // sup |v - s |y||
};

BlowDownFit blow_down(const SolutionField& u, double r_k, const Annulus& annulus = {0.5, 2.0});

// Reference points of the blow-down annulus: 8 radii x 64 angles in 2D,
// 6 radii x 128 Fibonacci directions in 3D.
std::vector<Point> annulus_samples(int dimension, const Annulus& annulus);

enum class AsymptoticKind { Bounded, ConeUp, ConeDown, Plane };

const char* to_string(AsymptoticKind k);

struct AsymptoticClass {
  AsymptoticKind kind = AsymptoticKind::Bounded;
  double slope = 0.0;     // ConeUp / ConeDown
  Point direction{};      // Plane
  double eps_class = 0.0;
  double s_inf_plus = 0.0;
  double s_inf_minus = 0.0;
  double s_inf = 0.0;
  // S+ - S-: positive for ConeUp, negative for ConeDown
  double margin = 0.0;
  std::vector<double> plane_errors;
};

class Inconclusive : public Error {
 public:
  using Error::Error;
};

inline double default_eps_class(double s_inf) { return 0.05 * std::max(1.0, s_inf); }

// Bounded if S_inf < eps; ConeUp if S+ - S- > eps; ConeDown if S- - S+ > eps;
// otherwise Plane with the direction of the largest-radius fit, provided the
// plane-fit errors do not grow across the fits (Inconclusive otherwise).
AsymptoticClass classify(const SlopeProfile& profile, std::span<const BlowDownFit> fits,
                         std::optional<double> eps_class = std::nullopt);

struct LinearityDiagnostic {
  bool consistent = true;
  // "plane", "cone" or "none"
  std::string branch;
  double plane_error = 0.0;
  double cone_error = 0.0;
  // |a| / lip
  double slope_ratio = 0.0;
};

// A blow-down must be close to a plane or a cone; a fit farther than tol from
// both is flagged as inconsistent.
LinearityDiagnostic check_blow_down_linearity(const BlowDownFit& fit, double lip, double tol);

}  // namespace ihf
