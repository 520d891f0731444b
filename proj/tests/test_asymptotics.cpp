#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "ihf/asymptotics.hpp"
#include "support.hpp"

using namespace ihf;
using ihf::test::field_from;
using ihf::test::spec2;

namespace {

const std::vector<double> kRadii{1.5, 2.5, 4.0, 6.0, 8.0};
constexpr double kH = 0.1;

DomainPtr exterior_grid() {
  static const auto d = make_domain(spec2(kH, 10.0, 3));
  return d;
}

// |x| - 1 off the obstacle, 0 on the obstacle boundary (g = 0 there).
SolutionField cone_field() {
  auto u = field_from(exterior_grid(), forms::radial(1.0, -1.0));
  for (auto i : u.grid().nodes_of(NodeClass::ObstacleBoundary)) u.values[i] = 0.0;
  return u;
}

std::vector<BlowDownFit> fits_of(const SolutionField& u) {
  return {blow_down(u, 2.5), blow_down(u, 5.0)};
}

}  // namespace

TEST_CASE("profile of the cone") {
  const auto p = slope_profile(cone_field(), kRadii);
  CHECK(p.m_plus == 0.0);
  CHECK(p.m_minus == 0.0);
  REQUIRE(p.samples.size() == kRadii.size());
  for (const auto& s : p.samples) {
    CHECK(std::abs(s.s_plus - (s.radius - 1.0) / s.radius) <= kH / s.radius + 1e-12);
    CHECK(s.s_minus == 0.0);
  }
  CHECK(p.s_inf_plus == p.samples.back().s_plus);
  CHECK(p.s_inf == std::max(p.s_inf_plus, p.s_inf_minus));
  CHECK(p.tail_slope_plus == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.monotonicity_violations().empty());
  CHECK(p.eps_mono() == doctest::Approx(5 * kH / 1.5));
}

TEST_CASE("profile of a constant") {
  const auto p = slope_profile(field_from(exterior_grid(), forms::constant(3.0)), kRadii);
  for (const auto& s : p.samples) {
    CHECK(s.s_plus == 0.0);
    CHECK(s.s_minus == 0.0);
    CHECK(s.lip_exterior == 0.0);
  }
  CHECK(p.s_inf == 0.0);
}

TEST_CASE("profile of a plane") {
  const auto u = field_from(exterior_grid(), forms::linear({1, 0, 0}));
  const auto p = slope_profile(u, kRadii);
  const double edge = 1.0 + std::sqrt(2.0) * kH;
  CHECK(p.m_plus > 1.0);
  CHECK(p.m_plus <= edge);
  CHECK(p.m_minus < -1.0);
  CHECK(p.m_minus >= -edge);
  for (const auto& s : p.samples) {
    CHECK(std::abs(s.s_plus - (s.radius - 1.0) / s.radius) <= 2.5 * kH / s.radius);
    CHECK(std::abs(s.s_minus - (s.radius - 1.0) / s.radius) <= 2.5 * kH / s.radius);
    // |x1 - y1| <= |x - y| with equality along the axis.
    CHECK(s.lip_exterior == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("squeeze") {
  const auto d = exterior_grid();
  for (const auto& f : std::vector<ScalarFn>{forms::radial(0.5, 0.0), forms::linear({0.6, -0.8, 0}),
                                             [](const Point& x) { return std::sin(x[0]) + 0.2 * x[1]; }}) {
    const auto p = slope_profile(field_from(d, f), kRadii);
    CHECK(p.s_inf <= p.samples.back().lip_exterior + 1e-12);
    CHECK(p.samples.back().lip_exterior <= p.samples.front().lip_exterior);
    for (std::size_t k = 1; k < p.samples.size(); ++k)
      CHECK(p.samples[k].lip_exterior <= p.samples[k - 1].lip_exterior);
  }
}

TEST_CASE("lip_exterior against all pairs") {
  const auto d = make_domain(spec2(0.25, 4.0, 2));
  const ScalarFn f = [](const Point& x) { return std::sin(2 * x[0]) * std::cos(x[1]); };
  const auto u = field_from(d, f);
  const std::vector<double> radii{1.5, 2.0, 3.0};
  const auto p = slope_profile(u, radii);
  for (std::size_t k = 0; k < radii.size(); ++k) {
    double best = 0;
    for (std::size_t i = 0; i < d->size(); ++i) {
      if (d->classification(i) == NodeClass::Excluded || d->radius(i) < radii[k]) continue;
      for (std::size_t j = i + 1; j < d->size(); ++j) {
        if (d->classification(j) == NodeClass::Excluded || d->radius(j) < radii[k]) continue;
        best = std::max(best, std::abs(u[i] - u[j]) / distance(d->point(i), d->point(j)));
      }
    }
    // Few enough nodes that the subsample is the whole set.
    CHECK(p.samples[k].lip_exterior == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("radius outside the domain") {
  CHECK_THROWS_AS(slope_profile(cone_field(), std::vector<double>{2.0, 11.0}), RadiusOutOfDomain);
  CHECK_THROWS_AS(blow_down(cone_field(), 6.0), RadiusOutOfDomain);
}

TEST_CASE("blow-down of a plane") {
  const Point a{0.6, -0.8, 0};
  const auto u = field_from(exterior_grid(), forms::linear(a));
  for (double r : {2.5, 5.0}) {
    const auto fit = blow_down(u, r);
    // Nearest-node lookup moves each sample by at most h / sqrt(2).
    CHECK(fit.plane_error <= kH / r);
    CHECK(distance(fit.plane, a) <= kH / r);
    CHECK(fit.cone_error > 0.5);
  }
}

TEST_CASE("blow-down of the cone") {
  const auto d = make_domain(spec2(kH, 20.0, 3));
  const auto u = field_from(d, forms::radial(1.0, -1.0));
  const auto fit = blow_down(u, 10.0);
  CHECK(fit.cone_sign == 1);
  CHECK(fit.cone_error <= 0.1 + kH);
  CHECK(fit.cone_error >= 0.0);
  CHECK(fit.plane_error >= 0.25);
  double err = 0;
  for (std::size_t k = 0; k < fit.samples.size(); ++k)
    err = std::max(err, std::abs(fit.values[k] - (norm(fit.samples[k]) - 0.1)));
  CHECK(err <= kH / 10.0);
}

TEST_CASE("blow-down of a bounded field") {
  const ScalarFn f = [](const Point& x) { return std::cos(x[0]) * std::sin(x[1]); };
  const auto fit = blow_down(field_from(exterior_grid(), f), 5.0);
  CHECK(norm(fit.plane) <= 0.2);
  CHECK(fit.cone_slope <= 0.2);
}

TEST_CASE("fit errors are minimax") {
  // Lawson refinement must never do worse than the least-squares fit it
  // starts from.
  const ScalarFn f = [](const Point& x) { return x[0] + 0.3 * std::abs(x[1]); };
  const auto fit = blow_down(field_from(exterior_grid(), f), 4.0);
  const auto n = fit.samples.size();
  double sxx = 0, sxy = 0, syy = 0, sxv = 0, syv = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& y = fit.samples[k];
    sxx += y[0] * y[0], sxy += y[0] * y[1], syy += y[1] * y[1];
    sxv += y[0] * fit.values[k], syv += y[1] * fit.values[k];
  }
  const double det = sxx * syy - sxy * sxy;
  const double a0 = (sxv * syy - syv * sxy) / det, a1 = (syv * sxx - sxv * sxy) / det;
  double ls = 0;
  for (std::size_t k = 0; k < n; ++k)
    ls = std::max(ls, std::abs(fit.values[k] - a0 * fit.samples[k][0] - a1 * fit.samples[k][1]));
  CHECK(fit.plane_error <= ls + 1e-12);
  double sup = 0;
  for (std::size_t k = 0; k < n; ++k)
    sup = std::max(sup, std::abs(fit.values[k] - dot(fit.plane, fit.samples[k])));
  CHECK(fit.plane_error == doctest::Approx(sup).epsilon(1e-12));
}

TEST_CASE("annulus samples") {
  const auto s2 = annulus_samples(2, {0.5, 2.0});
  CHECK(s2.size() == 8 * 64);
  const auto s3 = annulus_samples(3, {0.5, 2.0});
  CHECK(s3.size() == 6 * 128);
  for (const auto* s : {&s2, &s3})
    for (const auto& y : *s) {
      CHECK(norm(y) >= 0.5 - 1e-12);
      CHECK(norm(y) <= 2.0 + 1e-12);
    }
}

TEST_CASE("classification of the canonical fields") {
  const auto zero = field_from(exterior_grid(), forms::constant(0.0));
  CHECK(classify(slope_profile(zero, kRadii), fits_of(zero)).kind == AsymptoticKind::Bounded);

  const auto cone = cone_field();
  const auto c = classify(slope_profile(cone, kRadii), fits_of(cone));
  CHECK(c.kind == AsymptoticKind::ConeUp);
  CHECK(c.slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(c.margin > c.eps_class);

  auto down = cone;
  for (auto& v : down.values) v = -v;
  const auto cd = classify(slope_profile(down, kRadii), fits_of(down));
  CHECK(cd.kind == AsymptoticKind::ConeDown);
  CHECK(cd.slope == doctest::Approx(1.0).epsilon(0.05));

  const auto plane = field_from(exterior_grid(), forms::linear({1, 0, 0}));
  const auto fits = fits_of(plane);
  const auto pp = slope_profile(plane, kRadii);
  const auto p = classify(pp, fits);
  CHECK(p.kind == AsymptoticKind::Plane);
  CHECK(distance(p.direction, Point{1, 0, 0}) <= kH);
  // S_inf at r = 8 still carries the m+/r offset; the tail secant does not.
  CHECK(std::abs(norm(p.direction) - std::max(pp.tail_slope_plus, pp.tail_slope_minus)) <= p.eps_class);
  CHECK(p.plane_errors.back() <= kH);
}

TEST_CASE("classification preconditions and inconclusive planes") {
  const auto plane = field_from(exterior_grid(), forms::linear({1, 0, 0}));
  const auto profile = slope_profile(plane, kRadii);
  const auto fits = fits_of(plane);
  CHECK_THROWS_AS(classify(slope_profile(plane, std::vector<double>{2, 4}), fits), InvalidArgument);
  CHECK_THROWS_AS(classify(profile, std::vector<BlowDownFit>{fits[0]}), InvalidArgument);
  CHECK_THROWS_AS(classify(profile, std::vector<BlowDownFit>{fits[1], fits[0]}), InvalidArgument);
  auto growing = fits;
  growing[1].plane_error = growing[0].plane_error + 1.0;
  CHECK_THROWS_AS(classify(profile, growing), Inconclusive);
}

TEST_CASE("scaling equivariance") {
  const ScalarFn f = [](const Point& x) { return 0.7 * x[0] + std::sin(x[1]) + 0.2 * norm(x); };
  const auto u = field_from(exterior_grid(), f);
  for (double t : {2.0, 0.5, 3.0}) {
    auto v = u;
    for (auto& x : v.values) x *= t;
    const auto pu = slope_profile(u, kRadii), pv = slope_profile(v, kRadii);
    for (std::size_t k = 0; k < kRadii.size(); ++k) {
      CHECK(pv.samples[k].s_plus == doctest::Approx(t * pu.samples[k].s_plus).epsilon(1e-12));
      CHECK(pv.samples[k].s_minus == doctest::Approx(t * pu.samples[k].s_minus).epsilon(1e-12));
      CHECK(pv.samples[k].lip_exterior == doctest::Approx(t * pu.samples[k].lip_exterior).epsilon(1e-12));
    }
    CHECK(pv.s_inf == doctest::Approx(t * pu.s_inf).epsilon(1e-12));
    const auto fu = fits_of(u), fv = fits_of(v);
    for (std::size_t k = 0; k < fu.size(); ++k) {
      CHECK(fv[k].cone_slope == doctest::Approx(t * fu[k].cone_slope).epsilon(1e-9));
      CHECK(fv[k].plane_error == doctest::Approx(t * fu[k].plane_error).epsilon(1e-9));
      for (int a = 0; a < 2; ++a) CHECK(fv[k].plane[a] == doctest::Approx(t * fu[k].plane[a]).epsilon(1e-9));
    }
  }
}

TEST_CASE("classification is scale invariant") {
  for (const auto& u : {cone_field(), field_from(exterior_grid(), forms::linear({0, 1, 0}))}) {
    const auto base = classify(slope_profile(u, kRadii), fits_of(u));
    for (double t : {0.5, 4.0}) {
      auto v = u;
      for (auto& x : v.values) x *= t;
      const auto c = classify(slope_profile(v, kRadii), fits_of(v));
      CHECK(c.kind == base.kind);
      if (c.kind == AsymptoticKind::Plane)
        for (int a = 0; a < 2; ++a) CHECK(c.direction[a] == doctest::Approx(t * base.direction[a]).epsilon(1e-9));
    }
  }
}

TEST_CASE("blow-down linearity diagnostic") {
  const auto plane = field_from(exterior_grid(), forms::linear({1, 0, 0}));
  const auto pf = blow_down(plane, 5.0);
  const auto dp = check_blow_down_linearity(pf, 1.0, 0.05);
  CHECK(dp.consistent);
  CHECK(dp.branch == "plane");
  CHECK(dp.plane_error <= kH / 5.0);
  CHECK(dp.slope_ratio == doctest::Approx(1.0).epsilon(0.05));

  const auto cf = blow_down(cone_field(), 5.0);
  const auto dc = check_blow_down_linearity(cf, 1.0, 0.25);
  CHECK(dc.consistent);
  CHECK(dc.branch == "cone");

  // Uniform noise of amplitude 1 after rescaling.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto noise = field_from(exterior_grid(), forms::constant(0.0));
  for (std::size_t i = 0; i < noise.values.size(); ++i)
    if (noise.grid().classification(i) != NodeClass::Excluded) noise.values[i] = 5.0 * U(rng);
  const auto nf = blow_down(noise, 5.0);
  CHECK(nf.plane_error > 0.5);
  CHECK(nf.cone_error > 0.5);
  const auto dn = check_blow_down_linearity(nf, 1.0, 0.25);
  CHECK(!dn.consistent);
  CHECK(dn.branch == "none");
}
