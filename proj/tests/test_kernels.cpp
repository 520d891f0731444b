#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <omp.h>

#include <cstring>
#include <random>

#include "ihf/kernels.hpp"
#include "support.hpp"

using namespace ihf;
using ihf::test::spec2;

namespace {

std::vector<double> random_field(const Domain& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> u(d.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.classification(i) != NodeClass::Excluded) u[i] = U(rng);
  return u;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Brute force over neighbour pairs: the largest balance point
//   (l_k u_j + l_j u_k) / (l_j + l_k)
// minimised over the descent neighbour k for each ascent neighbour j.
double pairwise_midrange(const Domain& d, std::size_t k, const std::vector<double>& u) {
  const auto nbr = d.neighbors(k);
  const auto& l0 = d.lattice(d.interior()[k]);
  double best = -std::numeric_limits<double>::infinity();
  for (auto j : nbr) {
    const auto& lj = d.lattice(j);
    const double a = ihf::test::lattice_length({lj[0] - l0[0], lj[1] - l0[1], lj[2] - l0[2]});
    double worst = std::numeric_limits<double>::infinity();
    for (auto i : nbr) {
      const auto& li = d.lattice(i);
      const double b = ihf::test::lattice_length({li[0] - l0[0], li[1] - l0[1], li[2] - l0[2]});
      worst = std::min(worst, (b * u[j] + a * u[i]) / (a + b));
    }
    best = std::max(best, worst);
  }
  return best;
}

}  // namespace

TEST_CASE("local midrange balances ascent and descent slopes") {
  const auto d = build_domain(spec2(0.1, 2.0, 3));
  const auto u = random_field(d, 7);
  const auto& st = d.stencil();
  for (std::size_t k = 0; k < d.interior().size(); k += 7) {
    const double t = kernels::local_midrange(d, k, u.data());
    CHECK(t == doctest::Approx(pairwise_midrange(d, k, u)).epsilon(1e-12));
    const auto nbr = d.neighbors(k);
    double up = -1e300, down = -1e300;
    for (std::size_t o = 0; o < nbr.size(); ++o) {
      up = std::max(up, (u[nbr[o]] - t) / st.lengths[o]);
      down = std::max(down, (t - u[nbr[o]]) / st.lengths[o]);
    }
    CHECK(up == doctest::Approx(down).epsilon(1e-10));
  }
}

TEST_CASE("local midrange with equal lengths is the plain midrange") {
  // Width-1 nodes of a 1-wide box see both axis and diagonal offsets; make
  // only the axis values matter by pushing the diagonals to the middle.
  const auto d = build_domain(spec2(0.25, 1.5, 1, NoObstacle{}, OuterShape::Box));
  std::vector<double> u(d.size(), 0.0);
  const std::size_t k = 0;
  const auto nbr = d.neighbors(k);
  const double axis[4] = {3.0, -1.0, 0.5, 2.0};
  int a = 0;
  for (std::size_t o = 0; o < nbr.size(); ++o)
    u[nbr[o]] = d.stencil().lengths[o] == 1.0 ? axis[a++] : 1.0;
  CHECK(kernels::local_midrange(d, k, u.data()) == doctest::Approx(1.0));
}

TEST_CASE("serial and parallel kernels agree bit for bit") {
  omp_set_num_threads(4);
  for (const auto& spec : {spec2(0.1, 3.0, 3), spec2(0.05, 2.0, 2, NoObstacle{}, OuterShape::Box)}) {
    const auto d = build_domain(spec);
    auto a = random_field(d, 11);
    auto b = a;
    for (int s = 0; s < 5; ++s) {
      const double da = kernels::serial::colored_sweep(d, a);
      const double db = kernels::omp::colored_sweep(d, b);
      CHECK(da == db);
      CHECK(bit_equal(a, b));
    }
    const auto in = random_field(d, 12);
    auto oa = in, ob = in;
    CHECK(kernels::serial::jacobi_sweep(d, in, oa) == kernels::omp::jacobi_sweep(d, in, ob));
    CHECK(bit_equal(oa, ob));
    CHECK(kernels::serial::residual_max(d, in) == kernels::omp::residual_max(d, in));
  }
}

TEST_CASE("jacobi sweep only writes interior nodes") {
  const auto d = build_domain(spec2(0.2, 2.0, 2));
  const auto in = random_field(d, 3);
  auto out = in;
  kernels::serial::jacobi_sweep(d, in, out);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.interior_slot(i) >= 0) {
      CHECK(out[i] == kernels::local_midrange(d, d.interior_slot(i), in.data()));
    } else if (d.classification(i) != NodeClass::Excluded) {
      CHECK(out[i] == in[i]);
    }
  }
}
