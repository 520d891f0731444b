#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ihf/verify.hpp"

// Deliberately shares nothing with the fast path beyond node classes: its own
// direction list, width rule, map-based lookup and all-pairs update.

namespace ihf {

namespace {

struct Direction {
  Lattice step;
  int shell;
  double length;
};

std::vector<Direction> directions(int dim, int width) {
  std::vector<Direction> out;
  const int zr = dim == 3 ? width : 0;
  for (int a = -width; a <= width; ++a)
    for (int b = -width; b <= width; ++b)
      for (int c = -zr; c <= zr; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        if (std::gcd(std::gcd(std::abs(a), std::abs(b)), std::abs(c)) != 1) continue;
        const int shell = std::max({std::abs(a), std::abs(b), std::abs(c)});
        out.push_back({{a, b, c}, shell, std::sqrt(static_cast<double>(a * a + b * b + c * c))});
      }
  return out;
}

struct OracleNode {
  std::size_t index;
  std::vector<std::size_t> nbr;
  std::vector<double> len;
};

}  // namespace

SolutionField oracle_solve(DomainPtr domain, const BoundaryCondition& bc) {
  const Domain& d = *domain;
  if (d.size() > kOracleMaxNodes) throw InvalidArgument("oracle is limited to 2500 nodes");
  bc.validate(d);

  std::map<Lattice, std::size_t> where;
  for (std::size_t i = 0; i < d.size(); ++i) where.emplace(d.lattice(i), i);
  const auto dirs = directions(d.dimension(), d.spec().stencil_width);
  auto at = [&](const Lattice& l, const Lattice& s) -> std::optional<std::size_t> {
    const auto it = where.find({l[0] + s[0], l[1] + s[1], l[2] + s[2]});
    if (it == where.end() || d.classification(it->second) == NodeClass::Excluded) return std::nullopt;
    return it->second;
  };

  std::vector<OracleNode> nodes;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.classification(i) != NodeClass::Interior) continue;
    int w = 0;
    for (int cand = 1; cand <= d.spec().stencil_width; ++cand) {
      bool ok = true;
      for (const auto& dir : dirs)
        if (dir.shell <= cand && !at(d.lattice(i), dir.step)) ok = false;
      if (!ok) break;
      w = cand;
    }
    if (w == 0) throw InvalidArgument("interior node without a live unit stencil");
    OracleNode n{i, {}, {}};
    for (const auto& dir : dirs)
      if (dir.shell <= w) {
        n.nbr.push_back(*at(d.lattice(i), dir.step));
        n.len.push_back(dir.length);
      }
    nodes.push_back(std::move(n));
  }

  SolutionField f;
  f.domain = domain;
  f.tolerance = kOracleStop;
  f.values.assign(d.size(), std::numeric_limits<double>::quiet_NaN());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (d.is_boundary(i)) {
      f.values[i] = bc.values[i];
      lo = std::min(lo, bc.values[i]);
      hi = std::max(hi, bc.values[i]);
    }
  for (const auto& n : nodes) f.values[n.index] = 0.5 * (lo + hi);

  std::vector<double> next = f.values;
  double delta = std::numeric_limits<double>::infinity();
  while (delta >= kOracleStop) {
    if (f.iterations == kOracleMaxIter)
      throw NotConverged(kOracleMaxIter, delta, std::make_shared<const SolutionField>(f));
    ++f.iterations;
    delta = 0.0;
    for (const auto& n : nodes) {
      // t = max_j min_k of the point where the slopes towards u_j and u_k balance.
      double t = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n.nbr.size(); ++j) {
        double inner = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n.nbr.size(); ++k) {
          const double v = (n.len[k] * f.values[n.nbr[j]] + n.len[j] * f.values[n.nbr[k]]) / (n.len[j] + n.len[k]);
          inner = std::min(inner, v);
        }
        t = std::max(t, inner);
      }
      next[n.index] = t;
      delta = std::max(delta, std::abs(t - f.values[n.index]));
    }
    f.values.swap(next);
  }
  f.last_update = delta;
  f.converged = true;
  f.residual_max = residual_max(d, f.values, Backend::Serial);
  return f;
}

}  // namespace ihf
