#include "ihf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace ihf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool live(const Domain& d, std::size_t i) { return d.classification(i) != NodeClass::Excluded; }

std::string describe(const Box& b, int dim) {
  std::ostringstream s;
  s << "box [";
  for (int a = 0; a < dim; ++a) s << (a ? "," : "") << b.lo[a];
  s << "]..[";
  for (int a = 0; a < dim; ++a) s << (a ? "," : "") << b.hi[a];
  s << "]";
  return s.str();
}

// Nodes of a box split into discrete boundary and interior; empty when the
// box is not made of interior nodes of the domain.
struct BoxNodes {
  std::vector<std::size_t> boundary;
  std::vector<std::size_t> interior;
  bool valid = true;
};

BoxNodes split_box(const Domain& d, const Box& b) {
  BoxNodes out;
  const int dim = d.dimension();
  Lattice l{};
  const int zlo = dim == 3 ? b.lo[2] : 0, zhi = dim == 3 ? b.hi[2] : 0;
  for (l[2] = zlo; l[2] <= zhi; ++l[2])
    for (l[1] = b.lo[1]; l[1] <= b.hi[1]; ++l[1])
      for (l[0] = b.lo[0]; l[0] <= b.hi[0]; ++l[0]) {
        const auto i = d.find(l);
        if (!i || d.classification(*i) != NodeClass::Interior) {
          out.valid = false;
          return out;
        }
        bool inside = true;
        for (const auto j : d.neighbors(static_cast<std::size_t>(d.interior_slot(*i))))
          if (!b.contains(d.lattice(static_cast<std::size_t>(j)))) {
            inside = false;
            break;
          }
        (inside ? out.interior : out.boundary).push_back(*i);
      }
  return out;
}

std::vector<ViolationRecord> ccp_one_box(const SolutionField& u, const Box& box, const BoxNodes& nodes, double tol,
                                         const StencilMetric* metric) {
  const Domain& d = u.grid();
  std::vector<std::size_t> all = nodes.boundary;
  all.insert(all.end(), nodes.interior.begin(), nodes.interior.end());
  std::vector<Point> pts;
  for (const auto i : all) pts.push_back(d.point(i));
  const double h = d.spacing();
  auto dist = [&](std::size_t a, std::size_t b) {
    if (!metric) return distance(pts[a], pts[b]);
    const auto& la = d.lattice(all[a]);
    const auto& lb = d.lattice(all[b]);
    return h * (*metric)({la[0] - lb[0], la[1] - lb[1], la[2] - lb[2]});
  };
  const std::size_t nb = nodes.boundary.size();

  // Best excess per interior node for the above- and below-checks, with the
  // vertex and the boundary node fixing the slope of the offending cone.
  struct Worst {
    double excess = 0.0;
    ConeFunction cone;
    std::size_t vertex = 0;
    std::size_t pivot = 0;
  };
  std::vector<Worst> above(nodes.interior.size()), below(nodes.interior.size());
  for (std::size_t v = 0; v < all.size(); ++v) {
    const double u0 = u[all[v]];
    double a_hi = -kInf, a_lo = kInf;
    std::size_t b_hi = 0, b_lo = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      if (b == v) continue;
      const double slope = (u[all[b]] - u0) / dist(b, v);
      if (slope > a_hi) a_hi = slope, b_hi = b;
      if (slope < a_lo) a_lo = slope, b_lo = b;
    }
    for (std::size_t k = 0; k < nodes.interior.size(); ++k) {
      const std::size_t n = nb + k;
      if (n == v) continue;
      const double val = u[all[n]];
      const double r = dist(n, v);
      const double up = val - (u0 + a_hi * r);
      if (up > tol && up > above[k].excess) above[k] = {up, {a_hi, pts[v], u0}, all[v], all[b_hi]};
      const double down = u0 + a_lo * r - val;
      if (down > tol && down > below[k].excess) below[k] = {down, {a_lo, pts[v], u0}, all[v], all[b_lo]};
    }
  }
  std::vector<ViolationRecord> out;
  const std::string where = describe(box, d.dimension()) + (metric ? ", stencil metric" : ", euclidean metric");
  for (std::size_t k = 0; k < nodes.interior.size(); ++k) {
    const std::size_t n = nodes.interior[k];
    if (above[k].excess > 0.0)
      out.push_back({ViolationKind::CcpAbove, {n, above[k].vertex, above[k].pivot}, above[k].excess, where,
                     above[k].cone, box});
    if (below[k].excess > 0.0)
      out.push_back({ViolationKind::CcpBelow, {n, below[k].vertex, below[k].pivot}, below[k].excess, where,
                     below[k].cone, box});
  }
  return out;
}

bool same_problem(const GridSpec& a, const GridSpec& b) {
  return a.dimension == b.dimension && a.spacing == b.spacing && a.stencil_width == b.stencil_width &&
         a.obstacle == b.obstacle;
}

}  // namespace

const char* to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::CcpAbove:
      return "CCP-above";
    case ViolationKind::CcpBelow:
      return "CCP-below";
    case ViolationKind::Comparison:
      return "Comparison";
    case ViolationKind::Envelope:
      return "Envelope";
    case ViolationKind::Extremal:
      return "Extremal";
    case ViolationKind::Reflection:
      return "Reflection";
  }
  return "?";
}

bool Box::contains(const Lattice& l) const {
  for (int a = 0; a < kMaxDim; ++a)
    if (l[a] < lo[a] || l[a] > hi[a]) return false;
  return true;
}

std::vector<Box> dyadic_boxes(const Domain& d) {
  std::vector<Box> out;
  const int dim = d.dimension();
  int ext = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ext = std::max(ext, max_abs(d.lattice(i)));
  for (const int side : {4, 8, 16}) {
    const int stride = side / 2;
    const int first = -((ext / stride) * stride);
    for (int z = dim == 3 ? first : 0; z <= (dim == 3 ? ext - side : 0); z += stride)
      for (int y = first; y <= ext - side; y += stride)
        for (int x = first; x <= ext - side; x += stride) {
          Box b{{x, y, z}, {x + side, y + side, dim == 3 ? z + side : 0}};
          const auto nodes = split_box(d, b);
          if (nodes.valid && !nodes.interior.empty()) out.push_back(b);
        }
  }
  return out;
}

StencilMetric::StencilMetric(const StencilSet& stencil, int radius)
    : dim_(stencil.dimension), radius_(radius) {
  const int n = 2 * radius + 1;
  const std::size_t size = dim_ == 3 ? static_cast<std::size_t>(n) * n * n : static_cast<std::size_t>(n) * n;
  table_.assign(size, kInf);
  auto flat = [&](const Lattice& l) {
    std::size_t f = 0;
    for (int a = dim_ - 1; a >= 0; --a) f = f * n + static_cast<std::size_t>(l[a] + radius);
    return f;
  };
  // Dijkstra from the origin; paths may detour through a margin around the
  // table so that entries near its rim are exact.
  const int reach = radius + stencil.width;
  const int m = 2 * reach + 1;
  std::vector<double> dist(dim_ == 3 ? static_cast<std::size_t>(m) * m * m : static_cast<std::size_t>(m) * m, kInf);
  auto flat_reach = [&](const Lattice& l) {
    std::size_t f = 0;
    for (int a = dim_ - 1; a >= 0; --a) f = f * m + static_cast<std::size_t>(l[a] + reach);
    return f;
  };
  using Entry = std::pair<double, Lattice>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  dist[flat_reach({0, 0, 0})] = 0.0;
  queue.push({0.0, {0, 0, 0}});
  while (!queue.empty()) {
    const auto [dv, l] = queue.top();
    queue.pop();
    if (dv > dist[flat_reach(l)]) continue;
    for (std::size_t o = 0; o < stencil.size(); ++o) {
      const auto& off = stencil.offsets[o];
      const Lattice nl{l[0] + off[0], l[1] + off[1], l[2] + off[2]};
      if (max_abs(nl) > reach) continue;
      const double nd = dv + stencil.lengths[o];
      auto& slot = dist[flat_reach(nl)];
      if (nd < slot) {
        slot = nd;
        queue.push({nd, nl});
      }
    }
  }
  Lattice l{};
  const int zr = dim_ == 3 ? radius : 0;
  for (l[2] = -zr; l[2] <= zr; ++l[2])
    for (l[1] = -radius; l[1] <= radius; ++l[1])
      for (l[0] = -radius; l[0] <= radius; ++l[0]) table_[flat(l)] = dist[flat_reach(l)];
}

double StencilMetric::operator()(const Lattice& v) const {
  if (max_abs(v) > radius_) throw InvalidArgument("lattice vector outside the metric table");
  const int n = 2 * radius_ + 1;
  std::size_t f = 0;
  for (int a = dim_ - 1; a >= 0; --a) f = f * n + static_cast<std::size_t>(v[a] + radius_);
  return table_[f];
}

std::vector<std::size_t> box_interior_nodes(const Domain& d, std::span<const Box> boxes) {
  std::vector<char> mark(d.size(), 0);
  for (const auto& b : boxes) {
    const auto nodes = split_box(d, b);
    if (!nodes.valid) throw InvalidArgument(describe(b, d.dimension()) + " leaves the domain interior");
    for (const auto i : nodes.interior) mark[i] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (mark[i]) out.push_back(i);
  return out;
}

std::vector<ViolationRecord> check_ccp(const SolutionField& u, std::span<const Box> boxes, double tol,
                                       ConeMetric metric) {
  const Domain& d = u.grid();
  std::vector<BoxNodes> split;
  int span = 1;
  for (const auto& b : boxes) {
    split.push_back(split_box(d, b));
    if (!split.back().valid) throw InvalidArgument(describe(b, d.dimension()) + " leaves the domain interior");
    for (int a = 0; a < d.dimension(); ++a) span = std::max(span, b.hi[a] - b.lo[a]);
  }
  std::optional<StencilMetric> table;
  if (metric == ConeMetric::Stencil) table.emplace(d.stencil(), span);
  std::vector<std::vector<ViolationRecord>> per_box(boxes.size());
  const auto n_boxes = static_cast<std::ptrdiff_t>(boxes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t b = 0; b < n_boxes; ++b) {
    if (split[b].interior.empty()) continue;
    per_box[b] = ccp_one_box(u, boxes[b], split[b], tol, table ? &*table : nullptr);
  }
  std::vector<ViolationRecord> out;
  for (auto& v : per_box) std::move(v.begin(), v.end(), std::back_inserter(out));
  std::stable_sort(out.begin(), out.end(), [](const ViolationRecord& a, const ViolationRecord& b) {
    if (a.nodes.front() != b.nodes.front()) return a.nodes.front() < b.nodes.front();
    return a.magnitude > b.magnitude;
  });
  return out;
}

std::optional<ViolationRecord> check_comparison(const SolutionField& u, const SolutionField& v, double tol) {
  const Domain& du = u.grid();
  const Domain& dv = v.grid();
  if (!same_problem(du.spec(), dv.spec()))
    throw ProfileMismatch("comparison needs fields on the same lattice, stencil and obstacle");
  const double r_cap = 0.8 * std::min(du.spec().outer_radius, dv.spec().outer_radius);

  double bmax = -kInf, imax = -kInf;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < du.size(); ++i) {
    if (!live(du, i)) continue;
    const auto j = dv.find(du.lattice(i));
    if (!j || !live(dv, *j)) continue;
    const double diff = u[i] - v[*j];
    const bool on_obstacle = du.classification(i) == NodeClass::ObstacleBoundary;
    if (on_obstacle != (dv.classification(*j) == NodeClass::ObstacleBoundary))
      throw ProfileMismatch("obstacle boundaries of the two fields differ");
    if (on_obstacle) bmax = std::max(bmax, diff);
    if (du.classification(i) == NodeClass::OuterBoundary || dv.classification(*j) == NodeClass::OuterBoundary)
      continue;
    if (du.radius(i) > r_cap) continue;
    if (diff > imax) {
      imax = diff;
      arg = i;
    }
  }
  if (!std::isfinite(bmax)) throw ProfileMismatch("fields share no obstacle boundary nodes");
  if (imax <= bmax + tol) return std::nullopt;
  std::ostringstream ctx;
  ctx << "max(u-v) inside " << imax << " exceeds obstacle-boundary max " << bmax;
  return ViolationRecord{ViolationKind::Comparison, {arg}, imax - bmax, ctx.str(), std::nullopt, std::nullopt};
}

std::optional<ViolationRecord> check_extremal_location(const SolutionField& u, const FarFieldSpec& far, double tol) {
  far.validate();
  const Domain& d = u.grid();
  const double r_cap = 0.8 * d.spec().outer_radius;
  double all_max = -kInf, all_min = kInf, b_max = -kInf, b_min = kInf;
  std::size_t arg_max = 0, arg_min = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!live(d, i) || d.radius(i) > r_cap) continue;
    const double phi = u[i] - far.profile(d.point(i));
    if (phi > all_max) {
      all_max = phi;
      arg_max = i;
    }
    if (phi < all_min) {
      all_min = phi;
      arg_min = i;
    }
    if (d.classification(i) == NodeClass::ObstacleBoundary) {
      b_max = std::max(b_max, phi);
      b_min = std::min(b_min, phi);
    }
  }
  if (!std::isfinite(b_max)) throw InvalidArgument("extremal check needs an obstacle boundary");
  const double over = all_max - b_max, under = b_min - all_min;
  if (over <= tol && under <= tol) return std::nullopt;
  std::ostringstream ctx;
  if (over >= under) {
    ctx << "max of u - far field " << all_max << " exceeds its obstacle-boundary max " << b_max;
    return ViolationRecord{ViolationKind::Extremal, {arg_max}, over, ctx.str(), std::nullopt, std::nullopt};
  }
  ctx << "min of u - far field " << all_min << " is below its obstacle-boundary min " << b_min;
  return ViolationRecord{ViolationKind::Extremal, {arg_min}, under, ctx.str(), std::nullopt, std::nullopt};
}

SolutionField reflect_field(const SolutionField& u, int axis) {
  const Domain& d = u.grid();
  if (axis < 0 || axis >= d.dimension()) throw InvalidArgument("reflection axis out of range");
  std::vector<std::size_t> image(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    Lattice l = d.lattice(i);
    l[axis] = -l[axis];
    const auto j = d.find(l);
    if (!j || d.classification(*j) != d.classification(i))
      throw AsymmetricDomain("domain is not symmetric under the reflection");
    const auto si = d.interior_slot(i);
    if (si >= 0 && d.width(static_cast<std::size_t>(si)) != d.width(static_cast<std::size_t>(d.interior_slot(*j))))
      throw AsymmetricDomain("stencil widths are not symmetric under the reflection");
    image[i] = *j;
  }
  SolutionField v = u;
  for (std::size_t i = 0; i < d.size(); ++i) v.values[i] = -u.values[image[i]];
  v.residual_max = residual_max(d, v.values);
  return v;
}

std::vector<ViolationRecord> check_envelope(const SolutionField& u, const SlopeProfile& profile, double tol) {
  const Domain& d = u.grid();
  const double eps = 5.0 * d.spacing() + tol;
  std::vector<ViolationRecord> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!live(d, i)) continue;
    const double r = d.radius(i);
    const double hi = profile.m_plus + profile.s_inf_plus * r + eps;
    const double lo = profile.m_minus - profile.s_inf_minus * r - eps;
    if (u[i] > hi) {
      out.push_back({ViolationKind::Envelope, {i}, u[i] - hi, "above m+ + S+_inf |x|", std::nullopt, std::nullopt});
    } else if (u[i] < lo) {
      out.push_back({ViolationKind::Envelope, {i}, lo - u[i], "below m- - S-_inf |x|", std::nullopt, std::nullopt});
    }
  }
  return out;
}

}  // namespace ihf
