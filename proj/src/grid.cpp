#include "ihf/grid.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace ihf {

const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Interior:
      return "interior";
    case NodeClass::ObstacleBoundary:
      return "obstacle_boundary";
    case NodeClass::OuterBoundary:
      return "outer_boundary";
    case NodeClass::Excluded:
      return "excluded";
  }
  return "?";
}

namespace {

int squared_length(const Lattice& l) { return l[0] * l[0] + l[1] * l[1] + l[2] * l[2]; }

int lattice_gcd(const Lattice& l) {
  return std::gcd(std::gcd(std::abs(l[0]), std::abs(l[1])), std::abs(l[2]));
}

Lattice snap(const Point& p, double h) {
  return {static_cast<int>(std::lround(p[0] / h)), static_cast<int>(std::lround(p[1] / h)),
          static_cast<int>(std::lround(p[2] / h))};
}

std::vector<Lattice> read_mask(const MaskObstacle& mask) {
  std::ifstream in(mask.path);
  if (!in) throw InvalidArgument("cannot open mask file '" + mask.path + "'");
  std::vector<std::string> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.find_first_not_of("01") != std::string::npos)
      throw InvalidArgument("mask file '" + mask.path + "' contains characters other than 0/1");
    rows.push_back(line);
  }
  if (rows.empty()) throw InvalidArgument("mask file '" + mask.path + "' is empty");
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw InvalidArgument("mask rows have unequal length");
  if (rows.size() % 2 == 0 || cols % 2 == 0)
    throw InvalidArgument("mask must have an odd number of rows and columns");
  const int half_rows = static_cast<int>(rows.size() / 2);
  const int half_cols = static_cast<int>(cols / 2);
  std::vector<Lattice> nodes;
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c)
      if (rows[r][c] == '1')
        nodes.push_back({static_cast<int>(c) - half_cols, half_rows - static_cast<int>(r), 0});
  return nodes;
}

}  // namespace

void GridSpec::validate() const {
  if (dimension != 2 && dimension != 3) throw InvalidArgument("dimension must be 2 or 3");
  if (!(spacing > 0.0)) throw InvalidArgument("spacing must be positive");
  if (!(outer_radius > 1.0)) throw InvalidArgument("outer radius must exceed 1");
  if (stencil_width < 1) throw InvalidArgument("stencil width must be at least 1");
  if (stencil_width > outer_radius / spacing + 1e-9)
    throw InvalidArgument("stencil width exceeds R/h");
  if (const auto* ball = std::get_if<BallObstacle>(&obstacle)) {
    if (!(ball->radius > 0.0)) throw InvalidArgument("ball obstacle radius must be positive");
    if (ball->radius > 1.0) throw ObstacleTooLarge("ball obstacle radius exceeds 1");
  } else if (const auto* pts = std::get_if<PointObstacle>(&obstacle)) {
    if (pts->points.empty()) throw InvalidArgument("point obstacle is empty");
    bool near_origin = false;
    for (const auto& p : pts->points) {
      if (norm(p) > 1.0 + 1e-12) throw ObstacleTooLarge("obstacle point lies outside the unit ball");
      const Lattice l = snap(p, spacing);
      const Point q{l[0] * spacing, l[1] * spacing, l[2] * spacing};
      if (norm(q) <= spacing * (1.0 + 1e-12)) near_origin = true;
    }
    if (!near_origin) throw InvalidArgument("point obstacle must contain a point near the origin");
  } else if (std::holds_alternative<MaskObstacle>(obstacle)) {
    if (dimension != 2) throw InvalidArgument("mask obstacles are two-dimensional");
  }
}

StencilSet stencil_directions(int dimension, int width) {
  if (dimension != 2 && dimension != 3) throw InvalidArgument("dimension must be 2 or 3");
  if (width < 1) throw InvalidArgument("stencil width must be at least 1");
  StencilSet s;
  s.dimension = dimension;
  s.width = width;
  const int zr = dimension == 3 ? width : 0;
  for (int k = -zr; k <= zr; ++k)
    for (int j = -width; j <= width; ++j)
      for (int i = -width; i <= width; ++i) {
        const Lattice l{i, j, k};
        if (l == Lattice{0, 0, 0} || lattice_gcd(l) != 1) continue;
        s.offsets.push_back(l);
      }
  std::sort(s.offsets.begin(), s.offsets.end(), [](const Lattice& a, const Lattice& b) {
    const int sa = max_abs(a), sb = max_abs(b);
    if (sa != sb) return sa < sb;
    const int la = squared_length(a), lb = squared_length(b);
    if (la != lb) return la < lb;
    return a < b;
  });
  s.classes_for_width.assign(width + 1, 0);
  for (std::size_t n = 0; n < s.offsets.size(); ++n) {
    const auto& l = s.offsets[n];
    s.lengths.push_back(std::sqrt(static_cast<double>(squared_length(l))));
    if (n == 0 || squared_length(l) != squared_length(s.offsets[n - 1]) ||
        max_abs(l) != max_abs(s.offsets[n - 1])) {
      s.class_begin.push_back(static_cast<int>(n));
      s.class_length.push_back(s.lengths.back());
    }
    s.classes_for_width[max_abs(l)] = static_cast<int>(s.class_begin.size());
  }
  s.class_begin.push_back(static_cast<int>(s.offsets.size()));
  const int nc = s.class_count();
  if (nc > kMaxStencilClasses) throw InvalidArgument("stencil width too large");
  s.pair_weight.resize(static_cast<std::size_t>(nc) * nc);
  for (int a = 0; a < nc; ++a)
    for (int b = 0; b < nc; ++b)
      s.pair_weight[a * nc + b] = s.class_length[b] / (s.class_length[a] + s.class_length[b]);
  return s;
}

Point Domain::point(std::size_t i) const {
  const auto& l = lattice_[i];
  const double h = spec_.spacing;
  return {l[0] * h, l[1] * h, l[2] * h};
}

std::optional<std::size_t> Domain::find(const Lattice& l) const {
  const int n = 2 * extent_ + 1;
  std::size_t flat = 0;
  for (int a = spec_.dimension - 1; a >= 0; --a) {
    if (l[a] < -extent_ || l[a] > extent_) return std::nullopt;
    flat = flat * n + static_cast<std::size_t>(l[a] + extent_);
  }
  for (int a = spec_.dimension; a < kMaxDim; ++a)
    if (l[a] != 0) return std::nullopt;
  const auto idx = box_index_[flat];
  if (idx < 0) return std::nullopt;
  return static_cast<std::size_t>(idx);
}

std::optional<std::size_t> Domain::nearest(const Point& p) const {
  return find(snap(p, spec_.spacing));
}

std::vector<std::size_t> Domain::nodes_of(NodeClass c) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (class_[i] == c) out.push_back(i);
  return out;
}

Domain build_domain(const GridSpec& spec) {
  spec.validate();
  Domain d;
  d.spec_ = spec;
  d.stencil_ = stencil_directions(spec.dimension, spec.stencil_width);
  const double h = spec.spacing;
  const int dim = spec.dimension;
  d.extent_ = static_cast<int>(std::floor(spec.outer_radius / h + 1e-9));
  const int ext = d.extent_;
  const int n = 2 * ext + 1;
  std::size_t box_size = 1;
  for (int a = 0; a < dim; ++a) box_size *= static_cast<std::size_t>(n);
  d.box_index_.assign(box_size, -1);

  const int zr = dim == 3 ? ext : 0;
  const double r_lim = spec.outer_radius * (1.0 + 1e-12);
  for (int k = -zr; k <= zr; ++k)
    for (int j = -ext; j <= ext; ++j)
      for (int i = -ext; i <= ext; ++i) {
        const Lattice l{i, j, k};
        if (spec.outer == OuterShape::Ball) {
          const Point p{i * h, j * h, k * h};
          if (norm(p) > r_lim) continue;
        }
        std::size_t flat = 0;
        for (int a = dim - 1; a >= 0; --a) flat = flat * n + static_cast<std::size_t>(l[a] + ext);
        d.box_index_[flat] = static_cast<std::int32_t>(d.lattice_.size());
        d.lattice_.push_back(l);
      }

  const std::size_t count = d.lattice_.size();
  std::vector<char> in_obstacle(count, 0);
  bool points_are_boundary = false;
  std::visit(
      [&](const auto& obs) {
        using T = std::decay_t<decltype(obs)>;
        if constexpr (std::is_same_v<T, BallObstacle>) {
          const double lim = obs.radius * (1.0 + 1e-12);
          for (std::size_t i = 0; i < count; ++i)
            if (d.radius(i) <= lim) in_obstacle[i] = 1;
        } else if constexpr (std::is_same_v<T, PointObstacle>) {
          points_are_boundary = true;
          for (const auto& p : obs.points)
            if (auto idx = d.find(snap(p, h))) in_obstacle[*idx] = 1;
        } else if constexpr (std::is_same_v<T, MaskObstacle>) {
          bool has_origin = false;
          for (const auto& l : read_mask(obs)) {
            const Point p{l[0] * h, l[1] * h, 0.0};
            if (norm(p) > 1.0 + 1e-12) throw ObstacleTooLarge("mask obstacle exceeds the unit ball");
            if (l == Lattice{0, 0, 0}) has_origin = true;
            if (auto idx = d.find(l)) in_obstacle[*idx] = 1;
          }
          if (!has_origin) throw InvalidArgument("mask obstacle must contain the origin");
        }
      },
      spec.obstacle);

  const auto& st = d.stencil_;
  const int width1 = st.offset_count(1);
  auto neighbor_of = [&](std::size_t i, const Lattice& off) {
    const auto& l = d.lattice_[i];
    return d.find({l[0] + off[0], l[1] + off[1], l[2] + off[2]});
  };

  d.class_.assign(count, NodeClass::Interior);
  for (std::size_t i = 0; i < count; ++i) {
    if (in_obstacle[i]) {
      d.class_[i] = points_are_boundary ? NodeClass::ObstacleBoundary : NodeClass::Excluded;
      continue;
    }
    bool touches_obstacle = false, leaves_domain = false;
    for (int o = 0; o < width1; ++o) {
      const auto nb = neighbor_of(i, st.offsets[o]);
      if (!nb) leaves_domain = true;
      else if (in_obstacle[*nb] && !points_are_boundary) touches_obstacle = true;
    }
    if (touches_obstacle) d.class_[i] = NodeClass::ObstacleBoundary;
    else if (leaves_domain) d.class_[i] = NodeClass::OuterBoundary;
  }

  std::vector<int> widths(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    if (d.class_[i] != NodeClass::Interior) continue;
    // Widest stencil whose every neighbour is a live node.
    int w = 1;
    for (int cand = 2; cand <= spec.stencil_width; ++cand) {
      bool fits = true;
      for (int o = st.offset_count(cand - 1); o < st.offset_count(cand) && fits; ++o) {
        const auto nb = neighbor_of(i, st.offsets[o]);
        fits = nb && d.class_[*nb] != NodeClass::Excluded;
      }
      if (!fits) break;
      w = cand;
    }
    widths[i] = w;
  }
  d.finalize(widths);
  return d;
}

void Domain::finalize(const std::vector<int>& widths) {
  const std::size_t count = lattice_.size();
  interior_slot_.assign(count, -1);
  interior_.clear();
  width_.clear();
  neighbors_.clear();
  neighbor_begin_.assign(1, 0);
  for (std::size_t i = 0; i < count; ++i) {
    if (class_[i] != NodeClass::Interior) continue;
    const int w = widths[i];
    interior_slot_[i] = static_cast<std::int32_t>(interior_.size());
    interior_.push_back(static_cast<std::int32_t>(i));
    width_.push_back(w);
    const auto& l = lattice_[i];
    for (int o = 0; o < stencil_.offset_count(w); ++o) {
      const auto& off = stencil_.offsets[o];
      neighbors_.push_back(static_cast<std::int32_t>(*find({l[0] + off[0], l[1] + off[1], l[2] + off[2]})));
    }
    neighbor_begin_.push_back(neighbors_.size());
  }
  if (interior_.empty()) throw EmptyInterior("no interior node fits between the obstacle and the outer boundary");

  const int dim = spec_.dimension;
  const int period = spec_.stencil_width + 1;
  int color_count = 1;
  for (int a = 0; a < dim; ++a) color_count *= period;
  colors_.assign(color_count, {});
  for (std::size_t k = 0; k < interior_.size(); ++k) {
    const auto& l = lattice_[interior_[k]];
    int c = 0;
    for (int a = dim - 1; a >= 0; --a) c = c * period + ((l[a] % period) + period) % period;
    colors_[c].push_back(static_cast<std::int32_t>(k));
  }
  std::erase_if(colors_, [](const auto& v) { return v.empty(); });
}

Domain build_matching_ball(const Domain& reference, double radius) {
  GridSpec spec = reference.spec();
  spec.outer_radius = radius;
  spec.outer = OuterShape::Ball;
  spec.obstacle = NoObstacle{};
  Domain d = build_domain(spec);
  const StencilSet& st = d.stencil_;
  const int full = st.offset_count(spec.stencil_width);
  std::vector<int> widths(d.size(), 0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& l = d.lattice_[i];
    bool fits = true;
    for (int o = 0; o < full && fits; ++o) {
      const auto& off = st.offsets[o];
      fits = d.find({l[0] + off[0], l[1] + off[1], l[2] + off[2]}).has_value();
    }
    if (!fits) {
      d.class_[i] = NodeClass::OuterBoundary;
      continue;
    }
    d.class_[i] = NodeClass::Interior;
    widths[i] = spec.stencil_width;
    if (const auto j = reference.find(l)) {
      const auto slot = reference.interior_slot(*j);
      if (slot >= 0) widths[i] = reference.width(static_cast<std::size_t>(slot));
    }
  }
  d.finalize(widths);
  return d;
}

DomainPtr make_domain(const GridSpec& spec) { return std::make_shared<const Domain>(build_domain(spec)); }

}  // namespace ihf
