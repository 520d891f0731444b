#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ihf/common.hpp"

namespace ihf {

enum class NodeClass : std::uint8_t { Interior, ObstacleBoundary, OuterBoundary, Excluded };

const char* to_string(NodeClass c);

struct NoObstacle {
  bool operator==(const NoObstacle&) const = default;
};

// Closed ball of the given radius centred at the origin.
struct BallObstacle {
  double radius = 1.0;
  bool operator==(const BallObstacle&) const = default;
};

// Finite point set; each point is snapped to its nearest lattice node.
struct PointObstacle {
  std::vector<Point> points;
  bool operator==(const PointObstacle&) const = default;
};

// 2D mask of '0'/'1' characters, one row per line. The file must have an
// odd number of rows and columns; the centre character sits on the origin,
// columns run along +x1 and the first row is the largest x2. '1' marks an
// obstacle node.
struct MaskObstacle {
  std::string path;
  bool operator==(const MaskObstacle&) const = default;
};

using ObstacleShape = std::variant<NoObstacle, BallObstacle, PointObstacle, MaskObstacle>;

enum class OuterShape { Ball, Box };

struct GridSpec {
  int dimension = 2;
  double spacing = 0.1;
  // Radius of B_R (Ball) or half-width of [-R, R]^n (Box).
  double outer_radius = 4.0;
  int stencil_width = 3;
  ObstacleShape obstacle = BallObstacle{};
  OuterShape outer = OuterShape::Ball;

  // Throws InvalidArgument for malformed fields.
  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

// Primitive lattice directions of max-norm <= width, ordered by (max-norm
// shell, Euclidean length). The first count(w) offsets form the width-w
// stencil, so narrower stencils are prefixes of wider ones.
struct StencilSet {
  int dimension = 2;
  int width = 1;
  std::vector<Lattice> offsets;
  // Euclidean length of each offset in lattice units.
  std::vector<double> lengths;
  // Offsets grouped by equal length: class c spans
  // [class_begin[c], class_begin[c + 1]).
  std::vector<int> class_begin;
  std::vector<double> class_length;
  // Number of classes making up the width-w stencil, indexed by w (entry 0
  // unused).
  std::vector<int> classes_for_width;
  // pair_weight[a * class_count() + b] = l_b / (l_a + l_b): the point on the
  // segment between a class-a and a class-b neighbour where the two slopes
  // balance sits at weight * u_a + (1 - weight) * u_b.
  std::vector<double> pair_weight;

  std::size_t size() const { return offsets.size(); }
  int class_count() const { return static_cast<int>(class_length.size()); }
  int offset_count(int w) const { return class_begin[classes_for_width[w]]; }
};

inline constexpr int kMaxStencilClasses = 64;

StencilSet stencil_directions(int dimension, int width);

class Domain {
 public:
  const GridSpec& spec() const { return spec_; }
  const StencilSet& stencil() const { return stencil_; }
  int dimension() const { return spec_.dimension; }
  double spacing() const { return spec_.spacing; }

  std::size_t size() const { return lattice_.size(); }
  const Lattice& lattice(std::size_t i) const { return lattice_[i]; }
  Point point(std::size_t i) const;
  double radius(std::size_t i) const { return norm(point(i)); }
  NodeClass classification(std::size_t i) const { return class_[i]; }
  bool is_boundary(std::size_t i) const {
    return class_[i] == NodeClass::ObstacleBoundary || class_[i] == NodeClass::OuterBoundary;
  }

  // Index of the node at the given lattice position, if it exists.
  std::optional<std::size_t> find(const Lattice& l) const;
  std::optional<std::size_t> nearest(const Point& p) const;

  // Interior nodes, in node order.
  const std::vector<std::int32_t>& interior() const { return interior_; }
  // Position of node i within interior(), or -1.
  std::int32_t interior_slot(std::size_t i) const { return interior_slot_[i]; }
  // Stencil width used at the k-th interior node.
  int width(std::size_t k) const { return width_[k]; }
  // Neighbour node indices of the k-th interior node, in stencil order.
  std::span<const std::int32_t> neighbors(std::size_t k) const {
    return {neighbors_.data() + neighbor_begin_[k], neighbors_.data() + neighbor_begin_[k + 1]};
  }
  // Interior slots grouped into colours; no two nodes of one colour are a
  // stencil offset apart, so a colour can be updated in any order.
  const std::vector<std::vector<std::int32_t>>& colors() const { return colors_; }

  std::vector<std::size_t> nodes_of(NodeClass c) const;
  bool has_obstacle() const { return !std::holds_alternative<NoObstacle>(spec_.obstacle); }

 private:
  friend Domain build_domain(const GridSpec& spec);
  friend Domain build_matching_ball(const Domain& reference, double radius);
  void finalize(const std::vector<int>& widths);

  GridSpec spec_;
  StencilSet stencil_;
  int extent_ = 0;  // lattice box is [-extent_, extent_]^dim
  std::vector<Lattice> lattice_;
  std::vector<NodeClass> class_;
  std::vector<std::int32_t> box_index_;  // dense lattice box -> node index or -1
  std::vector<std::int32_t> interior_;
  std::vector<std::int32_t> interior_slot_;
  std::vector<int> width_;
  std::vector<std::size_t> neighbor_begin_;
  std::vector<std::int32_t> neighbors_;
  std::vector<std::vector<std::int32_t>> colors_;
};

Domain build_domain(const GridSpec& spec);

// Ball B_radius on the reference lattice with the obstacle ignored. Nodes
// whose full-width stencil leaves the ball form the outer boundary; every
// other node reuses the reference stencil width wherever the reference has an
// interior node, so both domains run the same scheme on their common interior.
Domain build_matching_ball(const Domain& reference, double radius);

using DomainPtr = std::shared_ptr<const Domain>;
DomainPtr make_domain(const GridSpec& spec);

}  // namespace ihf
