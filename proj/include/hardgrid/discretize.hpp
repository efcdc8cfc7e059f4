#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hardgrid/model.hpp"
#include "hardgrid/rng.hpp"

namespace hardgrid {

class WeightedGraph;

// ---------------------------------------------------------------------------
// Resolutions

/// Smallest rho = m / side_length with integer m >= max(1, side_length * rho_min).
double smallest_feasible_resolution(double side_length, double rho_min);

/// True iff side_length * rho is a positive integer (up to rounding).
bool is_feasible_resolution(double side_length, double rho);

/// sqrt(d) * (c q max(lmax, lmax^2) vol / eps)^(1/d) * max(1, 4 / Lambda_min), without rounding.
/// An unconstrained model (Lambda_min = +inf) takes the last factor as 1.
double closed_form_resolution(const ModelSpec& model, double eps, double constant);

enum class ResolutionMode {
  closed_form,  ///< smallest feasible rho above the closed-form bound
  adaptive,     ///< smallest feasible rho whose error factor is at most 1 - exp(-eps_d)
};

/// Feasible resolution guaranteeing exp(-eps_d) Z <= Z_hc <= exp(eps_d) Z. Throws for unconstrained models.
double resolution_for_error(const ModelSpec& model, double eps_d, ResolutionMode mode = ResolutionMode::closed_form);

// ---------------------------------------------------------------------------
// Point sets

/*!
 * Points stored row-major in working units.
 *
 * Canonical grids use integer grid coordinates (unit 1 / rho), which keeps
 * pairwise squared distances exact. Random sets use physical coordinates.
 */
struct PointSet {
  int dimension = 1;
  double side_length = 1.0;
  double resolution = 0.0;  ///< rho for canonical grids, 0 for random sets
  std::uint64_t seed = 0;
  std::vector<double> coords;

  std::size_t size() const noexcept { return coords.size() / static_cast<std::size_t>(dimension); }
  /// Working units per physical unit (rho for grids, 1 otherwise).
  double scale() const noexcept { return resolution > 0.0 ? resolution : 1.0; }
  double coord(std::size_t point, int axis) const noexcept {
    return coords[point * static_cast<std::size_t>(dimension) + static_cast<std::size_t>(axis)];
  }
  /// Physical position of a point.
  std::vector<double> position(std::size_t point) const;
};

/// The grid {m / rho : m in N^d} inside [0, side_length)^d, enumerated lazily.
class CanonicalPointSet {
 public:
  CanonicalPointSet(Region region, double resolution);

  const Region& region() const noexcept { return region_; }
  double resolution() const noexcept { return resolution_; }
  /// Grid points per axis, side_length * rho.
  std::uint64_t points_per_axis() const noexcept { return per_axis_; }
  std::uint64_t size() const noexcept;
  /// Grid multi-index of a point; axis 0 varies fastest.
  std::vector<std::uint64_t> grid_index(std::uint64_t point) const;
  std::vector<double> position(std::uint64_t point) const;
  /// Coordinates in grid units; refuses more than max_points points.
  PointSet materialize(std::uint64_t max_points = 100'000'000) const;

 private:
  Region region_;
  double resolution_;
  std::uint64_t per_axis_;
};

/// n i.i.d. uniform points in the region, reproducible from the seed.
PointSet random_point_set(const Region& region, std::size_t n, std::uint64_t seed);

/// Componentwise floor(rho * y) / rho.
std::vector<double> canonical_allocate(std::span<const double> y, double resolution);

// ---------------------------------------------------------------------------
// Partitionings and allocations

/// Axis-aligned grid of k^d equal cubes of side side_length / k.
struct HypercubePartitioning {
  int dimension = 1;
  double side_length = 1.0;
  std::uint64_t cells_per_axis = 1;

  std::uint64_t size() const noexcept;
  double cell_side() const noexcept { return side_length / static_cast<double>(cells_per_axis); }
  /// Diameter of a cell.
  double epsilon() const noexcept;
  /// Every cell has volume exactly vol(V) / size.
  double gamma() const noexcept { return 1.0; }
  std::uint64_t cell_of(std::span<const double> position) const;
};

/// Cells of side side_length / ceil(sqrt(d) side_length / eps), so each has diameter <= eps.
HypercubePartitioning hypercube_partitioning(int dimension, double side_length, double eps);

enum class AllocationKind { canonical_floor, partition_based };

/*!
 * A map from the region onto a point set, represented by the preimage cell
 * of every point. Each cell is an axis-aligned box.
 */
class Allocation {
 public:
  static Allocation canonical_floor(const Region& region, double resolution);

  AllocationKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return dimension_; }
  std::size_t num_points() const noexcept { return num_points_; }
  double resolution() const noexcept { return resolution_; }
  /// Max over cells of |vol(cell) |X| / vol(V) - 1|.
  double delta() const noexcept { return delta_; }
  /// Upper bound on dist(y, alpha(y)).
  double epsilon() const noexcept { return epsilon_; }

  double cell_volume(std::size_t point) const;
  /// Lower and upper corners of the preimage cell of a point.
  void cell_box(std::size_t point, std::span<double> lo, std::span<double> hi) const;
  /// Uniform position inside the preimage cell of a point.
  std::vector<double> sample_cell(std::size_t point, Rng& rng) const;
  /// Index of the point a position is mapped to.
  std::size_t allocate_index(std::span<const double> y) const;

 private:
  friend struct PartitionAllocationBuilder;
  Allocation() = default;

  AllocationKind kind_ = AllocationKind::canonical_floor;
  int dimension_ = 1;
  double side_length_ = 1.0;
  std::size_t num_points_ = 0;
  double resolution_ = 0.0;
  double delta_ = 0.0;
  double epsilon_ = 0.0;
  // partition-based geometry: per point box [lo, hi), row-major
  std::vector<double> lo_, hi_;
  // partition-based lookup: cell -> points in slab order
  HypercubePartitioning partitioning_;
  std::vector<std::size_t> cell_start_;
  std::vector<std::size_t> cell_points_;
};

struct EmptyCell {
  std::uint64_t cell = 0;
};

/*!
 * Splits each partition cell into equal slabs along axis 0, one per point in
 * the cell (points ordered by their axis-0 coordinate). Fails with the first
 * empty cell.
 */
std::variant<Allocation, EmptyCell> partition_allocation_from_random(const PointSet& points,
                                                                     const HypercubePartitioning& partitioning);

// ---------------------------------------------------------------------------
// Hard-core representation

/*!
 * Geometric hard-core graph on point x type vertices.
 *
 * Vertex ids are point * q + type. Adjacency is stored once per point pair
 * closer than the largest threshold; the type pairs that form an edge are
 * recovered from the pair distance on the fly.
 */
class HardCoreGraph {
 public:
  HardCoreGraph(PointSet points, const ModelSpec& model, std::vector<std::uint64_t> offsets,
                std::vector<std::uint32_t> neighbors);

  std::size_t num_points() const noexcept { return points_.size(); }
  std::size_t q() const noexcept { return q_; }
  std::size_t num_vertices() const noexcept { return num_points() * q_; }
  const PointSet& points() const noexcept { return points_; }
  /// Per-type vertex weight lambda(i) vol(V) / |X|.
  const std::vector<double>& type_weights() const noexcept { return type_weights_; }
  double weight(std::size_t vertex) const noexcept { return type_weights_[vertex % q_]; }
  /// Squared threshold between two types in working units.
  double threshold2(std::size_t i, std::size_t j) const noexcept { return threshold2_[i * q_ + j]; }
  const std::vector<std::uint64_t>& point_offsets() const noexcept { return offsets_; }
  const std::vector<std::uint32_t>& point_neighbors() const noexcept { return neighbors_; }
  std::span<const std::uint32_t> near_points(std::size_t point) const noexcept {
    return {neighbors_.data() + offsets_[point], neighbors_.data() + offsets_[point + 1]};
  }
  double distance2(std::size_t a, std::size_t b) const noexcept;

  /// Calls fn(u) for every neighbor u of the vertex, in increasing order of u.
  template <class Fn>
  void for_each_neighbor(std::size_t vertex, Fn&& fn) const {
    const std::size_t x = vertex / q_, i = vertex % q_;
    const auto near = near_points(x);
    std::size_t k = 0;
    for (; k < near.size() && near[k] < x; ++k) emit_pair(x, near[k], i, fn);
    for (std::size_t j = 0; j < q_; ++j)
      if (j != i && 0.0 < threshold2(i, j)) fn(x * q_ + j);
    for (; k < near.size(); ++k) emit_pair(x, near[k], i, fn);
  }

  std::size_t degree(std::size_t vertex) const;
  std::size_t max_degree() const;
  /// Number of neighbors of (x, i) with type j.
  std::size_t type_degree(std::size_t vertex, std::size_t j) const;
  /// Vertex-level adjacency with per-vertex weights.
  WeightedGraph to_weighted() const;

 private:
  template <class Fn>
  void emit_pair(std::size_t x, std::size_t y, std::size_t i, Fn& fn) const {
    const double d2 = q_ == 1 ? 0.0 : distance2(x, y);
    for (std::size_t j = 0; j < q_; ++j)
      if (q_ == 1 || d2 < threshold2(i, j)) fn(y * q_ + j);
  }

  PointSet points_;
  std::size_t q_;
  std::vector<double> type_weights_;
  std::vector<double> threshold2_;
  std::vector<std::uint64_t> offsets_;
  std::vector<std::uint32_t> neighbors_;
};

/// Point pairs scanned by the spatial hash; refuses construction above this.
inline constexpr std::uint64_t kDefaultMaxPairs = 100'000'000;

/*!
 * Builds the hard-core representation: (x, i) ~ (y, j) iff they differ and
 * dist(x, y) < Lambda(i, j). Throws CapacityError when the scan would exceed
 * max_pairs point pairs.
 */
HardCoreGraph build_graph(const ModelSpec& model, PointSet points, std::uint64_t max_pairs = kDefaultMaxPairs);

/// Point pairs the spatial hash would scan (upper bound on stored pairs).
std::uint64_t estimate_scanned_pairs(const ModelSpec& model, const PointSet& points);

/// O(n^2) construction used as a reference for build_graph.
HardCoreGraph build_graph_all_pairs(const ModelSpec& model, PointSet points);

// ---------------------------------------------------------------------------
// Bounds

struct DegreeBound {
  SquareMatrix bounds;               ///< (1 + gamma) rho^d Theta(i, j)
  bool valid = false;                ///< rho >= 2 d^(3/2) / (gamma Lambda_min)
  double minimum_resolution = 0.0;   ///< 2 d^(3/2) / (gamma Lambda_min)
};

DegreeBound degree_bound(const ModelSpec& model, double resolution, double gamma);

/// |{m in Z^d : |m| < s}| by enumeration; d <= 3 and s <= 1000.
std::uint64_t lattice_points_in_ball(int dimension, double s);

/*!
 * exp((8 / n) sum_i lambda_i^2 vol^2) exp((2 delta + (4 eps / Lambda_min)^d) sum_i lambda_i vol) - 1.
 * Requires n >= 4 lambda_max vol, delta in [0, 1/2] and eps in [0, Lambda_min / 2].
 */
double discretization_error_factor(const ModelSpec& model, double n, double delta, double eps);

}  // namespace hardgrid
