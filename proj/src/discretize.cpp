#include "hardgrid/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hardgrid/errors.hpp"
#include "hardgrid/hardcore.hpp"
#include "hardgrid/parallel.hpp"
#include "numeric_util.hpp"

namespace hardgrid {

double smallest_feasible_resolution(double side_length, double rho_min) {
  detail::require(side_length > 0.0, "smallest_feasible_resolution: side length must be positive");
  detail::require(rho_min > 0.0, "smallest_feasible_resolution: minimum resolution must be positive");
  const double m = std::max(1.0, detail::tolerant_ceil(side_length * rho_min));
  return m / side_length;
}

bool is_feasible_resolution(double side_length, double rho) {
  const double x = side_length * rho;
  const double m = std::nearbyint(x);
  return m >= 1.0 && std::abs(x - m) <= 1e-9 * m;
}

double closed_form_resolution(const ModelSpec& model, double eps, double constant) {
  const double lambda_min = model.interaction().lambda_min();
  detail::require(eps > 0.0, "resolution: error target must be positive");
  const int d = model.dimension();
  const double lmax = model.fugacities().lambda_max();
  const double base = constant * static_cast<double>(model.q()) * std::max(lmax, lmax * lmax) * model.volume() / eps;
  return std::sqrt(static_cast<double>(d)) * std::pow(base, 1.0 / d) * std::max(1.0, 4.0 / lambda_min);
}

namespace {

bool adaptive_ok(const ModelSpec& model, double m, double target) {
  const int d = model.dimension();
  const double rho = m / model.region().side_length();
  const double n = std::pow(m, d);
  const double eps = std::sqrt(static_cast<double>(d)) / rho;
  if (n < 4.0 * model.fugacities().lambda_max() * model.volume()) return false;
  if (eps > model.interaction().lambda_min() / 2.0) return false;
  return discretization_error_factor(model, n, 0.0, eps) <= target;
}

}  // namespace

double resolution_for_error(const ModelSpec& model, double eps_d, ResolutionMode mode) {
  detail::require(eps_d > 0.0 && eps_d <= 1.0, "resolution_for_error: eps_d must lie in (0, 1]");
  if (!std::isfinite(model.interaction().lambda_min()))
    throw PreconditionError("resolution_for_error: every interaction distance is zero, the model needs no discretization");
  const double side = model.region().side_length();
  const double closed = smallest_feasible_resolution(side, std::max(closed_form_resolution(model, eps_d, 48.0), 1.0 / side));
  if (mode == ResolutionMode::closed_form) return closed;

  // Error factor f gives Z_hc in [(1 - f) Z, (1 + f) Z]; f <= 1 - exp(-eps_d) bounds both sides.
  const double target = -std::expm1(-eps_d);
  double hi = std::nearbyint(closed * side);
  while (!adaptive_ok(model, hi, target)) {
    hi *= 2.0;
    if (hi > 1e15) throw CapacityError("resolution_for_error: no adaptive resolution below 1e15 points per axis");
  }
  double lo = 1.0;
  while (lo < hi) {
    const double mid = std::floor((lo + hi) / 2.0);
    if (adaptive_ok(model, mid, target))
      hi = mid;
    else
      lo = mid + 1.0;
  }
  return hi / side;
}

std::vector<double> PointSet::position(std::size_t point) const {
  std::vector<double> p(static_cast<std::size_t>(dimension));
  const double s = scale();
  for (int a = 0; a < dimension; ++a) p[static_cast<std::size_t>(a)] = coord(point, a) / s;
  return p;
}

CanonicalPointSet::CanonicalPointSet(Region region, double resolution) : region_(region), resolution_(resolution) {
  if (!is_feasible_resolution(region.side_length(), resolution))
    throw ValidationError("resolution", "side_length * resolution must be a positive integer");
  per_axis_ = static_cast<std::uint64_t>(std::nearbyint(region.side_length() * resolution));
}

std::uint64_t CanonicalPointSet::size() const noexcept {
  std::uint64_t n = 1;
  for (int a = 0; a < region_.dimension(); ++a) {
    if (n > std::numeric_limits<std::uint64_t>::max() / per_axis_) return std::numeric_limits<std::uint64_t>::max();
    n *= per_axis_;
  }
  return n;
}

std::vector<std::uint64_t> CanonicalPointSet::grid_index(std::uint64_t point) const {
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(region_.dimension()));
  for (auto& c : idx) {
    c = point % per_axis_;
    point /= per_axis_;
  }
  return idx;
}

std::vector<double> CanonicalPointSet::position(std::uint64_t point) const {
  const auto idx = grid_index(point);
  std::vector<double> p(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) p[a] = static_cast<double>(idx[a]) / resolution_;
  return p;
}

PointSet CanonicalPointSet::materialize(std::uint64_t max_points) const {
  const std::uint64_t n = size();
  if (n > max_points)
    throw CapacityError("canonical point set has " + std::to_string(n) + " points, above the cap of " +
                        std::to_string(max_points));
  PointSet out;
  out.dimension = region_.dimension();
  out.side_length = region_.side_length();
  out.resolution = resolution_;
  out.coords.resize(n * static_cast<std::uint64_t>(out.dimension));
  std::vector<std::uint64_t> idx(static_cast<std::size_t>(out.dimension), 0);
  for (std::uint64_t p = 0; p < n; ++p) {
    for (int a = 0; a < out.dimension; ++a)
      out.coords[p * static_cast<std::uint64_t>(out.dimension) + static_cast<std::uint64_t>(a)] =
          static_cast<double>(idx[static_cast<std::size_t>(a)]);
    for (auto& c : idx) {
      if (++c < per_axis_) break;
      c = 0;
    }
  }
  return out;
}

PointSet random_point_set(const Region& region, std::size_t n, std::uint64_t seed) {
  PointSet out;
  out.dimension = region.dimension();
  out.side_length = region.side_length();
  out.seed = seed;
  out.coords.resize(n * static_cast<std::size_t>(out.dimension));
  Rng rng(seed);
  const double side = region.side_length();
  const double below_side = std::nextafter(side, 0.0);
  for (double& c : out.coords) c = std::min(rng.uniform() * side, below_side);
  return out;
}

std::vector<double> canonical_allocate(std::span<const double> y, double resolution) {
  std::vector<double> out(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) out[a] = std::floor(resolution * y[a]) / resolution;
  return out;
}

std::uint64_t HypercubePartitioning::size() const noexcept {
  std::uint64_t m = 1;
  for (int a = 0; a < dimension; ++a) m *= cells_per_axis;
  return m;
}

double HypercubePartitioning::epsilon() const noexcept {
  return std::sqrt(static_cast<double>(dimension)) * cell_side();
}

std::uint64_t HypercubePartitioning::cell_of(std::span<const double> position) const {
  std::uint64_t id = 0, stride = 1;
  const double side = cell_side();
  for (int a = 0; a < dimension; ++a) {
    const double c = std::floor(position[static_cast<std::size_t>(a)] / side);
    const auto k = static_cast<std::uint64_t>(std::clamp(c, 0.0, static_cast<double>(cells_per_axis - 1)));
    id += k * stride;
    stride *= cells_per_axis;
  }
  return id;
}

HypercubePartitioning hypercube_partitioning(int dimension, double side_length, double eps) {
  detail::require(dimension >= 1, "hypercube_partitioning: dimension must be >= 1");
  detail::require(side_length > 0.0, "hypercube_partitioning: side length must be positive");
  detail::require(eps > 0.0, "hypercube_partitioning: eps must be positive");
  HypercubePartitioning p;
  p.dimension = dimension;
  p.side_length = side_length;
  p.cells_per_axis = static_cast<std::uint64_t>(
      std::max(1.0, detail::tolerant_ceil(std::sqrt(static_cast<double>(dimension)) * side_length / eps)));
  return p;
}

Allocation Allocation::canonical_floor(const Region& region, double resolution) {
  CanonicalPointSet grid(region, resolution);
  Allocation a;
  a.kind_ = AllocationKind::canonical_floor;
  a.dimension_ = region.dimension();
  a.side_length_ = region.side_length();
  a.num_points_ = grid.size();
  a.resolution_ = resolution;
  a.delta_ = 0.0;
  a.epsilon_ = std::sqrt(static_cast<double>(region.dimension())) / resolution;
  return a;
}

double Allocation::cell_volume(std::size_t point) const {
  if (kind_ == AllocationKind::canonical_floor) return std::pow(1.0 / resolution_, dimension_);
  double v = 1.0;
  for (int a = 0; a < dimension_; ++a) {
    const std::size_t k = point * static_cast<std::size_t>(dimension_) + static_cast<std::size_t>(a);
    v *= hi_[k] - lo_[k];
  }
  return v;
}

void Allocation::cell_box(std::size_t point, std::span<double> lo, std::span<double> hi) const {
  if (point >= num_points_) throw PreconditionError("allocation: point index out of range");
  if (kind_ == AllocationKind::canonical_floor) {
    const auto per_axis = static_cast<std::uint64_t>(std::nearbyint(side_length_ * resolution_));
    std::uint64_t rest = point;
    for (int a = 0; a < dimension_; ++a) {
      const auto idx = static_cast<double>(rest % per_axis);
      rest /= per_axis;
      lo[static_cast<std::size_t>(a)] = idx / resolution_;
      hi[static_cast<std::size_t>(a)] = (idx + 1.0) / resolution_;
    }
    return;
  }
  for (int a = 0; a < dimension_; ++a) {
    const std::size_t k = point * static_cast<std::size_t>(dimension_) + static_cast<std::size_t>(a);
    lo[static_cast<std::size_t>(a)] = lo_[k];
    hi[static_cast<std::size_t>(a)] = hi_[k];
  }
}

std::vector<double> Allocation::sample_cell(std::size_t point, Rng& rng) const {
  std::vector<double> lo(static_cast<std::size_t>(dimension_)), hi(lo.size()), out(lo.size());
  cell_box(point, lo, hi);
  for (std::size_t a = 0; a < out.size(); ++a) {
    const double x = lo[a] + (hi[a] - lo[a]) * rng.uniform();
    out[a] = std::min(x, std::nextafter(hi[a], lo[a]));
  }
  return out;
}

std::size_t Allocation::allocate_index(std::span<const double> y) const {
  if (kind_ == AllocationKind::canonical_floor) {
    const auto per_axis = static_cast<std::uint64_t>(std::nearbyint(side_length_ * resolution_));
    std::uint64_t id = 0, stride = 1;
    for (int a = 0; a < dimension_; ++a) {
      const double c = std::floor(resolution_ * y[static_cast<std::size_t>(a)]);
      id += static_cast<std::uint64_t>(std::clamp(c, 0.0, static_cast<double>(per_axis - 1))) * stride;
      stride *= per_axis;
    }
    return id;
  }
  const std::uint64_t cell = partitioning_.cell_of(y);
  const std::size_t begin = cell_start_[cell], count = cell_start_[cell + 1] - begin;
  const double side = partitioning_.cell_side();
  const double cell_lo = std::floor(y[0] / side) * side;
  const double c = std::floor((y[0] - cell_lo) / side * static_cast<double>(count));
  const auto slab = static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(count - 1)));
  return cell_points_[begin + slab];
}

struct PartitionAllocationBuilder {
  static std::variant<Allocation, EmptyCell> build(const PointSet& points, const HypercubePartitioning& part) {
    detail::require(points.dimension == part.dimension, "partition allocation: dimension mismatch");
    const std::size_t n = points.size();
    const std::uint64_t m = part.size();
    const auto d = static_cast<std::size_t>(points.dimension);
    std::vector<std::uint64_t> cell(n);
    std::vector<std::size_t> start(m + 1, 0);
    for (std::size_t p = 0; p < n; ++p) {
      cell[p] = part.cell_of(points.position(p));
      ++start[cell[p] + 1];
    }
    for (std::uint64_t c = 0; c < m; ++c)
      if (start[c + 1] == 0) return EmptyCell{c};
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::size_t> order(n), fill(start.begin(), start.end() - 1);
    for (std::size_t p = 0; p < n; ++p) order[fill[cell[p]]++] = p;

    Allocation a;
    a.kind_ = AllocationKind::partition_based;
    a.dimension_ = points.dimension;
    a.side_length_ = points.side_length;
    a.num_points_ = n;
    a.epsilon_ = part.epsilon();
    a.partitioning_ = part;
    a.lo_.resize(n * d);
    a.hi_.resize(n * d);
    const double side = part.cell_side();
    const double volume = std::pow(points.side_length, points.dimension);
    const double cell_volume = volume / static_cast<double>(m);
    double delta = 0.0;
    for (std::uint64_t c = 0; c < m; ++c) {
      const auto first = order.begin() + static_cast<std::ptrdiff_t>(start[c]);
      const auto last = order.begin() + static_cast<std::ptrdiff_t>(start[c + 1]);
      std::stable_sort(first, last, [&](std::size_t x, std::size_t y) { return points.coord(x, 0) < points.coord(y, 0); });
      const std::size_t count = start[c + 1] - start[c];
      delta = std::max(delta, std::abs(cell_volume / static_cast<double>(count) * static_cast<double>(n) / volume - 1.0));
      std::vector<double> lo(d);
      std::uint64_t rest = c;
      for (std::size_t ax = 0; ax < d; ++ax) {
        lo[ax] = static_cast<double>(rest % part.cells_per_axis) * side;
        rest /= part.cells_per_axis;
      }
      const double slab = side / static_cast<double>(count);
      for (std::size_t s = 0; s < count; ++s) {
        const std::size_t p = *(first + static_cast<std::ptrdiff_t>(s));
        for (std::size_t ax = 0; ax < d; ++ax) {
          a.lo_[p * d + ax] = lo[ax];
          a.hi_[p * d + ax] = lo[ax] + side;
        }
        a.lo_[p * d] = lo[0] + slab * static_cast<double>(s);
        a.hi_[p * d] = s + 1 == count ? lo[0] + side : lo[0] + slab * static_cast<double>(s + 1);
      }
    }
    a.delta_ = delta;
    a.cell_start_ = std::move(start);
    a.cell_points_ = std::move(order);
    return a;
  }
};

std::variant<Allocation, EmptyCell> partition_allocation_from_random(const PointSet& points,
                                                                     const HypercubePartitioning& partitioning) {
  return PartitionAllocationBuilder::build(points, partitioning);
}

// ---------------------------------------------------------------------------

HardCoreGraph::HardCoreGraph(PointSet points, const ModelSpec& model, std::vector<std::uint64_t> offsets,
                             std::vector<std::uint32_t> neighbors)
    : points_(std::move(points)), q_(model.q()), offsets_(std::move(offsets)), neighbors_(std::move(neighbors)) {
  const double n = static_cast<double>(points_.size());
  for (double lambda : model.fugacities().values()) type_weights_.push_back(lambda * model.volume() / n);
  const double s = points_.scale();
  threshold2_.resize(q_ * q_);
  for (std::size_t i = 0; i < q_; ++i)
    for (std::size_t j = 0; j < q_; ++j) {
      const double t = model.interaction()(i, j) * s;
      threshold2_[i * q_ + j] = t * t;
    }
}

double HardCoreGraph::distance2(std::size_t a, std::size_t b) const noexcept {
  double d2 = 0.0;
  for (int ax = 0; ax < points_.dimension; ++ax) {
    const double diff = points_.coord(a, ax) - points_.coord(b, ax);
    d2 += diff * diff;
  }
  return d2;
}

std::size_t HardCoreGraph::degree(std::size_t vertex) const {
  std::size_t count = 0;
  for_each_neighbor(vertex, [&](std::size_t) { ++count; });
  return count;
}

std::size_t HardCoreGraph::max_degree() const {
  std::size_t best = 0;
  for (std::size_t v = 0; v < num_vertices(); ++v) best = std::max(best, degree(v));
  return best;
}

std::size_t HardCoreGraph::type_degree(std::size_t vertex, std::size_t j) const {
  std::size_t count = 0;
  for_each_neighbor(vertex, [&](std::size_t u) { count += (u % q_ == j); });
  return count;
}

WeightedGraph HardCoreGraph::to_weighted() const {
  const std::size_t n = num_vertices();
  if (n >= std::numeric_limits<std::uint32_t>::max())
    throw CapacityError("hard-core graph has too many vertices for 32-bit vertex ids");
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) offsets[v + 1] = offsets[v] + degree(v);
  std::vector<std::uint32_t> neighbors(offsets[n]);
  parallel_for(n, [&](std::size_t v) {
    std::uint64_t k = offsets[v];
    for_each_neighbor(v, [&](std::size_t u) { neighbors[k++] = static_cast<std::uint32_t>(u); });
  });
  std::vector<double> weights(n);
  for (std::size_t v = 0; v < n; ++v) weights[v] = weight(v);
  return WeightedGraph::from_csr(std::move(offsets), std::move(neighbors), std::move(weights));
}

namespace {

void validate_points(const ModelSpec& model, const PointSet& points) {
  if (points.size() == 0) throw PreconditionError("build_graph: the point set is empty");
  if (points.dimension != model.dimension()) throw PreconditionError("build_graph: point dimension differs from the model");
  const double extent = model.region().side_length() * points.scale();
  for (double c : points.coords)
    if (!(c >= 0.0 && c < extent)) throw PreconditionError("build_graph: point outside the region");
  if (points.size() >= std::numeric_limits<std::uint32_t>::max())
    throw CapacityError("build_graph: too many points for 32-bit ids");
}

/// Uniform cell grid over the region with cells at least `reach` wide.
struct SpatialHash {
  int d = 1;
  std::uint64_t k = 1;
  double cell_side = 1.0;
  std::vector<std::uint64_t> cell_of_point;
  std::vector<std::size_t> start;
  std::vector<std::uint32_t> members;

  SpatialHash(const PointSet& points, double extent, double reach) : d(points.dimension) {
    const std::size_t n = points.size();
    double per_axis = std::max(1.0, std::floor(extent / reach));
    const double cap = std::max(1.0, std::floor(std::pow(2.0 * static_cast<double>(n), 1.0 / d)));
    per_axis = std::min(per_axis, cap);
    k = static_cast<std::uint64_t>(per_axis);
    cell_side = extent / per_axis;
    std::uint64_t cells = 1;
    for (int a = 0; a < d; ++a) cells *= k;
    cell_of_point.resize(n);
    start.assign(cells + 1, 0);
    for (std::size_t p = 0; p < n; ++p) {
      std::uint64_t id = 0, stride = 1;
      for (int a = 0; a < d; ++a) {
        const double c = std::floor(points.coord(p, a) / cell_side);
        id += static_cast<std::uint64_t>(std::clamp(c, 0.0, per_axis - 1.0)) * stride;
        stride *= k;
      }
      cell_of_point[p] = id;
      ++start[id + 1];
    }
    std::partial_sum(start.begin(), start.end(), start.begin());
    members.resize(n);
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t p = 0; p < n; ++p) members[fill[cell_of_point[p]]++] = static_cast<std::uint32_t>(p);
  }

  /// Calls fn(cell) for the cell and each existing neighbor cell (3^d block).
  template <class Fn>
  void for_each_adjacent(std::uint64_t cell, Fn&& fn) const {
    std::vector<std::int64_t> base(static_cast<std::size_t>(d));
    std::uint64_t rest = cell;
    for (auto& b : base) {
      b = static_cast<std::int64_t>(rest % k);
      rest /= k;
    }
    std::vector<int> offset(static_cast<std::size_t>(d), -1);
    while (true) {
      bool inside = true;
      std::uint64_t id = 0, stride = 1;
      for (std::size_t a = 0; a < base.size(); ++a) {
        const std::int64_t c = base[a] + offset[a];
        if (c < 0 || c >= static_cast<std::int64_t>(k)) {
          inside = false;
          break;
        }
        id += static_cast<std::uint64_t>(c) * stride;
        stride *= k;
      }
      if (inside) fn(id);
      std::size_t a = 0;
      for (; a < offset.size(); ++a) {
        if (++offset[a] <= 1) break;
        offset[a] = -1;
      }
      if (a == offset.size()) break;
    }
  }
};

double reach_of(const ModelSpec& model, const PointSet& points) {
  return model.q() == 1 ? model.interaction()(0, 0) * points.scale()
                        : model.interaction().lambda_max() * points.scale();
}

}  // namespace

std::uint64_t estimate_scanned_pairs(const ModelSpec& model, const PointSet& points) {
  const double reach = reach_of(model, points);
  if (reach <= 0.0 || points.size() == 0) return 0;
  const SpatialHash hash(points, model.region().side_length() * points.scale(), reach);
  std::uint64_t pairs = 0;
  const std::size_t cells = hash.start.size() - 1;
  for (std::uint64_t c = 0; c < cells; ++c) {
    const std::uint64_t here = hash.start[c + 1] - hash.start[c];
    if (here == 0) continue;
    std::uint64_t around = 0;
    hash.for_each_adjacent(c, [&](std::uint64_t other) { around += hash.start[other + 1] - hash.start[other]; });
    pairs += here * around;
  }
  return pairs;
}

HardCoreGraph build_graph(const ModelSpec& model, PointSet points, std::uint64_t max_pairs) {
  validate_points(model, points);
  const std::size_t n = points.size();
  const double reach = reach_of(model, points);
  std::vector<std::uint64_t> offsets(n + 1, 0);
  if (reach <= 0.0) return HardCoreGraph(std::move(points), model, std::move(offsets), {});

  const std::uint64_t scanned = estimate_scanned_pairs(model, points);
  if (scanned > max_pairs) {
    throw CapacityError("build_graph: the spatial hash would scan " + std::to_string(scanned) +
                        " point pairs (cap " + std::to_string(max_pairs) + "); adjacency needs up to about " +
                        std::to_string(scanned * sizeof(std::uint32_t) / (1 << 20)) + " MiB");
  }
  const SpatialHash hash(points, model.region().side_length() * points.scale(), reach);
  const double reach2 = reach * reach;
  const auto d = points.dimension;
  auto close = [&](std::size_t a, std::size_t b) {
    double d2 = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const double diff = points.coord(a, ax) - points.coord(b, ax);
      d2 += diff * diff;
    }
    return d2 < reach2;
  };

  std::vector<std::uint64_t> counts(n, 0);
  parallel_for(n, [&](std::size_t p) {
    std::uint64_t c = 0;
    hash.for_each_adjacent(hash.cell_of_point[p], [&](std::uint64_t cell) {
      for (std::size_t k = hash.start[cell]; k < hash.start[cell + 1]; ++k) {
        const std::uint32_t other = hash.members[k];
        if (other != p && close(p, other)) ++c;
      }
    });
    counts[p] = c;
  });
  for (std::size_t p = 0; p < n; ++p) offsets[p + 1] = offsets[p] + counts[p];
  std::vector<std::uint32_t> neighbors(offsets[n]);
  parallel_for(n, [&](std::size_t p) {
    std::uint64_t k0 = offsets[p], k = k0;
    hash.for_each_adjacent(hash.cell_of_point[p], [&](std::uint64_t cell) {
      for (std::size_t m = hash.start[cell]; m < hash.start[cell + 1]; ++m) {
        const std::uint32_t other = hash.members[m];
        if (other != p && close(p, other)) neighbors[k++] = other;
      }
    });
    std::sort(neighbors.begin() + static_cast<std::ptrdiff_t>(k0), neighbors.begin() + static_cast<std::ptrdiff_t>(k));
  });
  return HardCoreGraph(std::move(points), model, std::move(offsets), std::move(neighbors));
}

HardCoreGraph build_graph_all_pairs(const ModelSpec& model, PointSet points) {
  validate_points(model, points);
  const std::size_t n = points.size();
  const double reach = reach_of(model, points);
  const double reach2 = reach * reach;
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double d2 = 0.0;
      for (int ax = 0; ax < points.dimension; ++ax) {
        const double diff = points.coord(a, ax) - points.coord(b, ax);
        d2 += diff * diff;
      }
      if (d2 < reach2) adj[a].push_back(static_cast<std::uint32_t>(b));
    }
  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<std::uint32_t> neighbors;
  for (std::size_t a = 0; a < n; ++a) {
    neighbors.insert(neighbors.end(), adj[a].begin(), adj[a].end());
    offsets[a + 1] = neighbors.size();
  }
  return HardCoreGraph(std::move(points), model, std::move(offsets), std::move(neighbors));
}

// ---------------------------------------------------------------------------

DegreeBound degree_bound(const ModelSpec& model, double resolution, double gamma) {
  detail::require(gamma > 0.0, "degree_bound: gamma must be positive");
  const int d = model.dimension();
  const SquareMatrix theta = volume_exclusion_matrix(model);
  std::vector<double> bounds(theta.entries().size());
  const double scale = (1.0 + gamma) * std::pow(resolution, d);
  for (std::size_t k = 0; k < bounds.size(); ++k) bounds[k] = scale * theta.entries()[k];
  DegreeBound out;
  out.bounds = SquareMatrix(theta.size(), std::move(bounds));
  out.minimum_resolution = 2.0 * std::pow(static_cast<double>(d), 1.5) / (gamma * model.interaction().lambda_min());
  out.valid = resolution >= out.minimum_resolution;
  return out;
}

std::uint64_t lattice_points_in_ball(int dimension, double s) {
  if (dimension < 1 || dimension > 3 || !(s > 0.0) || s > 1000.0)
    throw PreconditionError("lattice_points_in_ball: requires 1 <= d <= 3 and 0 < s <= 1000");
  const double s2 = s * s;
  // Number of integers c with c^2 < rem.
  auto line = [](double rem) -> std::uint64_t {
    if (rem <= 0.0) return 0;
    auto c = static_cast<std::int64_t>(std::floor(std::sqrt(rem)));
    while (c > 0 && static_cast<double>(c) * static_cast<double>(c) >= rem) --c;
    while (static_cast<double>(c + 1) * static_cast<double>(c + 1) < rem) ++c;
    return static_cast<std::uint64_t>(2 * c + 1);
  };
  const auto r = static_cast<std::int64_t>(std::ceil(s));
  if (dimension == 1) return line(s2);
  std::uint64_t total = 0;
  if (dimension == 2) {
    for (std::int64_t a = -r; a <= r; ++a) total += line(s2 - static_cast<double>(a * a));
    return total;
  }
  for (std::int64_t a = -r; a <= r; ++a)
    for (std::int64_t b = -r; b <= r; ++b) total += line(s2 - static_cast<double>(a * a + b * b));
  return total;
}

double discretization_error_factor(const ModelSpec& model, double n, double delta, double eps) {
  const double vol = model.volume();
  const double lambda_min = model.interaction().lambda_min();
  if (!(n >= 4.0 * model.fugacities().lambda_max() * vol) || !(n > 0.0))
    throw PreconditionError("discretization error bound requires |X| >= 4 lambda_max vol(V)");
  if (!(delta >= 0.0 && delta <= 0.5)) throw PreconditionError("discretization error bound requires delta in [0, 1/2]");
  if (!(eps >= 0.0 && eps <= lambda_min / 2.0))
    throw PreconditionError("discretization error bound requires eps in [0, Lambda_min / 2]");
  double sum = 0.0, sum_sq = 0.0;
  for (double l : model.fugacities().values()) {
    sum += l;
    sum_sq += l * l;
  }
  const double radius_term = std::isfinite(lambda_min) ? std::pow(4.0 * eps / lambda_min, model.dimension()) : 0.0;
  const double exponent = 8.0 / n * sum_sq * vol * vol + (2.0 * delta + radius_term) * sum * vol;
  return std::expm1(exponent);
}

}  // namespace hardgrid
