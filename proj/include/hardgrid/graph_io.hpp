#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hardgrid/discretize.hpp"
#include "hardgrid/hardcore.hpp"

namespace hardgrid {

/// A graph read back from disk together with its construction metadata.
struct GraphFile {
  int dimension = 0;
  std::uint64_t q = 0;
  std::uint64_t num_points = 0;
  double resolution = 0.0;  ///< 0 for random point sets
  std::uint64_t seed = 0;
  std::vector<double> type_weights;
  WeightedGraph graph;
};

/*!
 * Binary layout, every field 64-bit little-endian:
 * magic "HDGRID01", version, d, q, n, rho (IEEE double, 0 for random sets),
 * seed, q type weights (IEEE double), n q + 1 vertex offsets, neighbor ids.
 */
void write_graph_binary(const std::string& path, const HardCoreGraph& graph);
GraphFile read_graph_binary(const std::string& path);

/// Edge list with a commented header; refuses point sets above max_points.
void write_graph_text(const std::string& path, const HardCoreGraph& graph, std::uint64_t max_points = 10'000);

}  // namespace hardgrid
