#include "hardgrid/graph_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "hardgrid/errors.hpp"

namespace hardgrid {
namespace {

constexpr char kMagic[8] = {'H', 'D', 'G', 'R', 'I', 'D', '0', '1'};
constexpr std::uint64_t kVersion = 1;

void put(std::ostream& out, std::uint64_t v) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

void put(std::ostream& out, double v) { put(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get(std::istream& in) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw ValidationError("graph", "truncated graph file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_graph_binary(const std::string& path, const HardCoreGraph& graph) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("output", "cannot open '" + path + "' for writing");
  out.write(kMagic, 8);
  put(out, kVersion);
  put(out, static_cast<std::uint64_t>(graph.points().dimension));
  put(out, static_cast<std::uint64_t>(graph.q()));
  put(out, static_cast<std::uint64_t>(graph.num_points()));
  put(out, graph.points().resolution);
  put(out, graph.points().seed);
  for (double w : graph.type_weights()) put(out, w);
  const std::size_t nv = graph.num_vertices();
  std::uint64_t offset = 0;
  put(out, offset);
  for (std::size_t v = 0; v < nv; ++v) {
    offset += graph.degree(v);
    put(out, offset);
  }
  for (std::size_t v = 0; v < nv; ++v) graph.for_each_neighbor(v, [&](std::size_t u) { put(out, static_cast<std::uint64_t>(u)); });
  if (!out) throw ValidationError("output", "failed writing '" + path + "'");
}

GraphFile read_graph_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("graph", "cannot open '" + path + "'");
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw ValidationError("graph", "not a hardgrid graph file");
  if (get(in) != kVersion) throw ValidationError("graph", "unsupported graph file version");
  GraphFile g;
  g.dimension = static_cast<int>(get(in));
  g.q = get(in);
  g.num_points = get(in);
  g.resolution = std::bit_cast<double>(get(in));
  g.seed = get(in);
  if (g.q == 0 || g.q > 1'000'000) throw ValidationError("graph", "implausible number of types");
  for (std::uint64_t i = 0; i < g.q; ++i) g.type_weights.push_back(std::bit_cast<double>(get(in)));
  const std::uint64_t nv = g.num_points * g.q;
  if (nv >= (std::uint64_t{1} << 32)) throw ValidationError("graph", "too many vertices");
  std::vector<std::uint64_t> offsets(nv + 1);
  for (auto& o : offsets) o = get(in);
  for (std::uint64_t v = 0; v < nv; ++v)
    if (offsets[v + 1] < offsets[v]) throw ValidationError("graph", "offsets are not monotone");
  std::vector<std::uint32_t> neighbors(offsets.back());
  for (auto& u : neighbors) {
    const std::uint64_t x = get(in);
    if (x >= nv) throw ValidationError("graph", "neighbor id out of range");
    u = static_cast<std::uint32_t>(x);
  }
  std::vector<double> weights(nv);
  for (std::uint64_t v = 0; v < nv; ++v) weights[v] = g.type_weights[v % g.q];
  g.graph = WeightedGraph::from_csr(std::move(offsets), std::move(neighbors), std::move(weights));
  return g;
}

void write_graph_text(const std::string& path, const HardCoreGraph& graph, std::uint64_t max_points) {
  if (graph.num_points() > max_points)
    throw CapacityError("text export is limited to " + std::to_string(max_points) + " points");
  std::ofstream out(path);
  if (!out) throw ValidationError("output", "cannot open '" + path + "' for writing");
  out.precision(17);
  out << "# hardgrid edge list\n";
  out << "# d " << graph.points().dimension << " q " << graph.q() << " n " << graph.num_points() << " rho "
      << graph.points().resolution << " seed " << graph.points().seed << "\n";
  out << "# weights";
  for (double w : graph.type_weights()) out << ' ' << w;
  out << "\n";
  for (std::size_t v = 0; v < graph.num_vertices(); ++v)
    graph.for_each_neighbor(v, [&](std::size_t u) {
      if (v < u) out << v << ' ' << u << '\n';
    });
}

}  // namespace hardgrid
