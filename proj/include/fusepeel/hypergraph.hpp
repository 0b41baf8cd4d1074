#ifndef FUSEPEEL_HYPERGRAPH_HPP
#define FUSEPEEL_HYPERGRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace fusepeel {

// Segment geometry of a fuse graph: ell + k - 1 consecutive segments of n
// vertices each; the segment of vertex v is v / n. Indices are 0-based
// throughout the project (types j in [0, ell), segments i in [0, ell+k-1)).
struct SegmentLayout {
  std::uint64_t n = 0;
  std::uint64_t ell = 0;
  std::uint32_t k = 0;

  std::uint64_t num_segments() const { return ell + k - 1; }
  std::uint64_t segment_of(std::uint64_t v) const { return v / n; }

  // A fuse edge satisfies vertices[t] = (type + t) * n + offset(t).
  std::uint64_t edge_type(std::span<const std::uint64_t> edge) const {
    return edge[0] / n;
  }
  std::uint64_t offset_of(std::uint64_t v) const { return v % n; }
};

// Parameters of the fuse-graph distribution F(n, k, c, ell).
struct FuseParams {
  std::uint32_t k = 3;    // edge size, >= 3
  double c = 0.9;         // per-segment edge density, > 0
  std::uint64_t ell = 1;  // number of edge types, >= 1
  std::uint64_t n = 1;    // segment size, >= 1
  std::uint64_t seed = 0;

  std::uint64_t num_vertices() const;  // n * (ell + k - 1)
  std::uint64_t num_edges() const;     // round(c * n * ell)
  double edge_density() const { return c * double(ell) / double(ell + k - 1); }

  // Throws std::invalid_argument on bad fields, CapacityError on overflow.
  void validate() const;
};

// One hyperedge as a standalone value. For fuse edges vertices[t] lies in
// segment type + t and equals (type + t) * n + offset[t].
struct Edge {
  std::vector<std::uint64_t> vertices;
};

// k-uniform hypergraph with flat incidence storage. Duplicate edges are kept
// as-is; vertices inside an edge may repeat only for with-replacement
// Erdos-Renyi sampling.
class Hypergraph {
 public:
  Hypergraph(std::uint64_t num_vertices, std::uint32_t k);

  std::uint64_t num_vertices() const { return num_vertices_; }
  std::uint64_t num_edges() const { return incidences_.size() / k_; }
  std::uint32_t edge_size() const { return k_; }
  std::uint64_t num_incidences() const { return incidences_.size(); }

  std::span<const std::uint64_t> edge(std::uint64_t e) const {
    return {incidences_.data() + e * k_, k_};
  }

  // Vertices must already be < num_vertices(); size must equal edge_size().
  void add_edge(std::span<const std::uint64_t> vertices);
  void reserve_edges(std::uint64_t m) { incidences_.reserve(m * k_); }

  std::optional<SegmentLayout> segment_layout;

 private:
  std::uint64_t num_vertices_;
  std::uint32_t k_;
  std::vector<std::uint64_t> incidences_;
};

// Deterministic fuse-graph generator: edge e draws its type and offsets from
// the splitmix64 stream seeded with mix2(params.seed, e), so generation is
// order-independent over edges.
Hypergraph generate_fuse(const FuseParams& params);

enum class VertexSampling {
  distinct,          // redraw an edge until its k vertices are distinct
  with_replacement,  // k fully independent draws
};

// k-uniform Erdos-Renyi hypergraph with m_edges independent edges.
Hypergraph generate_er(std::uint32_t k, std::uint64_t n_vertices,
                       std::uint64_t m_edges, std::uint64_t seed,
                       VertexSampling sampling = VertexSampling::distinct);

// Injective edge -> vertex assignment (f(e) in e), or the best partial one.
struct OrientResult {
  static constexpr std::uint64_t kUnassigned =
      std::numeric_limits<std::uint64_t>::max();

  std::vector<std::uint64_t> assignment;  // per edge; kUnassigned if unmatched
  std::uint64_t matched = 0;              // size of the maximum matching
  std::uint64_t num_edges = 0;

  bool full() const { return matched == num_edges; }
};

// Maximum matching of the bipartite incidence graph (Hopcroft-Karp).
// Intended for desk-scale graphs (up to ~1e6 incidences).
OrientResult orient(const Hypergraph& h);

// Line-oriented debug dump: header "k n_vertices n_edges", then one edge per
// line as space-separated vertex indices. Segment layout is not stored.
void write_graph(std::ostream& out, const Hypergraph& h);
Hypergraph read_graph(std::istream& in);  // throws IoError on malformed input

}  // namespace fusepeel

#endif  // FUSEPEEL_HYPERGRAPH_HPP
