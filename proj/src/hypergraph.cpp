#include "fusepeel/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fusepeel/errors.hpp"
#include "fusepeel/rng.hpp"

namespace fusepeel {

namespace {

// Keep everything comfortably below 2^62 so index arithmetic (and k * m
// incidence counts) cannot wrap.
constexpr std::uint64_t kIndexCap = std::uint64_t{1} << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  std::uint64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r) || r >= kIndexCap) {
    throw CapacityError(std::string(what) + " exceeds index capacity");
  }
  return r;
}

}  // namespace

std::uint64_t FuseParams::num_vertices() const {
  if (ell >= kIndexCap) throw CapacityError("fuse ell exceeds index capacity");
  return checked_mul(n, ell + k - 1, "fuse vertex count");
}

std::uint64_t FuseParams::num_edges() const {
  const double m = c * double(n) * double(ell);
  if (!(m >= 0) || m >= double(kIndexCap)) {
    throw CapacityError("fuse edge count exceeds index capacity");
  }
  return std::uint64_t(std::llround(m));
}

void FuseParams::validate() const {
  if (k < 3) throw std::invalid_argument("fuse: k must be >= 3");
  if (ell < 1) throw std::invalid_argument("fuse: ell must be >= 1");
  if (n < 1) throw std::invalid_argument("fuse: n must be >= 1");
  if (!(c > 0)) throw std::invalid_argument("fuse: c must be > 0");
  checked_mul(num_edges(), k, "fuse incidence count");
  (void)num_vertices();
}

Hypergraph::Hypergraph(std::uint64_t num_vertices, std::uint32_t k)
    : num_vertices_(num_vertices), k_(k) {
  if (k < 1) throw std::invalid_argument("hypergraph: edge size must be >= 1");
  if (num_vertices >= kIndexCap) {
    throw CapacityError("hypergraph vertex count exceeds index capacity");
  }
}

void Hypergraph::add_edge(std::span<const std::uint64_t> vertices) {
  if (vertices.size() != k_) {
    throw std::invalid_argument("hypergraph: edge has wrong size");
  }
  for (std::uint64_t v : vertices) {
    if (v >= num_vertices_) {
      throw std::invalid_argument("hypergraph: vertex index out of range");
    }
  }
  incidences_.insert(incidences_.end(), vertices.begin(), vertices.end());
}

Hypergraph generate_fuse(const FuseParams& params) {
  params.validate();
  const std::uint64_t m = params.num_edges();
  Hypergraph h(params.num_vertices(), params.k);
  h.reserve_edges(m);
  h.segment_layout = SegmentLayout{params.n, params.ell, params.k};

  std::vector<std::uint64_t> edge(params.k);
  for (std::uint64_t e = 0; e < m; ++e) {
    SplitMix64 rng(mix2(params.seed, e));
    const std::uint64_t j = rng.next_below(params.ell);
    for (std::uint32_t t = 0; t < params.k; ++t) {
      edge[t] = (j + t) * params.n + rng.next_below(params.n);
    }
    h.add_edge(edge);
  }
  return h;
}

Hypergraph generate_er(std::uint32_t k, std::uint64_t n_vertices,
                       std::uint64_t m_edges, std::uint64_t seed,
                       VertexSampling sampling) {
  if (k < 3) throw std::invalid_argument("er: k must be >= 3");
  if (n_vertices < k) throw std::invalid_argument("er: need n_vertices >= k");
  checked_mul(m_edges, k, "er incidence count");

  Hypergraph h(n_vertices, k);
  h.reserve_edges(m_edges);

  std::vector<std::uint64_t> edge(k);
  for (std::uint64_t e = 0; e < m_edges; ++e) {
    SplitMix64 rng(mix2(seed, e));
    for (;;) {
      for (std::uint32_t t = 0; t < k; ++t) {
        edge[t] = rng.next_below(n_vertices);
      }
      if (sampling == VertexSampling::with_replacement) break;
      bool distinct = true;
      for (std::uint32_t a = 0; a < k && distinct; ++a) {
        for (std::uint32_t b = a + 1; b < k; ++b) {
          if (edge[a] == edge[b]) {
            distinct = false;
            break;
          }
        }
      }
      if (distinct) break;
    }
    h.add_edge(edge);
  }
  return h;
}

namespace {

// Hopcroft-Karp with edges on the left and vertices on the right.
class IncidenceMatcher {
 public:
  explicit IncidenceMatcher(const Hypergraph& h)
      : h_(h),
        m_(h.num_edges()),
        match_edge_(m_, OrientResult::kUnassigned),
        match_vertex_(h.num_vertices(), OrientResult::kUnassigned),
        dist_(m_),
        queue_(m_) {}

  OrientResult run() {
    std::uint64_t matched = 0;
    while (bfs()) {
      for (std::uint64_t e = 0; e < m_; ++e) {
        if (match_edge_[e] == OrientResult::kUnassigned && dfs(e)) {
          ++matched;
        }
      }
    }
    OrientResult result;
    result.assignment = std::move(match_edge_);
    result.matched = matched;
    result.num_edges = m_;
    return result;
  }

 private:
  static constexpr std::uint32_t kInf = 0xffffffffu;

  bool bfs() {
    std::size_t head = 0, tail = 0;
    for (std::uint64_t e = 0; e < m_; ++e) {
      if (match_edge_[e] == OrientResult::kUnassigned) {
        dist_[e] = 0;
        queue_[tail++] = e;
      } else {
        dist_[e] = kInf;
      }
    }
    bool found_free = false;
    while (head < tail) {
      const std::uint64_t e = queue_[head++];
      for (std::uint64_t v : h_.edge(e)) {
        const std::uint64_t e2 = match_vertex_[v];
        if (e2 == OrientResult::kUnassigned) {
          found_free = true;
        } else if (dist_[e2] == kInf) {
          dist_[e2] = dist_[e] + 1;
          queue_[tail++] = e2;
        }
      }
    }
    return found_free;
  }

  bool dfs(std::uint64_t e) {
    for (std::uint64_t v : h_.edge(e)) {
      const std::uint64_t e2 = match_vertex_[v];
      if (e2 == OrientResult::kUnassigned ||
          (dist_[e2] == dist_[e] + 1 && dfs(e2))) {
        match_vertex_[v] = e;
        match_edge_[e] = v;
        return true;
      }
    }
    dist_[e] = kInf;
    return false;
  }

  const Hypergraph& h_;
  std::uint64_t m_;
  std::vector<std::uint64_t> match_edge_;
  std::vector<std::uint64_t> match_vertex_;
  std::vector<std::uint32_t> dist_;
  std::vector<std::uint64_t> queue_;
};

}  // namespace

OrientResult orient(const Hypergraph& h) { return IncidenceMatcher(h).run(); }

void write_graph(std::ostream& out, const Hypergraph& h) {
  out << h.edge_size() << ' ' << h.num_vertices() << ' ' << h.num_edges()
      << '\n';
  for (std::uint64_t e = 0; e < h.num_edges(); ++e) {
    const auto vs = h.edge(e);
    for (std::size_t t = 0; t < vs.size(); ++t) {
      if (t) out << ' ';
      out << vs[t];
    }
    out << '\n';
  }
}

Hypergraph read_graph(std::istream& in) {
  std::uint32_t k = 0;
  std::uint64_t n = 0, m = 0;
  if (!(in >> k >> n >> m)) {
    throw IoError("graph dump: malformed header");
  }
  Hypergraph h(n, k);
  h.reserve_edges(m);
  std::vector<std::uint64_t> edge(k);
  for (std::uint64_t e = 0; e < m; ++e) {
    for (std::uint32_t t = 0; t < k; ++t) {
      if (!(in >> edge[t])) {
        throw IoError("graph dump: truncated edge list");
      }
    }
    try {
      h.add_edge(edge);
    } catch (const std::invalid_argument& ex) {
      throw IoError(std::string("graph dump: ") + ex.what());
    }
  }
  return h;
}

}  // namespace fusepeel
