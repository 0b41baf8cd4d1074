#include "fusepeel/peel.hpp"

#include <algorithm>
#include <stdexcept>

namespace fusepeel {

namespace {

// Degree counter plus XOR-of-incident-edge-indices accumulator per vertex.
// When the degree of a vertex drops to exactly 1, the accumulator holds the
// index of its unique remaining edge, so peeling needs no adjacency lists.
struct PeelState {
  explicit PeelState(const Hypergraph& h)
      : h(h),
        deg(h.num_vertices(), 0),
        acc(h.num_vertices(), 0),
        vertex_alive(h.num_vertices(), 1),
        edge_alive(h.num_edges(), 1) {
    for (std::uint64_t e = 0; e < h.num_edges(); ++e) {
      for (std::uint64_t v : h.edge(e)) {
        deg[v]++;
        acc[v] ^= e;
      }
    }
    work = h.num_incidences();
  }

  // Removes edge e; appends vertices whose degree dropped to <= 1 to `out`.
  void remove_edge(std::uint64_t e, std::vector<std::uint64_t>& out) {
    edge_alive[e] = 0;
    for (std::uint64_t v : h.edge(e)) {
      ++work;
      if (!vertex_alive[v]) continue;
      deg[v]--;
      acc[v] ^= e;
      if (deg[v] <= 1) out.push_back(v);
    }
  }

  // Deletes vertex v (alive, degree <= 1 guaranteed by the caller) and
  // returns its peel record; removes its unique edge if it has one.
  PeelRecord delete_vertex(std::uint64_t v, std::vector<std::uint64_t>& out) {
    vertex_alive[v] = 0;
    ++work;
    if (deg[v] == 1) {
      const std::uint64_t e = acc[v];
      remove_edge(e, out);
      return PeelRecord{v, e};
    }
    return PeelRecord{v, PeelRecord::kNoEdge};
  }

  void finish(PeelResult& r) {
    for (std::uint64_t v = 0; v < h.num_vertices(); ++v) {
      if (vertex_alive[v]) r.core_vertices.push_back(v);
    }
    for (std::uint64_t e = 0; e < h.num_edges(); ++e) {
      if (edge_alive[e]) r.core_edges.push_back(e);
    }
    r.layout = h.segment_layout;
    r.work = work;
  }

  const Hypergraph& h;
  std::vector<std::uint32_t> deg;
  std::vector<std::uint64_t> acc;
  std::vector<std::uint8_t> vertex_alive;
  std::vector<std::uint8_t> edge_alive;
  std::uint64_t work = 0;
};

}  // namespace

PeelResult peel_rounds(const Hypergraph& h) {
  PeelState st(h);
  PeelResult result;
  result.peel_order.reserve(h.num_vertices());

  const bool track_segments = h.segment_layout.has_value();
  std::vector<std::uint64_t> survivors;
  if (track_segments) {
    survivors.assign(h.segment_layout->num_segments(), h.segment_layout->n);
    result.survivors_by_round.push_back(survivors);
  }

  std::uint64_t alive_count = h.num_vertices();

  // Deletable set of the upcoming round, fixed before the round runs.
  std::vector<std::uint64_t> candidates;
  for (std::uint64_t v = 0; v < h.num_vertices(); ++v) {
    if (st.deg[v] <= 1) candidates.push_back(v);
  }

  std::vector<std::uint64_t> touched;
  for (;;) {
    result.rounds++;
    std::uint64_t deleted_this_round = 0;
    touched.clear();

    // The deletable set is fixed by the degrees at the start of the round;
    // vertices whose degree drops during the round wait for the next one.
    for (std::uint64_t v : candidates) {
      if (!st.vertex_alive[v] || st.deg[v] > 1) continue;
      const PeelRecord rec = st.delete_vertex(v, touched);
      result.peel_order.push_back(rec);
      ++deleted_this_round;
      --alive_count;
      if (track_segments) survivors[h.segment_layout->segment_of(v)]--;
    }

    if (track_segments) result.survivors_by_round.push_back(survivors);
    if (deleted_this_round == 0 || alive_count == 0) break;

    std::sort(touched.begin(), touched.end());
    candidates.swap(touched);
  }

  st.finish(result);
  return result;
}

PeelResult peel_sequential(const Hypergraph& h) {
  PeelState st(h);
  PeelResult result;
  result.peel_order.reserve(h.num_vertices());
  if (h.segment_layout.has_value()) {
    result.survivors_by_round.emplace_back(h.segment_layout->num_segments(),
                                           h.segment_layout->n);
  }

  std::vector<std::uint64_t> queue;
  queue.reserve(h.num_vertices());
  for (std::uint64_t v = 0; v < h.num_vertices(); ++v) {
    if (st.deg[v] <= 1) queue.push_back(v);
  }

  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::uint64_t v = queue[head];
    if (!st.vertex_alive[v]) continue;
    result.peel_order.push_back(st.delete_vertex(v, queue));
  }

  st.finish(result);
  return result;
}

std::vector<double> segment_survival(const PeelResult& result,
                                     std::uint64_t r) {
  if (!result.layout.has_value()) {
    throw std::invalid_argument("segment_survival: no segment layout");
  }
  if (r >= result.survivors_by_round.size()) {
    throw std::invalid_argument("segment_survival: round out of range");
  }
  const double n = double(result.layout->n);
  std::vector<double> fractions;
  fractions.reserve(result.survivors_by_round[r].size());
  for (std::uint64_t count : result.survivors_by_round[r]) {
    fractions.push_back(double(count) / n);
  }
  return fractions;
}

std::vector<std::vector<double>> rooted_segment_survival(const Hypergraph& h,
                                                         std::uint64_t r_max) {
  if (!h.segment_layout.has_value()) {
    throw std::invalid_argument("rooted_segment_survival: no segment layout");
  }
  const SegmentLayout layout = *h.segment_layout;
  const std::uint64_t nv = h.num_vertices();
  const std::uint64_t inc = h.num_incidences();
  const std::uint32_t k = h.edge_size();

  // Incidence lists: per vertex, the flat incidence slots it occupies.
  std::vector<std::uint64_t> start(nv + 1, 0);
  for (std::uint64_t e = 0; e < h.num_edges(); ++e) {
    for (std::uint64_t v : h.edge(e)) start[v + 1]++;
  }
  for (std::uint64_t v = 0; v < nv; ++v) start[v + 1] += start[v];
  std::vector<std::uint64_t> slots(inc);
  {
    std::vector<std::uint64_t> cursor(start.begin(), start.end() - 1);
    for (std::uint64_t e = 0; e < h.num_edges(); ++e) {
      const auto vs = h.edge(e);
      for (std::uint32_t s = 0; s < k; ++s) {
        slots[cursor[vs[s]]++] = e * k + s;
      }
    }
  }

  // msg[e*k + s] = 1 iff the vertex in slot s would survive the previous
  // round with edge e ignored; support[e*k + s] = 1 iff all other slots of e
  // report survival, i.e. e supports its slot-s vertex for one more round.
  std::vector<std::uint8_t> msg(inc, 1), next_msg(inc), support(inc);

  std::vector<std::vector<double>> out;
  out.reserve(r_max + 1);
  out.emplace_back(layout.num_segments(), 1.0);

  std::vector<std::uint64_t> seg_alive(layout.num_segments());
  for (std::uint64_t r = 1; r <= r_max; ++r) {
    for (std::uint64_t e = 0; e < h.num_edges(); ++e) {
      const std::uint64_t base = e * k;
      for (std::uint32_t s = 0; s < k; ++s) {
        std::uint8_t all = 1;
        for (std::uint32_t s2 = 0; s2 < k; ++s2) {
          if (s2 != s) all &= msg[base + s2];
        }
        support[base + s] = all;
      }
    }
    std::fill(seg_alive.begin(), seg_alive.end(), 0);
    for (std::uint64_t v = 0; v < nv; ++v) {
      std::uint32_t supporters = 0;
      for (std::uint64_t i = start[v]; i < start[v + 1]; ++i) {
        supporters += support[slots[i]];
      }
      if (supporters > 0) seg_alive[layout.segment_of(v)]++;
      for (std::uint64_t i = start[v]; i < start[v + 1]; ++i) {
        next_msg[slots[i]] = (supporters - support[slots[i]]) > 0;
      }
    }
    msg.swap(next_msg);
    std::vector<double> row(layout.num_segments());
    for (std::size_t i = 0; i < row.size(); ++i) {
      row[i] = double(seg_alive[i]) / double(layout.n);
    }
    out.push_back(std::move(row));
  }
  return out;
}

bool replay_valid(const Hypergraph& h, const PeelResult& result) {
  const std::uint64_t nv = h.num_vertices();
  const std::uint64_t ne = h.num_edges();

  // Adjacency lists for exact incident-edge checks.
  std::vector<std::uint64_t> adj_start(nv + 1, 0);
  for (std::uint64_t e = 0; e < ne; ++e) {
    for (std::uint64_t v : h.edge(e)) adj_start[v + 1]++;
  }
  for (std::uint64_t v = 0; v < nv; ++v) adj_start[v + 1] += adj_start[v];
  std::vector<std::uint64_t> adj(h.num_incidences());
  {
    std::vector<std::uint64_t> cursor(adj_start.begin(), adj_start.end() - 1);
    for (std::uint64_t e = 0; e < ne; ++e) {
      for (std::uint64_t v : h.edge(e)) adj[cursor[v]++] = e;
    }
  }

  std::vector<std::uint32_t> deg(nv, 0);
  for (std::uint64_t e = 0; e < ne; ++e) {
    for (std::uint64_t v : h.edge(e)) deg[v]++;
  }
  std::vector<std::uint8_t> vertex_alive(nv, 1);
  std::vector<std::uint8_t> edge_alive(ne, 1);

  for (const PeelRecord& rec : result.peel_order) {
    if (rec.vertex >= nv || !vertex_alive[rec.vertex]) return false;
    if (deg[rec.vertex] > 1) return false;
    if (rec.has_edge()) {
      if (rec.edge >= ne || !edge_alive[rec.edge]) return false;
      if (deg[rec.vertex] != 1) return false;
      // The paired edge must be the unique live incident edge.
      bool incident = false;
      for (std::uint64_t i = adj_start[rec.vertex];
           i < adj_start[rec.vertex + 1]; ++i) {
        if (edge_alive[adj[i]]) {
          if (adj[i] != rec.edge) return false;
          incident = true;
        }
      }
      if (!incident) return false;
      edge_alive[rec.edge] = 0;
      for (std::uint64_t u : h.edge(rec.edge)) {
        if (vertex_alive[u]) deg[u]--;
      }
    } else if (deg[rec.vertex] != 0) {
      return false;
    }
    vertex_alive[rec.vertex] = 0;
  }

  // Core must be exactly the never-deleted part, with min degree 2 inside.
  std::vector<std::uint64_t> alive_v;
  for (std::uint64_t v = 0; v < nv; ++v) {
    if (vertex_alive[v]) alive_v.push_back(v);
  }
  if (alive_v != result.core_vertices) return false;
  std::vector<std::uint64_t> alive_e;
  for (std::uint64_t e = 0; e < ne; ++e) {
    if (edge_alive[e]) alive_e.push_back(e);
  }
  if (alive_e != result.core_edges) return false;

  for (std::uint64_t e : alive_e) {
    for (std::uint64_t v : h.edge(e)) {
      if (!vertex_alive[v]) return false;
    }
  }
  for (std::uint64_t v : alive_v) {
    if (deg[v] < 2) return false;
  }
  return true;
}

}  // namespace fusepeel
