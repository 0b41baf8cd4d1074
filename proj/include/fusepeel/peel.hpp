#ifndef FUSEPEEL_PEEL_HPP
#define FUSEPEEL_PEEL_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "fusepeel/hypergraph.hpp"

namespace fusepeel {

// One deletion: the vertex had degree <= 1 when deleted; `edge` is its unique
// incident edge at that moment, or kNoEdge if it had degree 0.
struct PeelRecord {
  static constexpr std::uint64_t kNoEdge =
      std::numeric_limits<std::uint64_t>::max();

  std::uint64_t vertex;
  std::uint64_t edge;

  bool has_edge() const { return edge != kNoEdge; }
};

struct PeelResult {
  std::vector<PeelRecord> peel_order;

  // Parallel rounds executed by peel_rounds (counted from 1; the terminating
  // empty round counts). peel_sequential leaves this 0.
  std::uint64_t rounds = 0;

  // survivors_by_round[r][i] = vertices of segment i alive after round r;
  // row 0 is the initial state. Filled by peel_rounds when the graph carries
  // a segment layout; peel_sequential records only row 0. Empty without a
  // layout.
  std::vector<std::vector<std::uint64_t>> survivors_by_round;

  std::vector<std::uint64_t> core_vertices;  // ascending
  std::vector<std::uint64_t> core_edges;     // ascending

  std::optional<SegmentLayout> layout;  // echo of the input graph's layout

  // Incidence-touch counter; grows linearly in the total incidence count.
  std::uint64_t work = 0;

  bool peelable() const { return core_vertices.empty(); }
};

// Round-synchronous peeling: every round deletes all vertices that had degree
// <= 1 at the start of the round (processed in ascending vertex order for
// reproducible peel_order pairing). Stops after a round that deletes nothing
// or empties the graph.
PeelResult peel_rounds(const Hypergraph& h);

// Work-queue peeling: ascending-index seeding, FIFO thereafter. Same core as
// peel_rounds; linear in total incidences.
PeelResult peel_sequential(const Hypergraph& h);

// survivors_by_round[r] / n per segment. Requires a fuse layout and
// r <= result.rounds.
std::vector<double> segment_survival(const PeelResult& result, std::uint64_t r);

// Per-segment fraction of vertices surviving r rounds of the peeling process
// rooted at each vertex (the root is deleted only at degree 0, never at
// degree 1), for r = 0..r_max. Computed for all vertices at once by message
// passing over incidences, O(r_max * k * incidences) time. This is the
// quantity the operator iteration approximates; the plain round trace in
// survivors_by_round sits a constant (not vanishing) amount below it.
// Requires a fuse layout.
std::vector<std::vector<double>> rooted_segment_survival(const Hypergraph& h,
                                                         std::uint64_t r_max);

// Test/debug oracle: replays peel_order against `h` with full adjacency
// lists and checks every PeelResult invariant (degree at deletion time,
// edge pairing, core complement, core min-degree 2). O(incidences) memory.
bool replay_valid(const Hypergraph& h, const PeelResult& result);

}  // namespace fusepeel

#endif  // FUSEPEEL_PEEL_HPP
