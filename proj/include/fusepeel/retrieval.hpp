#ifndef FUSEPEEL_RETRIEVAL_HPP
#define FUSEPEEL_RETRIEVAL_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusepeel/hypergraph.hpp"

namespace fusepeel {

struct RetrievalParams {
  std::uint32_t k = 3;
  double c = 0.910;
  std::uint64_t ell = 100;
  std::uint32_t r_bits = 1;        // value width per key, 1..64
  std::uint32_t max_retries = 100;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument; density c*ell/(ell+k-1) must stay < 1.
  void validate() const;
};

// Static XOR retrieval structure: key x maps to k cells (one per consecutive
// segment) whose XOR equals the stored value of x. Queries for keys outside
// the build set return arbitrary values.
class RetrievalStructure {
 public:
  RetrievalStructure() = default;
  RetrievalStructure(RetrievalParams params, std::uint64_t successful_seed,
                     std::uint64_t n, std::uint64_t m,
                     std::vector<std::uint64_t> words);

  const RetrievalParams& params() const { return params_; }
  std::uint64_t successful_seed() const { return successful_seed_; }
  std::uint64_t segment_size() const { return n_; }
  std::uint64_t num_keys() const { return m_; }
  std::uint64_t num_cells() const {
    return n_ * (params_.ell + params_.k - 1);
  }
  std::span<const std::uint64_t> words() const { return words_; }

  // Cell v occupies bits [v*r, (v+1)*r) of the little-endian packed array.
  std::uint64_t get_cell(std::uint64_t v) const;
  void set_cell(std::uint64_t v, std::uint64_t value);

  std::uint64_t query(std::string_view key) const;

 private:
  RetrievalParams params_;
  std::uint64_t successful_seed_ = 0;
  std::uint64_t n_ = 0;
  std::uint64_t m_ = 0;
  std::vector<std::uint64_t> words_;
};

// The fuse edge of a key: a 128-bit hash of (seed, key) supplies the type
// j = hi mod ell and the offsets o_t = mix2(lo, t) mod n.
Edge edge_of(std::string_view key, std::uint64_t seed,
             const RetrievalParams& params, std::uint64_t n);

// Builds the structure: derives n = ceil(m / (c*ell)), hashes keys to edges,
// peels, back-substitutes in reverse peel order. Retries with seed_i =
// mix2(seed, i); throws BuildFailedError after max_retries attempts and
// std::invalid_argument when a value does not fit in r_bits.
struct BuildStats {
  std::uint32_t attempts = 0;  // attempts consumed (1 = first seed worked)
};

RetrievalStructure build_retrieval(std::span<const std::string> keys,
                                   std::span<const std::uint64_t> values,
                                   const RetrievalParams& params,
                                   BuildStats* stats = nullptr);

// Bit-exact serialization; see the format note in the implementation file
// and README. deserialize throws SerializeError with a distinct code for bad
// magic, unsupported version, truncation and checksum mismatch.
std::vector<std::uint8_t> serialize(const RetrievalStructure& s);
RetrievalStructure deserialize(std::span<const std::uint8_t> bytes);

// Cells per key minus one; the segment-rounding of n makes this
// (ell+k-1) * ceil(m/(c*ell)) / m - 1, about (ell+k-1)/(c*ell) - 1.
double raw_overhead(const RetrievalStructure& s);
// Whole serialized size in bits over m * r_bits, minus one.
double serialized_overhead(const RetrievalStructure& s);

}  // namespace fusepeel

#endif  // FUSEPEEL_RETRIEVAL_HPP
