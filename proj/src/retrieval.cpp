#include "fusepeel/retrieval.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "fusepeel/errors.hpp"
#include "fusepeel/hash.hpp"
#include "fusepeel/peel.hpp"
#include "fusepeel/rng.hpp"

namespace fusepeel {

namespace {

constexpr std::uint64_t value_mask(std::uint32_t r_bits) {
  return r_bits == 64 ? ~std::uint64_t{0}
                      : (std::uint64_t{1} << r_bits) - 1;
}

// CRC-64/XZ (reflected ECMA-182 polynomial 0xC96C5795D7870F42, init and
// final xor all-ones).
struct Crc64Table {
  std::array<std::uint64_t, 256> t{};
  constexpr Crc64Table() {
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint64_t crc = i;
      for (int bit = 0; bit < 8; ++bit) {
        crc = (crc >> 1) ^ ((crc & 1) ? 0xC96C5795D7870F42ULL : 0);
      }
      t[i] = crc;
    }
  }
};

constexpr Crc64Table kCrcTable{};

std::uint64_t crc64(std::span<const std::uint8_t> bytes) {
  std::uint64_t crc = ~std::uint64_t{0};
  for (std::uint8_t b : bytes) {
    crc = kCrcTable.t[(crc ^ b) & 0xff] ^ (crc >> 8);
  }
  return ~crc;
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(std::uint8_t(std::uint64_t(value) >> (8 * i)));
  }
}

template <typename T>
T get_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= std::uint64_t(p[i]) << (8 * i);
  }
  return T(v);
}

constexpr std::size_t kHeaderSize = 44;   // magic..successful_seed
constexpr std::size_t kChecksumSize = 8;

std::uint64_t word_count(std::uint64_t cells, std::uint32_t r_bits) {
  // cells * r_bits can approach 2^70 only past the capacity checks below.
  const std::uint64_t bits = cells * r_bits;
  return (bits + 63) / 64;
}

}  // namespace

void RetrievalParams::validate() const {
  if (k < 3) throw std::invalid_argument("retrieval: k must be >= 3");
  if (ell < 1) throw std::invalid_argument("retrieval: ell must be >= 1");
  if (ell > 0xffffffffULL) {
    throw CapacityError("retrieval: ell exceeds the serialized u32 field");
  }
  if (k > 0xff) {
    throw CapacityError("retrieval: k exceeds the serialized u8 field");
  }
  if (r_bits < 1 || r_bits > 64) {
    throw std::invalid_argument("retrieval: r_bits must be in 1..64");
  }
  if (!(c > 0)) throw std::invalid_argument("retrieval: c must be > 0");
  if (!(c * double(ell) / double(ell + k - 1) < 1.0)) {
    throw std::invalid_argument(
        "retrieval: edge density c*ell/(ell+k-1) must be < 1");
  }
  if (max_retries < 1) {
    throw std::invalid_argument("retrieval: max_retries must be >= 1");
  }
}

RetrievalStructure::RetrievalStructure(RetrievalParams params,
                                       std::uint64_t successful_seed,
                                       std::uint64_t n, std::uint64_t m,
                                       std::vector<std::uint64_t> words)
    : params_(params),
      successful_seed_(successful_seed),
      n_(n),
      m_(m),
      words_(std::move(words)) {}

std::uint64_t RetrievalStructure::get_cell(std::uint64_t v) const {
  const std::uint32_t r = params_.r_bits;
  const std::uint64_t bit = v * r;
  const std::uint64_t word = bit / 64;
  const std::uint32_t shift = bit % 64;
  std::uint64_t out = words_[word] >> shift;
  if (shift + r > 64) {
    out |= words_[word + 1] << (64 - shift);
  }
  return out & value_mask(r);
}

void RetrievalStructure::set_cell(std::uint64_t v, std::uint64_t value) {
  const std::uint32_t r = params_.r_bits;
  const std::uint64_t mask = value_mask(r);
  value &= mask;
  const std::uint64_t bit = v * r;
  const std::uint64_t word = bit / 64;
  const std::uint32_t shift = bit % 64;
  words_[word] = (words_[word] & ~(mask << shift)) | (value << shift);
  if (shift + r > 64) {
    const std::uint32_t spill = 64 - shift;
    words_[word + 1] =
        (words_[word + 1] & ~(mask >> spill)) | (value >> spill);
  }
}

Edge edge_of(std::string_view key, std::uint64_t seed,
             const RetrievalParams& params, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("edge_of: n must be >= 1");
  const Hash128 h = murmur3_x64_128(key, seed);
  const std::uint64_t j = h.hi % params.ell;
  Edge e;
  e.vertices.resize(params.k);
  for (std::uint32_t t = 0; t < params.k; ++t) {
    e.vertices[t] = (j + t) * n + mix2(h.lo, t) % n;
  }
  return e;
}

std::uint64_t RetrievalStructure::query(std::string_view key) const {
  if (m_ == 0 || n_ == 0) return 0;
  const Hash128 h = murmur3_x64_128(key, successful_seed_);
  const std::uint64_t j = h.hi % params_.ell;
  std::uint64_t out = 0;
  for (std::uint32_t t = 0; t < params_.k; ++t) {
    out ^= get_cell((j + t) * n_ + mix2(h.lo, t) % n_);
  }
  return out;
}

RetrievalStructure build_retrieval(std::span<const std::string> keys,
                                   std::span<const std::uint64_t> values,
                                   const RetrievalParams& params,
                                   BuildStats* stats) {
  params.validate();
  if (keys.size() != values.size()) {
    throw std::invalid_argument("retrieval: keys/values size mismatch");
  }
  const std::uint64_t mask = value_mask(params.r_bits);
  for (std::uint64_t v : values) {
    if ((v & ~mask) != 0) {
      throw std::invalid_argument("retrieval: value does not fit in r_bits");
    }
  }

  const std::uint64_t m = keys.size();
  const std::uint64_t n =
      std::uint64_t(std::ceil(double(m) / (params.c * double(params.ell))));
  if (stats) stats->attempts = 0;

  if (m == 0) {
    if (stats) stats->attempts = 1;
    return RetrievalStructure(params, mix2(params.seed, 0), 0, 0, {});
  }

  FuseParams fuse;
  fuse.k = params.k;
  fuse.c = params.c;
  fuse.ell = params.ell;
  fuse.n = n;
  fuse.validate();  // capacity checks on n*(ell+k-1) and incidences

  const std::uint64_t cells = n * (params.ell + params.k - 1);
  if (cells > (std::uint64_t{1} << 57) / params.r_bits) {
    throw CapacityError("retrieval: packed cell array too large");
  }

  for (std::uint32_t attempt = 0; attempt < params.max_retries; ++attempt) {
    const std::uint64_t seed = mix2(params.seed, attempt);

    Hypergraph h(cells, params.k);
    h.reserve_edges(m);
    h.segment_layout = SegmentLayout{n, params.ell, params.k};
    for (const std::string& key : keys) {
      h.add_edge(edge_of(key, seed, params, n).vertices);
    }

    const PeelResult peel = peel_sequential(h);
    if (!peel.peelable()) continue;

    RetrievalStructure s(params, seed, n, m,
                         std::vector<std::uint64_t>(
                             word_count(cells, params.r_bits), 0));
    // Reverse peel order: every other cell of the record's edge is final by
    // the time the record's own vertex is assigned.
    for (auto it = peel.peel_order.rbegin(); it != peel.peel_order.rend();
         ++it) {
      if (!it->has_edge()) continue;
      std::uint64_t acc = values[it->edge];
      for (std::uint64_t u : h.edge(it->edge)) {
        if (u != it->vertex) acc ^= s.get_cell(u);
      }
      s.set_cell(it->vertex, acc);
    }
    if (stats) stats->attempts = attempt + 1;
    return s;
  }
  if (stats) stats->attempts = params.max_retries;
  throw BuildFailedError("retrieval: no peelable attempt within max_retries",
                         params.max_retries);
}

std::vector<std::uint8_t> serialize(const RetrievalStructure& s) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderSize + s.words().size() * 8 + kChecksumSize);
  out.push_back('F');
  out.push_back('U');
  out.push_back('S');
  out.push_back('R');
  out.push_back(1);  // version
  out.push_back(std::uint8_t(s.params().k));
  out.push_back(std::uint8_t(s.params().r_bits));
  out.push_back(0);  // reserved
  put_le<std::uint32_t>(out, std::uint32_t(s.params().ell));
  put_le<std::uint64_t>(out, s.segment_size());
  put_le<std::uint64_t>(out, s.num_keys());
  std::uint64_t c_bits;
  static_assert(sizeof(double) == 8);
  std::memcpy(&c_bits, &s.params().c, 8);
  put_le<std::uint64_t>(out, c_bits);
  put_le<std::uint64_t>(out, s.successful_seed());
  for (std::uint64_t w : s.words()) {
    put_le<std::uint64_t>(out, w);
  }
  put_le<std::uint64_t>(out, crc64(out));
  return out;
}

RetrievalStructure deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderSize + kChecksumSize) {
    throw SerializeError(SerializeError::Code::truncated,
                         "retrieval payload shorter than header");
  }
  if (std::memcmp(bytes.data(), "FUSR", 4) != 0) {
    throw SerializeError(SerializeError::Code::magic_mismatch,
                         "bad magic bytes");
  }
  if (bytes[4] != 1) {
    throw SerializeError(SerializeError::Code::unsupported_version,
                         "unsupported format version");
  }
  RetrievalParams params;
  params.k = bytes[5];
  params.r_bits = bytes[6];
  params.ell = get_le<std::uint32_t>(bytes.data() + 8);
  const std::uint64_t n = get_le<std::uint64_t>(bytes.data() + 12);
  const std::uint64_t m = get_le<std::uint64_t>(bytes.data() + 20);
  const std::uint64_t c_bits = get_le<std::uint64_t>(bytes.data() + 28);
  std::memcpy(&params.c, &c_bits, 8);
  const std::uint64_t seed = get_le<std::uint64_t>(bytes.data() + 36);

  if (params.k < 3 || params.r_bits < 1 || params.r_bits > 64 ||
      params.ell < 1) {
    throw SerializeError(SerializeError::Code::invalid_field,
                         "header fields out of range");
  }
  std::uint64_t cells = 0;
  if (__builtin_mul_overflow(n, params.ell + params.k - 1, &cells) ||
      cells > (std::uint64_t{1} << 57) / params.r_bits) {
    throw SerializeError(SerializeError::Code::invalid_field,
                         "cell count out of range");
  }
  const std::uint64_t words = word_count(cells, params.r_bits);
  const std::size_t expected = kHeaderSize + words * 8 + kChecksumSize;
  if (bytes.size() != expected) {
    throw SerializeError(SerializeError::Code::truncated,
                         "payload length does not match cell count");
  }
  const std::uint64_t stored_crc =
      get_le<std::uint64_t>(bytes.data() + bytes.size() - 8);
  if (crc64(bytes.first(bytes.size() - 8)) != stored_crc) {
    throw SerializeError(SerializeError::Code::checksum_mismatch,
                         "checksum mismatch");
  }

  std::vector<std::uint64_t> word_data(words);
  for (std::uint64_t i = 0; i < words; ++i) {
    word_data[i] = get_le<std::uint64_t>(bytes.data() + kHeaderSize + i * 8);
  }
  return RetrievalStructure(params, seed, n, m, std::move(word_data));
}

double raw_overhead(const RetrievalStructure& s) {
  if (s.num_keys() == 0) return 0.0;
  return double(s.num_cells()) / double(s.num_keys()) - 1.0;
}

double serialized_overhead(const RetrievalStructure& s) {
  if (s.num_keys() == 0) return 0.0;
  const double total_bits =
      double(kHeaderSize + kChecksumSize + s.words().size() * 8) * 8.0;
  return total_bits / (double(s.num_keys()) * s.params().r_bits) - 1.0;
}

}  // namespace fusepeel
