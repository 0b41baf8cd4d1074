#ifndef FUSEPEEL_HASH_HPP
#define FUSEPEEL_HASH_HPP

#include <cstdint>
#include <string_view>

namespace fusepeel {

struct Hash128 {
  std::uint64_t hi;  // first output word (h1)
  std::uint64_t lo;  // second output word (h2)

  bool operator==(const Hash128&) const = default;
};

// MurmurHash3 x64 128-bit variant (Austin Appleby, public domain), with the
// usual 32-bit seed widened to 64 bits by seeding both internal state words.
Hash128 murmur3_x64_128(std::string_view key, std::uint64_t seed) noexcept;

}  // namespace fusepeel

#endif  // FUSEPEEL_HASH_HPP
