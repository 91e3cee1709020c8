#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace densel {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

/// Identifies one stream inside an experiment: which replication and what it is used for.
struct StreamId {
  std::uint64_t replication = 0;
  std::string purpose;
};

// Counter-based generator. The key is derived from (seed, purpose), the high
// half of the counter from the replication index; the low half counts blocks.
// Draws depend only on integer arithmetic, so they are identical on every
// platform, and any replication's stream can be built without touching others.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replication, std::string_view purpose);
  RngStream(std::uint64_t seed, const StreamId& id)
      : RngStream(seed, id.replication, id.purpose) {}

  std::uint64_t seed() const noexcept { return seed_; }
  const StreamId& id() const noexcept { return id_; }

  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Uniform integer in [0, bound), unbiased. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Child stream for nested randomness (e.g. one per resampling draw).
  RngStream derive(std::string_view purpose) const;

 private:
  std::uint64_t seed_;
  StreamId id_;
  std::array<std::uint32_t, 2> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;  // 32-bit words consumed from buffer_
};

}  // namespace densel
