#ifndef SKGIBBS_RANDOM_HPP
#define SKGIBBS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace skgibbs {

/// Purpose tags keep the streams of different consumers disjoint even when
/// they share a master seed and index.
enum class StreamTag : std::uint32_t {
    disorder = 1,
    pd_sample = 2,
    smoothing = 3,
    cascade = 4,
};

/// Independent generator for substream `index` of `master_seed`. The stream
/// depends only on (master_seed, index, tag), so results do not depend on
/// which thread consumes it or in what order.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, std::uint64_t index, StreamTag tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

}  // namespace skgibbs

#endif  // SKGIBBS_RANDOM_HPP
