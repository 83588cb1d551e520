#pragma once

#include <array>
#include <cstdint>

namespace pgnoise {

/// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Pure function of (key, counter); no hidden state.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

/// A sequential stream over Philox blocks. The counter layout is
/// (index lo, index hi, block number, lane); a stream is identified by
/// (seed, index, lane) and streams with different identities never overlap.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t index, std::uint32_t lane = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          index_(index),
          lane_(lane) {}

    std::uint64_t next_u64() {
        if (avail_ == 0) {
            block_ = philox4x32({static_cast<std::uint32_t>(index_),
                                 static_cast<std::uint32_t>(index_ >> 32), block_no_++, lane_},
                                key_);
            avail_ = 2;
        }
        const int base = 2 * (2 - avail_--);
        return (static_cast<std::uint64_t>(block_[base]) << 32) | block_[base + 1];
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t index_;
    std::uint32_t lane_;
    std::uint32_t block_no_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int avail_ = 0;
};

}  // namespace pgnoise
