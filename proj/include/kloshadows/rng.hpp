// Copyright 2026 The kloshadows Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Counter-based random numbers (Philox4x32-10). A generator is identified by
// (seed, stream); draw i of a stream is a pure function of (seed, stream, i),
// so shots can be sampled in any order or on any thread with identical output.

#include <array>
#include <cstdint>

namespace kloshadows {

class Philox4x32 {
   public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kW0;
            key[1] += kW1;
        }
        return ctr;
    }

   private:
    static constexpr std::uint32_t kM0 = 0xD2511F53U;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57U;
    static constexpr std::uint32_t kW0 = 0x9E3779B9U;
    static constexpr std::uint32_t kW1 = 0xBB67AE85U;
};

/** Sequential uniform doubles from one (seed, stream) substream. */
class CounterRng {
   public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    /** Uniform double in [0, 1) with 53 random bits. */
    double uniform() {
        if (cursor_ == 2) refill();
        return buffer_[cursor_++];
    }

    std::uint64_t next_u64() {
        const Philox4x32::Counter out = Philox4x32::block(counter(), key_);
        ++block_;
        cursor_ = 2;
        return (std::uint64_t{out[0]} << 32) | out[1];
    }

   private:
    Philox4x32::Counter counter() const {
        return {static_cast<std::uint32_t>(stream_),
                static_cast<std::uint32_t>(stream_ >> 32),
                static_cast<std::uint32_t>(block_),
                static_cast<std::uint32_t>(block_ >> 32)};
    }

    void refill() {
        const Philox4x32::Counter out = Philox4x32::block(counter(), key_);
        ++block_;
        buffer_[0] = to_double(out[0], out[1]);
        buffer_[1] = to_double(out[2], out[3]);
        cursor_ = 0;
    }

    static double to_double(std::uint32_t a, std::uint32_t b) {
        const std::uint64_t bits = (std::uint64_t{a >> 5} << 26) | (b >> 6);
        return static_cast<double>(bits) * 0x1.0p-53;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<double, 2> buffer_{};
    int cursor_ = 2;
};

/** Independent child seed, e.g. one per repetition of an experiment. */
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    CounterRng rng(seed, ~index);
    return rng.next_u64();
}

}  // namespace kloshadows
