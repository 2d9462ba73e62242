#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace saea {

/// SplitMix64 finalizer. Used for seed expansion and stream-id hashing.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive hash of a list of 64-bit words.
constexpr std::uint64_t hash_words(std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (auto w : words) {
        h = mix64(h ^ mix64(w));
    }
    return h;
}

std::uint64_t hash_string(std::string_view text) noexcept;

/// Roles a run derives independent sub-streams for.
enum class StreamRole : std::uint64_t {
    algorithm = 1,    // initialization, mutation, tie-breaking
    environment = 2,  // dynamic instance resampling, hook spot checks
    instance = 3,     // initial instance construction
};

/// Deterministic random stream: xoshiro256** seeded from key = hash(master_seed, stream_id).
///
/// Two streams with equal (master_seed, stream_id) produce identical output. A stream is
/// exclusive to one executor at a time; copies are independent replicas.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id), key_(hash_words({master_seed, stream_id})) {
        seed_state(key_);
    }

    /// Stream whose key is exactly `key`; reproduces any stream from its recorded key.
    static RngStream from_key(std::uint64_t key) {
        RngStream r;
        r.master_seed_ = key;
        r.stream_id_ = 0;
        r.key_ = key;
        r.seed_state(key);
        return r;
    }

    /// Child stream for a role; independent of this stream's consumption so far.
    [[nodiscard]] RngStream derive(std::uint64_t sub_id) const { return RngStream(key_, sub_id); }
    [[nodiscard]] RngStream derive(StreamRole role) const { return derive(static_cast<std::uint64_t>(role)); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) (Lemire's nearly-divisionless method). bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
    [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

    friend bool operator==(const RngStream&, const RngStream&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    void seed_state(std::uint64_t key) noexcept {
        std::uint64_t z = key;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            w = mix64(z);
        }
    }

    std::uint64_t master_seed_{};
    std::uint64_t stream_id_{};
    std::uint64_t key_{};
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace saea
