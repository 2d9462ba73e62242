#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "saea/rng.hpp"

namespace saea {

/// Fixed-length bitstring over {0,1}^n, packed into 64-bit words.
///
/// Position i (0-based) is bit x_{i+1} in 1-based notation. String forms list positions left to
/// right, so "10110" has bit 0 set. Unused high bits of the last word are always zero.
class SearchPoint {
public:
    using Word = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    SearchPoint() = default;
    /// All-zeros string of length n.
    explicit SearchPoint(std::size_t n);

    static SearchPoint zeros(std::size_t n) { return SearchPoint(n); }
    static SearchPoint ones(std::size_t n);
    /// Parses a string of '0'/'1' characters.
    static SearchPoint from_string(std::string_view bits);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] bool operator[](std::size_t i) const noexcept {
        return (words_[i / word_bits] >> (i % word_bits)) & 1U;
    }
    void set(std::size_t i, bool value) noexcept {
        const Word mask = Word{1} << (i % word_bits);
        if (value) {
            words_[i / word_bits] |= mask;
        } else {
            words_[i / word_bits] &= ~mask;
        }
    }
    void flip(std::size_t i) noexcept { words_[i / word_bits] ^= Word{1} << (i % word_bits); }

    /// Flips every listed position.
    void apply(std::span<const std::uint32_t> flips) noexcept {
        for (auto p : flips) {
            flip(p);
        }
    }

    [[nodiscard]] std::size_t onemax() const noexcept;
    [[nodiscard]] std::size_t zeromax() const noexcept { return n_ - onemax(); }
    [[nodiscard]] bool is_all_ones() const noexcept { return zeromax() == 0; }

    [[nodiscard]] std::span<const Word> words() const noexcept { return words_; }
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const SearchPoint&, const SearchPoint&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Word> words_;
};

[[nodiscard]] inline std::size_t onemax(const SearchPoint& x) noexcept { return x.onemax(); }
[[nodiscard]] inline std::size_t zeromax(const SearchPoint& x) noexcept { return x.zeromax(); }

/// Uniformly random point: each bit independently one with probability 1/2.
SearchPoint new_random(std::size_t n, RngStream& rng);

/// All-ones with exactly k distinct uniformly chosen positions set to zero.
SearchPoint with_zeromax(std::size_t n, std::size_t k, RngStream& rng);

/// Standard bit mutation with rate c/n, producing sorted lists of flipped positions.
///
/// Below rate 0.1 the flip count is drawn from Binomial(n, c/n) and that many distinct
/// positions are chosen uniformly; otherwise each bit is an independent Bernoulli trial.
class BitFlipMutation {
public:
    BitFlipMutation(std::size_t n, double c);

    [[nodiscard]] std::size_t dimension() const noexcept { return n_; }
    [[nodiscard]] double rate() const noexcept { return p_; }

    /// Overwrites `flips` with the sorted distinct positions flipped by one mutation.
    void sample(RngStream& rng, std::vector<std::uint32_t>& flips);

private:
    std::size_t n_;
    double p_;
    bool sparse_;
    std::binomial_distribution<std::uint32_t> count_;
};

/// Returns a mutated copy of x; x is not modified.
SearchPoint mutate(const SearchPoint& x, double c, RngStream& rng);

}  // namespace saea
