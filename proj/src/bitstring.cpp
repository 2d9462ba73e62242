#include "saea/bitstring.hpp"

#include <algorithm>
#include <stdexcept>

namespace saea {

namespace {

std::size_t word_count(std::size_t n) { return (n + SearchPoint::word_bits - 1) / SearchPoint::word_bits; }

}  // namespace

SearchPoint::SearchPoint(std::size_t n) : n_(n), words_(word_count(n), 0) {}

SearchPoint SearchPoint::ones(std::size_t n) {
    SearchPoint x(n);
    std::fill(x.words_.begin(), x.words_.end(), ~Word{0});
    if (const auto tail = n % word_bits; tail != 0) {
        x.words_.back() = (Word{1} << tail) - 1;
    }
    return x;
}

SearchPoint SearchPoint::from_string(std::string_view bits) {
    SearchPoint x(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '1') {
            x.set(i, true);
        } else if (bits[i] != '0') {
            throw std::invalid_argument("bitstring may only contain '0' and '1'");
        }
    }
    return x;
}

std::size_t SearchPoint::onemax() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    return total;
}

std::string SearchPoint::to_string() const {
    std::string out(n_, '0');
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)[i]) {
            out[i] = '1';
        }
    }
    return out;
}

SearchPoint new_random(std::size_t n, RngStream& rng) {
    if (n == 0) {
        throw std::invalid_argument("new_random: n must be at least 1");
    }
    SearchPoint x(n);
    for (std::size_t i = 0; i < n; i += SearchPoint::word_bits) {
        const auto w = rng();
        for (std::size_t j = 0; j < SearchPoint::word_bits && i + j < n; ++j) {
            x.set(i + j, (w >> j) & 1U);
        }
    }
    return x;
}

SearchPoint with_zeromax(std::size_t n, std::size_t k, RngStream& rng) {
    if (k > n) {
        throw std::invalid_argument("with_zeromax: k exceeds n");
    }
    // Partial Fisher-Yates over positions.
    std::vector<std::uint32_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
        pos[i] = static_cast<std::uint32_t>(i);
    }
    auto x = SearchPoint::ones(n);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + rng.below(n - i);
        std::swap(pos[i], pos[j]);
        x.set(pos[i], false);
    }
    return x;
}

BitFlipMutation::BitFlipMutation(std::size_t n, double c)
    : n_(n), p_(0.0), sparse_(false), count_(1, 0.5) {
    if (n == 0) {
        throw std::invalid_argument("mutation: n must be at least 1");
    }
    if (!(c > 0.0) || c > static_cast<double>(n)) {
        throw std::invalid_argument("mutation: c must satisfy 0 < c <= n");
    }
    p_ = c / static_cast<double>(n);
    sparse_ = p_ < 0.1;
    count_ = std::binomial_distribution<std::uint32_t>(static_cast<std::uint32_t>(n), p_);
}

void BitFlipMutation::sample(RngStream& rng, std::vector<std::uint32_t>& flips) {
    flips.clear();
    if (!sparse_) {
        for (std::size_t i = 0; i < n_; ++i) {
            if (rng.uniform01() < p_) {
                flips.push_back(static_cast<std::uint32_t>(i));
            }
        }
        return;
    }
    const std::uint32_t k = count_(rng);
    if (k == 0) {
        return;
    }
    if (k <= 64) {
        while (flips.size() < k) {
            const auto candidate = static_cast<std::uint32_t>(rng.below(n_));
            if (std::find(flips.begin(), flips.end(), candidate) == flips.end()) {
                flips.push_back(candidate);
            }
        }
    } else {
        // Floyd's algorithm with a dense membership mask.
        std::vector<bool> taken(n_, false);
        for (std::size_t j = n_ - k; j < n_; ++j) {
            auto t = static_cast<std::uint32_t>(rng.below(j + 1));
            if (taken[t]) {
                t = static_cast<std::uint32_t>(j);
            }
            taken[t] = true;
            flips.push_back(t);
        }
    }
    std::sort(flips.begin(), flips.end());
}

SearchPoint mutate(const SearchPoint& x, double c, RngStream& rng) {
    BitFlipMutation op(x.size(), c);
    std::vector<std::uint32_t> flips;
    op.sample(rng, flips);
    SearchPoint y = x;
    y.apply(flips);
    return y;
}

}  // namespace saea
