#include "saea/fitness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <tuple>
#include <utility>

namespace saea {

namespace {

using Json = nlohmann::json;

std::size_t and_popcount(std::span<const SearchPoint::Word> a, std::span<const SearchPoint::Word> b) {
    std::size_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
    }
    return total;
}

void require_dimension(std::size_t expected, const SearchPoint& x) {
    if (x.size() != expected) {
        throw std::invalid_argument("dimension mismatch: instance has n=" + std::to_string(expected) +
                                    ", point has n=" + std::to_string(x.size()));
    }
}

template <typename T>
std::weak_ordering order_of(const T& a, const T& b) {
    if (a < b) {
        return std::weak_ordering::less;
    }
    if (b < a) {
        return std::weak_ordering::greater;
    }
    return std::weak_ordering::equivalent;
}

/// Signed weighted change caused by flipping `flips` in `parent`.
template <typename WeightFn>
std::int64_t weighted_delta(const SearchPoint& parent, std::span<const std::uint32_t> flips, WeightFn weight) {
    std::int64_t delta = 0;
    for (auto p : flips) {
        delta += parent[p] ? -weight(p) : weight(p);
    }
    return delta;
}

class OneMaxFn final : public MonotoneFunction {
public:
    explicit OneMaxFn(std::size_t n) : n_(n) {}

    FunctionKind kind() const override { return FunctionKind::onemax; }
    std::size_t dimension() const override { return n_; }

    std::weak_ordering compare(const SearchPoint& a, const SearchPoint& b) const override {
        return order_of(a.onemax(), b.onemax());
    }
    std::weak_ordering compare_mutants(const SearchPoint& parent, std::span<const std::uint32_t> a,
                                       std::span<const std::uint32_t> b) const override {
        const auto unit = [](std::uint32_t) -> std::int64_t { return 1; };
        return order_of(weighted_delta(parent, a, unit), weighted_delta(parent, b, unit));
    }
    std::optional<double> value(const SearchPoint& x) const override { return static_cast<double>(x.onemax()); }
    Json to_json() const override { return {{"kind", "onemax"}, {"n", n_}}; }

private:
    std::size_t n_;
};

/// First floor(n/2) bits weigh n, the rest weigh 1.
class BinaryFn final : public MonotoneFunction {
public:
    explicit BinaryFn(std::size_t n) : n_(n), half_(n / 2) {}

    FunctionKind kind() const override { return FunctionKind::binary; }
    std::size_t dimension() const override { return n_; }

    std::weak_ordering compare(const SearchPoint& a, const SearchPoint& b) const override {
        return order_of(raw_value(a), raw_value(b));
    }
    std::weak_ordering compare_mutants(const SearchPoint& parent, std::span<const std::uint32_t> a,
                                       std::span<const std::uint32_t> b) const override {
        const auto w = [this](std::uint32_t p) { return weight(p); };
        return order_of(weighted_delta(parent, a, w), weighted_delta(parent, b, w));
    }
    std::optional<double> value(const SearchPoint& x) const override { return static_cast<double>(raw_value(x)); }
    Json to_json() const override { return {{"kind", "binary"}, {"n", n_}}; }

private:
    std::int64_t weight(std::uint32_t p) const { return p < half_ ? static_cast<std::int64_t>(n_) : 1; }
    std::int64_t raw_value(const SearchPoint& x) const {
        std::int64_t heavy = 0;
        for (std::size_t i = 0; i < half_; ++i) {
            heavy += x[i] ? 1 : 0;
        }
        const auto total = static_cast<std::int64_t>(x.onemax());
        return heavy * static_cast<std::int64_t>(n_) + (total - heavy);
    }

    std::size_t n_;
    std::size_t half_;
};

/// Lexicographic order over positions sorted by rank (rank n-1 most significant).
/// Static BinaryValue uses rank[i] = n-1-i; DynamicBinVal redraws the ranks every generation.
class RankedBinValFn final : public MonotoneFunction {
public:
    RankedBinValFn(std::vector<std::uint32_t> rank, bool dynamic) : rank_(std::move(rank)), dynamic_(dynamic) {}

    FunctionKind kind() const override {
        return dynamic_ ? FunctionKind::dynamic_binval : FunctionKind::binary_value;
    }
    std::size_t dimension() const override { return rank_.size(); }

    std::weak_ordering compare(const SearchPoint& a, const SearchPoint& b) const override {
        const auto wa = a.words();
        const auto wb = b.words();
        bool found = false;
        std::uint32_t best_rank = 0;
        std::size_t best_pos = 0;
        for (std::size_t w = 0; w < wa.size(); ++w) {
            auto diff = wa[w] ^ wb[w];
            while (diff != 0) {
                const auto pos = w * SearchPoint::word_bits + static_cast<std::size_t>(std::countr_zero(diff));
                diff &= diff - 1;
                if (!found || rank_[pos] > best_rank) {
                    found = true;
                    best_rank = rank_[pos];
                    best_pos = pos;
                }
            }
        }
        if (!found) {
            return std::weak_ordering::equivalent;
        }
        return a[best_pos] ? std::weak_ordering::greater : std::weak_ordering::less;
    }

    std::weak_ordering compare_mutants(const SearchPoint& parent, std::span<const std::uint32_t> a,
                                       std::span<const std::uint32_t> b) const override {
        // The decisive position is the top-ranked one in the symmetric difference of the flip sets.
        std::size_t i = 0;
        std::size_t j = 0;
        bool found = false;
        bool in_a = false;
        std::uint32_t best_rank = 0;
        std::uint32_t best_pos = 0;
        const auto consider = [&](std::uint32_t pos, bool from_a) {
            if (!found || rank_[pos] > best_rank) {
                found = true;
                best_rank = rank_[pos];
                best_pos = pos;
                in_a = from_a;
            }
        };
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i] < b[j])) {
                consider(a[i++], true);
            } else if (i == a.size() || b[j] < a[i]) {
                consider(b[j++], false);
            } else {
                ++i;
                ++j;
            }
        }
        if (!found) {
            return std::weak_ordering::equivalent;
        }
        // The flipped side holds the complement of the parent bit at the decisive position.
        const bool a_has_one = in_a ? !parent[best_pos] : parent[best_pos];
        return a_has_one ? std::weak_ordering::greater : std::weak_ordering::less;
    }

    std::optional<double> value(const SearchPoint& x) const override {
        if (rank_.size() > 53) {
            return std::nullopt;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < rank_.size(); ++i) {
            if (x[i]) {
                total += std::ldexp(1.0, static_cast<int>(rank_[i]));
            }
        }
        return total;
    }

    std::shared_ptr<const MonotoneFunction> advance(std::uint64_t, const SearchPoint&, RngStream& rng) const override {
        if (!dynamic_) {
            return shared_from_this();
        }
        return std::make_shared<RankedBinValFn>(random_rank(rank_.size(), rng), true);
    }

    Json to_json() const override {
        Json j{{"kind", dynamic_ ? "dynbinval" : "binaryvalue"}, {"n", rank_.size()}};
        bool canonical = true;
        for (std::size_t i = 0; i < rank_.size(); ++i) {
            canonical = canonical && rank_[i] == rank_.size() - 1 - i;
        }
        if (dynamic_ || !canonical) {
            j["rank"] = rank_;
        }
        return j;
    }

    static std::vector<std::uint32_t> random_rank(std::size_t n, RngStream& rng) {
        std::vector<std::uint32_t> rank(n);
        std::iota(rank.begin(), rank.end(), 0U);
        for (std::size_t i = n; i > 1; --i) {
            std::swap(rank[i - 1], rank[rng.below(i)]);
        }
        return rank;
    }

private:
    std::vector<std::uint32_t> rank_;
    bool dynamic_;
};

/// Leveled construction: level sets A_i of size floor(alpha n) with hot subsets B_i of size
/// floor(beta n). The level is the largest i whose A_i has fewer than epsilon*beta*n zeros;
/// fitness is (level, ones in B_{level+1}, ones outside B_{level+1}) lexicographically.
class HotTopicFn final : public MonotoneFunction {
public:
    HotTopicFn(std::size_t n, HotTopicParams params, std::vector<std::vector<std::uint32_t>> a_sets,
               std::vector<std::vector<std::uint32_t>> b_sets)
        : n_(n), params_(params), a_sets_(std::move(a_sets)), b_sets_(std::move(b_sets)) {
        threshold_ = params_.epsilon * params_.beta * static_cast<double>(n_);
        for (const auto& s : a_sets_) {
            a_masks_.push_back(mask_of(s));
        }
        for (const auto& s : b_sets_) {
            b_masks_.push_back(mask_of(s));
        }
    }

    FunctionKind kind() const override { return FunctionKind::hot_topic; }
    std::size_t dimension() const override { return n_; }

    std::weak_ordering compare(const SearchPoint& a, const SearchPoint& b) const override {
        return order_of(key(a), key(b));
    }

    std::optional<double> value(const SearchPoint& x) const override {
        const auto [level, in_b, outside] = key(x);
        const double base = static_cast<double>(n_ + 1);
        const double v = static_cast<double>(level) * base * base + static_cast<double>(in_b) * base +
                         static_cast<double>(outside);
        if (v > 0x1.0p53) {
            return std::nullopt;
        }
        return v;
    }

    Json to_json() const override {
        return {{"kind", "hottopic"},      {"n", n_},
                {"L", params_.L},          {"alpha", params_.alpha},
                {"beta", params_.beta},    {"epsilon", params_.epsilon},
                {"A", a_sets_},            {"B", b_sets_}};
    }

    std::tuple<std::size_t, std::size_t, std::size_t> key(const SearchPoint& x) const {
        std::size_t level = 0;
        for (std::size_t i = a_masks_.size(); i > 0; --i) {
            const auto zeros = a_sets_[i - 1].size() - and_popcount(x.words(), a_masks_[i - 1].words());
            if (static_cast<double>(zeros) < threshold_) {
                level = i;
                break;
            }
        }
        const std::size_t in_b = level < b_masks_.size() ? and_popcount(x.words(), b_masks_[level].words()) : 0;
        return {level, in_b, x.onemax() - in_b};
    }

private:
    SearchPoint mask_of(const std::vector<std::uint32_t>& positions) const {
        SearchPoint m(n_);
        for (auto p : positions) {
            if (p >= n_) {
                throw std::invalid_argument("hottopic: level-set position out of range");
            }
            m.set(p, true);
        }
        return m;
    }

    std::size_t n_;
    HotTopicParams params_;
    double threshold_ = 0.0;
    std::vector<std::vector<std::uint32_t>> a_sets_;
    std::vector<std::vector<std::uint32_t>> b_sets_;
    std::vector<SearchPoint> a_masks_;
    std::vector<SearchPoint> b_masks_;
};

/// Delegates to the adversary's most recent instance; re-queries and spot-checks on advance.
class HookFn final : public MonotoneFunction {
public:
    HookFn(AdversaryStrategy strategy, std::size_t spot_checks, std::size_t n, std::optional<FitnessInstance> current)
        : strategy_(std::move(strategy)), spot_checks_(spot_checks), n_(n), current_(std::move(current)) {}

    FunctionKind kind() const override { return FunctionKind::adversarial_hook; }
    std::size_t dimension() const override { return n_; }

    std::weak_ordering compare(const SearchPoint& a, const SearchPoint& b) const override {
        return active().compare(a, b);
    }
    std::weak_ordering compare_mutants(const SearchPoint& parent, std::span<const std::uint32_t> a,
                                       std::span<const std::uint32_t> b) const override {
        return active().compare_mutants(parent, a, b);
    }
    std::optional<double> value(const SearchPoint& x) const override { return active().value(x); }

    std::shared_ptr<const MonotoneFunction> advance(std::uint64_t t, const SearchPoint& parent,
                                                    RngStream& rng) const override {
        FitnessInstance next = strategy_(t, parent);
        if (next.dimension() != n_) {
            throw HookViolation("adversary returned an instance of dimension " + std::to_string(next.dimension()) +
                                " at generation " + std::to_string(t) + ", expected " + std::to_string(n_));
        }
        if (!spot_check_monotone(next, spot_checks_, rng)) {
            throw HookViolation("adversary returned a non-monotone order at generation " + std::to_string(t));
        }
        return std::make_shared<HookFn>(strategy_, spot_checks_, n_, std::move(next));
    }

    Json to_json() const override {
        Json j{{"kind", "hook"}, {"n", n_}};
        if (current_) {
            j["current"] = current_->to_json();
        }
        return j;
    }

private:
    const FitnessInstance& active() const {
        if (!current_) {
            throw std::logic_error("adversarial hook instance used before its first advance");
        }
        return *current_;
    }

    AdversaryStrategy strategy_;
    std::size_t spot_checks_;
    std::size_t n_;
    std::optional<FitnessInstance> current_;
};

std::vector<std::uint32_t> sample_subset(const std::vector<std::uint32_t>& pool, std::size_t k, RngStream& rng) {
    std::vector<std::uint32_t> work = pool;
    for (std::size_t i = 0; i < k; ++i) {
        std::swap(work[i], work[i + rng.below(work.size() - i)]);
    }
    work.resize(k);
    std::sort(work.begin(), work.end());
    return work;
}

std::shared_ptr<const MonotoneFunction> make_hot_topic(std::size_t n, const HotTopicParams& p, RngStream& rng) {
    const auto a_size = static_cast<std::size_t>(std::floor(p.alpha * static_cast<double>(n)));
    const auto b_size = static_cast<std::size_t>(std::floor(p.beta * static_cast<double>(n)));
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0U);
    std::vector<std::vector<std::uint32_t>> a_sets;
    std::vector<std::vector<std::uint32_t>> b_sets;
    for (std::size_t i = 0; i < p.L; ++i) {
        auto a = sample_subset(all, a_size, rng);
        b_sets.push_back(sample_subset(a, b_size, rng));
        a_sets.push_back(std::move(a));
    }
    return std::make_shared<HotTopicFn>(n, p, std::move(a_sets), std::move(b_sets));
}

}  // namespace

std::string_view to_string(FunctionKind kind) {
    switch (kind) {
        case FunctionKind::onemax: return "onemax";
        case FunctionKind::binary: return "binary";
        case FunctionKind::binary_value: return "binaryvalue";
        case FunctionKind::dynamic_binval: return "dynbinval";
        case FunctionKind::hot_topic: return "hottopic";
        case FunctionKind::adversarial_hook: return "hook";
    }
    return "unknown";
}

std::optional<FunctionKind> parse_function_kind(std::string_view name) {
    for (auto kind : {FunctionKind::onemax, FunctionKind::binary, FunctionKind::binary_value,
                      FunctionKind::dynamic_binval, FunctionKind::hot_topic, FunctionKind::adversarial_hook}) {
        if (name == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

void validate(const FunctionSpec& spec) {
    if (spec.kind == FunctionKind::hot_topic) {
        const auto& p = spec.hot_topic;
        if (p.L == 0) {
            throw std::invalid_argument("hottopic: L must be positive");
        }
        if (!(p.beta > 0.0)) {
            throw std::invalid_argument("hottopic: beta must be > 0");
        }
        if (!(p.beta <= p.alpha)) {
            throw std::invalid_argument("hottopic: beta must not exceed alpha");
        }
        if (!(p.alpha < 1.0)) {
            throw std::invalid_argument("hottopic: alpha must be < 1");
        }
        if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) {
            throw std::invalid_argument("hottopic: epsilon must lie in (0, 1)");
        }
    }
    if (spec.kind == FunctionKind::adversarial_hook && !spec.adversary) {
        throw std::invalid_argument("hook: no adversary strategy supplied");
    }
}

nlohmann::json to_json(const FunctionSpec& spec) {
    if (spec.kind == FunctionKind::hot_topic) {
        const auto& p = spec.hot_topic;
        return {{"kind", "hottopic"}, {"L", p.L}, {"alpha", p.alpha}, {"beta", p.beta}, {"epsilon", p.epsilon}};
    }
    if (spec.kind == FunctionKind::adversarial_hook) {
        throw std::invalid_argument("hook: adversary strategies cannot be serialized");
    }
    return std::string(to_string(spec.kind));
}

FunctionSpec function_spec_from_json(const nlohmann::json& j) {
    FunctionSpec spec;
    std::string name;
    if (j.is_string()) {
        name = j.get<std::string>();
    } else if (j.is_object()) {
        if (!j.contains("kind")) {
            throw std::invalid_argument("function: missing key 'kind'");
        }
        name = j.at("kind").get<std::string>();
        for (const auto& [key, value] : j.items()) {
            if (key == "kind") {
                continue;
            }
            if (name != "hottopic") {
                throw std::invalid_argument("function: unknown key '" + key + "'");
            }
            if (key == "L") {
                spec.hot_topic.L = value.get<std::size_t>();
            } else if (key == "alpha") {
                spec.hot_topic.alpha = value.get<double>();
            } else if (key == "beta") {
                spec.hot_topic.beta = value.get<double>();
            } else if (key == "epsilon") {
                spec.hot_topic.epsilon = value.get<double>();
            } else {
                throw std::invalid_argument("function: unknown key '" + key + "'");
            }
        }
    } else {
        throw std::invalid_argument("function: expected a name or an object");
    }
    const auto kind = parse_function_kind(name);
    if (!kind) {
        throw std::invalid_argument("function: unknown kind '" + name + "'");
    }
    if (*kind == FunctionKind::adversarial_hook) {
        throw std::invalid_argument("function: 'hook' is only available through the library API");
    }
    spec.kind = *kind;
    validate(spec);
    return spec;
}

std::weak_ordering MonotoneFunction::compare_mutants(const SearchPoint& parent, std::span<const std::uint32_t> a,
                                                     std::span<const std::uint32_t> b) const {
    SearchPoint ya = parent;
    ya.apply(a);
    SearchPoint yb = parent;
    yb.apply(b);
    return compare(ya, yb);
}

std::shared_ptr<const MonotoneFunction> MonotoneFunction::advance(std::uint64_t, const SearchPoint&,
                                                                  RngStream&) const {
    return shared_from_this();
}

nlohmann::json MonotoneFunction::to_json() const { return {{"kind", std::string(to_string(kind()))}}; }

std::weak_ordering FitnessInstance::compare(const SearchPoint& y1, const SearchPoint& y2) const {
    require_dimension(dimension(), y1);
    require_dimension(dimension(), y2);
    return fn_->compare(y1, y2);
}

FitnessInstance make_instance(const FunctionSpec& spec, std::size_t n, RngStream& rng) {
    if (n == 0) {
        throw std::invalid_argument("make_instance: n must be at least 1");
    }
    validate(spec);
    switch (spec.kind) {
        case FunctionKind::onemax: return FitnessInstance(std::make_shared<OneMaxFn>(n));
        case FunctionKind::binary: return FitnessInstance(std::make_shared<BinaryFn>(n));
        case FunctionKind::binary_value: {
            std::vector<std::uint32_t> rank(n);
            for (std::size_t i = 0; i < n; ++i) {
                rank[i] = static_cast<std::uint32_t>(n - 1 - i);
            }
            return FitnessInstance(std::make_shared<RankedBinValFn>(std::move(rank), false));
        }
        case FunctionKind::dynamic_binval:
            return FitnessInstance(std::make_shared<RankedBinValFn>(RankedBinValFn::random_rank(n, rng), true));
        case FunctionKind::hot_topic: return FitnessInstance(make_hot_topic(n, spec.hot_topic, rng));
        case FunctionKind::adversarial_hook:
            return FitnessInstance(std::make_shared<HookFn>(spec.adversary, spec.spot_checks, n, std::nullopt));
    }
    throw std::invalid_argument("make_instance: unsupported function kind");
}

FitnessInstance make_ranked_binval(std::vector<std::uint32_t> rank, bool dynamic) {
    std::vector<std::uint32_t> sorted = rank;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != i) {
            throw std::invalid_argument("binval: rank is not a permutation of 0..n-1");
        }
    }
    return FitnessInstance(std::make_shared<RankedBinValFn>(std::move(rank), dynamic));
}

FitnessInstance instance_from_json(const nlohmann::json& j) {
    const auto name = j.at("kind").get<std::string>();
    const auto n = j.at("n").get<std::size_t>();
    const auto kind = parse_function_kind(name);
    if (!kind) {
        throw std::invalid_argument("instance: unknown kind '" + name + "'");
    }
    switch (*kind) {
        case FunctionKind::dynamic_binval:
            return make_ranked_binval(j.at("rank").get<std::vector<std::uint32_t>>(), true);
        case FunctionKind::hot_topic: {
            HotTopicParams p;
            p.L = j.at("L").get<std::size_t>();
            p.alpha = j.at("alpha").get<double>();
            p.beta = j.at("beta").get<double>();
            p.epsilon = j.at("epsilon").get<double>();
            auto a = j.at("A").get<std::vector<std::vector<std::uint32_t>>>();
            auto b = j.at("B").get<std::vector<std::vector<std::uint32_t>>>();
            if (a.size() != p.L || b.size() != p.L) {
                throw std::invalid_argument("hottopic: expected L level-set pairs");
            }
            return FitnessInstance(std::make_shared<HotTopicFn>(n, p, std::move(a), std::move(b)));
        }
        case FunctionKind::adversarial_hook:
            throw std::invalid_argument("instance: hook instances cannot be reloaded");
        default: {
            if (*kind == FunctionKind::binary_value && j.contains("rank")) {
                return make_ranked_binval(j.at("rank").get<std::vector<std::uint32_t>>(), false);
            }
            RngStream unused;
            return make_instance(FunctionSpec::of(*kind), n, unused);
        }
    }
}

bool spot_check_monotone(const FitnessInstance& instance, std::size_t pairs, RngStream& rng) {
    const auto n = instance.dimension();
    std::vector<std::uint32_t> ones;
    for (std::size_t k = 0; k < pairs; ++k) {
        SearchPoint x = new_random(n, rng);
        ones.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (x[i]) {
                ones.push_back(static_cast<std::uint32_t>(i));
            }
        }
        if (ones.empty()) {
            const auto p = static_cast<std::uint32_t>(rng.below(n));
            x.set(p, true);
            ones.push_back(p);
        }
        SearchPoint y = x;
        bool zeroed = false;
        for (auto p : ones) {
            if (rng() & 1U) {
                y.set(p, false);
                zeroed = true;
            }
        }
        if (!zeroed) {
            y.set(ones[rng.below(ones.size())], false);
        }
        if (instance.compare(x, y) != std::weak_ordering::greater) {
            return false;
        }
    }
    return true;
}

}  // namespace saea
