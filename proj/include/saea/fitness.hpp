#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "saea/bitstring.hpp"
#include "saea/rng.hpp"

namespace saea {

enum class FunctionKind { onemax, binary, binary_value, dynamic_binval, hot_topic, adversarial_hook };

std::string_view to_string(FunctionKind kind);
/// Accepts the canonical names ("onemax", "binary", "binaryvalue", "dynbinval", "hottopic", "hook").
std::optional<FunctionKind> parse_function_kind(std::string_view name);

struct HotTopicParams {
    std::size_t L = 100;
    double alpha = 0.25;
    double beta = 0.05;
    double epsilon = 0.05;

    friend bool operator==(const HotTopicParams&, const HotTopicParams&) = default;
};

class FitnessInstance;

/// Adversary invoked once per generation with (t, x_t); must return a monotone instance.
using AdversaryStrategy = std::function<FitnessInstance(std::uint64_t t, const SearchPoint& parent)>;

struct FunctionSpec {
    FunctionKind kind = FunctionKind::onemax;
    HotTopicParams hot_topic{};
    AdversaryStrategy adversary{};
    /// Dominated pairs checked per generation for adversary-supplied instances.
    std::size_t spot_checks = 32;

    static FunctionSpec of(FunctionKind kind) {
        FunctionSpec spec;
        spec.kind = kind;
        return spec;
    }
    static FunctionSpec hook(AdversaryStrategy strategy, std::size_t spot_checks = 32) {
        FunctionSpec spec;
        spec.kind = FunctionKind::adversarial_hook;
        spec.adversary = std::move(strategy);
        spec.spot_checks = spot_checks;
        return spec;
    }
};

/// Throws std::invalid_argument naming the violated constraint.
void validate(const FunctionSpec& spec);

/// Config form: either a bare name or {"kind": ..., "L": ..., "alpha": ..., ...}.
nlohmann::json to_json(const FunctionSpec& spec);
FunctionSpec function_spec_from_json(const nlohmann::json& j);

/// Raised when an adversary returns an order that fails the dominated-pair spot check.
class HookViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A strictly monotone comparison oracle for one generation.
class MonotoneFunction : public std::enable_shared_from_this<MonotoneFunction> {
public:
    virtual ~MonotoneFunction() = default;

    [[nodiscard]] virtual FunctionKind kind() const = 0;
    [[nodiscard]] virtual std::size_t dimension() const = 0;
    [[nodiscard]] virtual std::weak_ordering compare(const SearchPoint& a, const SearchPoint& b) const = 0;

    /// Compares parent^a against parent^b, where a and b are sorted flip lists.
    /// The default materializes both points.
    [[nodiscard]] virtual std::weak_ordering compare_mutants(const SearchPoint& parent,
                                                             std::span<const std::uint32_t> a,
                                                             std::span<const std::uint32_t> b) const;

    [[nodiscard]] virtual std::optional<double> value(const SearchPoint&) const { return std::nullopt; }

    /// Instance for generation t. Static functions return themselves.
    [[nodiscard]] virtual std::shared_ptr<const MonotoneFunction> advance(std::uint64_t t, const SearchPoint& parent,
                                                                          RngStream& rng) const;

    [[nodiscard]] virtual nlohmann::json to_json() const;
};

/// Value handle around a per-generation monotone function. Cheap to copy; immutable.
class FitnessInstance {
public:
    FitnessInstance() = default;
    explicit FitnessInstance(std::shared_ptr<const MonotoneFunction> fn) : fn_(std::move(fn)) {}

    [[nodiscard]] FunctionKind kind() const { return fn_->kind(); }
    [[nodiscard]] std::size_t dimension() const { return fn_->dimension(); }

    [[nodiscard]] std::weak_ordering compare(const SearchPoint& y1, const SearchPoint& y2) const;
    [[nodiscard]] std::weak_ordering compare_mutants(const SearchPoint& parent, std::span<const std::uint32_t> a,
                                                     std::span<const std::uint32_t> b) const {
        return fn_->compare_mutants(parent, a, b);
    }
    /// Numeric fitness when representable exactly; ordering agrees with compare.
    [[nodiscard]] std::optional<double> value(const SearchPoint& x) const { return fn_->value(x); }
    [[nodiscard]] bool is_optimum(const SearchPoint& x) const { return x.zeromax() == 0; }

    /// Instance for generation t; call once per generation before evaluating offspring.
    [[nodiscard]] FitnessInstance advance(std::uint64_t t, const SearchPoint& parent, RngStream& rng) const {
        return FitnessInstance(fn_->advance(t, parent, rng));
    }

    [[nodiscard]] nlohmann::json to_json() const { return fn_->to_json(); }
    [[nodiscard]] const MonotoneFunction& function() const { return *fn_; }
    [[nodiscard]] bool same_function(const FitnessInstance& other) const { return fn_ == other.fn_; }

private:
    std::shared_ptr<const MonotoneFunction> fn_;
};

/// Builds the generation-0 instance. Rejects invalid parameters.
FitnessInstance make_instance(const FunctionSpec& spec, std::size_t n, RngStream& rng);

/// Rebuilds a dumped instance (static kinds, DynamicBinVal permutation, HotTopic level sets).
FitnessInstance instance_from_json(const nlohmann::json& j);

/// DynamicBinVal/BinaryValue weight ranks: position with rank n-1 is most significant.
FitnessInstance make_ranked_binval(std::vector<std::uint32_t> rank, bool dynamic);

/// Checks `pairs` random dominated pairs (x, y <= x, y != x). Returns false on a violation.
bool spot_check_monotone(const FitnessInstance& instance, std::size_t pairs, RngStream& rng);

}  // namespace saea
