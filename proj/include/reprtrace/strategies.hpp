#pragma once

#include <array>
#include <deque>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "reprtrace/adaptive_sampler.hpp"
#include "reprtrace/random.hpp"
#include "reprtrace/trace_model.hpp"

namespace reprtrace {

// ADP: adaptive process. INV: rate inversely proportional to throughput.
// UNI: uniform 50%. FUM: trace everything. NOM: trace nothing.
enum class StrategyKind { ADP, INV, UNI, FUM, NOM };

inline constexpr std::array<StrategyKind, 5> kAllStrategies = {
    StrategyKind::ADP, StrategyKind::INV, StrategyKind::UNI, StrategyKind::FUM, StrategyKind::NOM};

std::string_view to_string(StrategyKind kind) noexcept;
std::optional<StrategyKind> parse_strategy_kind(std::string_view name) noexcept;

// Uniform interface the simulator drives: one decision per request, one tick
// per adaptation interval.
class SamplingStrategy {
public:
    virtual ~SamplingStrategy() = default;

    virtual StrategyKind kind() const noexcept = 0;
    virtual bool decide(const RequestEvent& request, UniformSource& rng) = 0;
    virtual void tick(TimestampMs now, const PerformanceRecord& current) = 0;

    // Rate in effect for the next decisions.
    virtual double rate() const = 0;
    virtual bool monitoring_enabled() const { return true; }

    // Monitoring cycle new traces belong to; strategies without cycles use 0.
    virtual std::uint64_t cycle_index() const { return 0; }

    virtual std::vector<ReleasedSample> take_released() { return {}; }
};

std::unique_ptr<SamplingStrategy> make_strategy(StrategyKind kind, const SamplerConfig& config);

struct InvState {
    double rate = 0.5;
    double reference_throughput = 0.0;
    std::deque<double> throughput_history;
};

/// Appends `throughput` to the bounded history, sets the reference to the
/// history median (upper middle for even counts) and returns
///   clamp(max_rate * T_ref / max(T, 1), min_rate, max_rate).
double inv_update(InvState& state, double throughput, const SamplerConfig& config);

}  // namespace reprtrace
