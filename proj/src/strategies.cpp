#include "reprtrace/strategies.hpp"

#include <algorithm>

#include "reprtrace/stat_kit.hpp"

namespace reprtrace {

std::string_view to_string(StrategyKind kind) noexcept {
    switch (kind) {
        case StrategyKind::ADP: return "ADP";
        case StrategyKind::INV: return "INV";
        case StrategyKind::UNI: return "UNI";
        case StrategyKind::FUM: return "FUM";
        case StrategyKind::NOM: return "NOM";
    }
    return "?";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view name) noexcept {
    for (auto k : kAllStrategies) {
        if (to_string(k) == name) return k;
    }
    return std::nullopt;
}

double inv_update(InvState& state, double throughput, const SamplerConfig& config) {
    state.throughput_history.push_back(throughput);
    while (state.throughput_history.size() > config.history_capacity) {
        state.throughput_history.pop_front();
    }
    std::vector<double> sorted(state.throughput_history.begin(), state.throughput_history.end());
    std::sort(sorted.begin(), sorted.end());
    state.reference_throughput = sorted[sorted.size() / 2];

    double raw = config.max_rate * state.reference_throughput / std::max(throughput, 1.0);
    state.rate = std::clamp(raw, config.min_rate, config.max_rate);
    return state.rate;
}

namespace {

class AdaptiveStrategy final : public SamplingStrategy {
public:
    explicit AdaptiveStrategy(const SamplerConfig& config) : sampler_(config) {}

    StrategyKind kind() const noexcept override { return StrategyKind::ADP; }
    bool decide(const RequestEvent& request, UniformSource& rng) override {
        return sampler_.decide(request, rng);
    }
    void tick(TimestampMs now, const PerformanceRecord& current) override { sampler_.tick(now, current); }
    double rate() const override { return sampler_.rate(); }
    bool monitoring_enabled() const override { return sampler_.monitoring_enabled(); }
    std::uint64_t cycle_index() const override { return sampler_.cycle_index(); }
    std::vector<ReleasedSample> take_released() override { return sampler_.take_released(); }

private:
    core::AdaptiveSampler sampler_;
};

class InverseThroughputStrategy final : public SamplingStrategy {
public:
    explicit InverseThroughputStrategy(const SamplerConfig& config) : config_(config) {
        state_.rate = config.max_rate;
    }

    StrategyKind kind() const noexcept override { return StrategyKind::INV; }
    bool decide(const RequestEvent&, UniformSource& rng) override {
        return stats::bernoulli(state_.rate, rng);
    }
    void tick(TimestampMs, const PerformanceRecord& current) override {
        inv_update(state_, current.rps, config_);
    }
    double rate() const override { return state_.rate; }

private:
    SamplerConfig config_;
    InvState state_;
};

class UniformStrategy final : public SamplingStrategy {
public:
    StrategyKind kind() const noexcept override { return StrategyKind::UNI; }
    bool decide(const RequestEvent&, UniformSource& rng) override { return stats::bernoulli(kRate, rng); }
    void tick(TimestampMs, const PerformanceRecord&) override {}
    double rate() const override { return kRate; }

private:
    static constexpr double kRate = 0.5;
};

class FullMonitoring final : public SamplingStrategy {
public:
    StrategyKind kind() const noexcept override { return StrategyKind::FUM; }
    bool decide(const RequestEvent&, UniformSource&) override { return true; }
    void tick(TimestampMs, const PerformanceRecord&) override {}
    double rate() const override { return 1.0; }
};

class NoMonitoring final : public SamplingStrategy {
public:
    StrategyKind kind() const noexcept override { return StrategyKind::NOM; }
    bool decide(const RequestEvent&, UniformSource&) override { return false; }
    void tick(TimestampMs, const PerformanceRecord&) override {}
    double rate() const override { return 0.0; }
    bool monitoring_enabled() const override { return false; }
};

}  // namespace

std::unique_ptr<SamplingStrategy> make_strategy(StrategyKind kind, const SamplerConfig& config) {
    config.validate();
    switch (kind) {
        case StrategyKind::ADP: return std::make_unique<AdaptiveStrategy>(config);
        case StrategyKind::INV: return std::make_unique<InverseThroughputStrategy>(config);
        case StrategyKind::UNI: return std::make_unique<UniformStrategy>();
        case StrategyKind::FUM: return std::make_unique<FullMonitoring>();
        case StrategyKind::NOM: return std::make_unique<NoMonitoring>();
    }
    return nullptr;
}

}  // namespace reprtrace
