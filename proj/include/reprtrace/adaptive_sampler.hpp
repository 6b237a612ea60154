#pragma once

#include <functional>
#include <mutex>
#include <vector>

#include "reprtrace/sampling_core.hpp"

namespace reprtrace::core {

enum class MonitorEventKind { RateChanged, BaselineStarted, BaselineEnded, SampleReleased };

std::string_view to_string(MonitorEventKind kind) noexcept;

struct MonitorEvent {
    MonitorEventKind kind;
    TimestampMs at = 0;
    double rate = 0.0;
    ReleaseReason reason = ReleaseReason::Representative;  // SampleReleased only
    std::uint64_t cycle_index = 0;                          // SampleReleased only
};

using MonitorEventSink = std::function<void(const MonitorEvent&)>;

// Thread-safe front end over MonitorState. decide() may be called from any
// number of request contexts; tick() from one periodic context. One mutex
// serializes state changes, so a cycle reset is seen wholesale and every
// decision reads a single rate value.
class AdaptiveSampler {
public:
    explicit AdaptiveSampler(SamplerConfig config, TimestampMs start = 0);

    // Decides and, on acceptance, evaluates the sample.
    bool decide(const RequestEvent& request, UniformSource& rng);

    void tick(TimestampMs now, const PerformanceRecord& current);

    double rate() const;
    bool monitoring_enabled() const;
    std::uint64_t cycle_index() const;
    const SamplerConfig& config() const noexcept { return config_; }

    // Samples released since the last call.
    std::vector<ReleasedSample> take_released();

    // Installed sink receives events after the state lock is dropped.
    void set_event_sink(MonitorEventSink sink);

    MonitorState snapshot() const;

private:
    void emit(const std::vector<MonitorEvent>& events);
    void note_release(ReleasedSample released, std::vector<MonitorEvent>& events);

    SamplerConfig config_;
    mutable std::mutex mu_;
    MonitorState state_;
    std::vector<ReleasedSample> released_;
    MonitorEventSink sink_;
};

}  // namespace reprtrace::core
