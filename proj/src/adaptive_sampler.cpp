#include "reprtrace/adaptive_sampler.hpp"

namespace reprtrace::core {

std::string_view to_string(MonitorEventKind kind) noexcept {
    switch (kind) {
        case MonitorEventKind::RateChanged: return "rate-changed";
        case MonitorEventKind::BaselineStarted: return "baseline-started";
        case MonitorEventKind::BaselineEnded: return "baseline-ended";
        case MonitorEventKind::SampleReleased: return "sample-released";
    }
    return "unknown";
}

AdaptiveSampler::AdaptiveSampler(SamplerConfig config, TimestampMs start)
    : config_(config), state_(config_, start) {}

bool AdaptiveSampler::decide(const RequestEvent& request, UniformSource& rng) {
    std::vector<MonitorEvent> events;
    bool traced;
    {
        std::lock_guard lock(mu_);
        traced = core::decide(state_, request, rng, config_);
        if (traced) {
            if (auto released = evaluate_sample(state_, request.start, config_)) {
                note_release(std::move(*released), events);
            }
        }
    }
    emit(events);
    return traced;
}

void AdaptiveSampler::tick(TimestampMs now, const PerformanceRecord& current) {
    std::vector<MonitorEvent> events;
    {
        std::lock_guard lock(mu_);
        const double rate_before = state_.rate;

        if (!state_.monitoring_enabled && state_.baseline_until && now >= *state_.baseline_until) {
            state_.monitoring_enabled = true;
            state_.baseline_until.reset();
            events.push_back({MonitorEventKind::BaselineEnded, now, state_.rate});
        }
        auto outcome = adapt_rate_detailed(state_, current, now, config_);
        if (outcome.baseline_started) {
            events.push_back({MonitorEventKind::BaselineStarted, now, state_.rate});
        }
        if (state_.rate != rate_before) {
            events.push_back({MonitorEventKind::RateChanged, now, state_.rate});
        }
        if (auto released = evaluate_sample(state_, now, config_)) {
            note_release(std::move(*released), events);
        }
    }
    emit(events);
}

double AdaptiveSampler::rate() const {
    std::lock_guard lock(mu_);
    return state_.rate;
}

bool AdaptiveSampler::monitoring_enabled() const {
    std::lock_guard lock(mu_);
    return state_.monitoring_enabled;
}

std::uint64_t AdaptiveSampler::cycle_index() const {
    std::lock_guard lock(mu_);
    return state_.cycle_index;
}

std::vector<ReleasedSample> AdaptiveSampler::take_released() {
    std::lock_guard lock(mu_);
    std::vector<ReleasedSample> out;
    out.swap(released_);
    return out;
}

void AdaptiveSampler::set_event_sink(MonitorEventSink sink) {
    std::lock_guard lock(mu_);
    sink_ = std::move(sink);
}

MonitorState AdaptiveSampler::snapshot() const {
    std::lock_guard lock(mu_);
    return state_;
}

void AdaptiveSampler::note_release(ReleasedSample released, std::vector<MonitorEvent>& events) {
    MonitorEvent ev{MonitorEventKind::SampleReleased, released.released_at, state_.rate};
    ev.reason = released.reason;
    ev.cycle_index = released.cycle_index;
    events.push_back(ev);
    released_.push_back(std::move(released));
}

void AdaptiveSampler::emit(const std::vector<MonitorEvent>& events) {
    if (events.empty()) return;
    MonitorEventSink sink;
    {
        std::lock_guard lock(mu_);
        sink = sink_;
    }
    if (!sink) return;
    for (const auto& e : events) {
        sink(e);
    }
}

}  // namespace reprtrace::core
