#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace reprtrace {

// Milliseconds since simulation start.
using TimestampMs = std::int64_t;

// One application request occurrence.
struct RequestEvent {
    std::string type_id;
    TimestampMs start = 0;
    double response_time = 0.0;  // ms
    double memory_delta = 0.0;   // KB; negative when a GC ran mid-measurement
    std::uint64_t sequence = 0;  // tie-breaker for equal timestamps

    bool valid() const noexcept { return !type_id.empty() && response_time >= 0.0; }
};

// A request whose execution trace was recorded.
struct TraceRecord {
    RequestEvent event;
    std::uint64_t cycle_index = 0;
    TimestampMs recorded_at = 0;
};

// Per-request-type counters of a population or a sample within one cycle.
class FrequencyTable {
public:
    void add(std::string_view type_id);
    void set(std::string_view type_id, std::uint64_t count);
    void clear() noexcept;

    std::uint64_t count(std::string_view type_id) const;
    std::uint64_t total() const noexcept { return total_; }
    bool empty() const noexcept { return total_ == 0; }

    // counts[type] / total; 0 for an empty table.
    double proportion(std::string_view type_id) const;

    const std::map<std::string, std::uint64_t, std::less<>>& counts() const noexcept { return counts_; }

    friend bool operator==(const FrequencyTable&, const FrequencyTable&) = default;

private:
    std::map<std::string, std::uint64_t, std::less<>> counts_;
    std::uint64_t total_ = 0;
};

// Throughput and per-type mean response times over one adaptation interval.
struct PerformanceRecord {
    double rps = 0.0;
    std::map<std::string, double> mean_rt;  // ms
    bool monitoring_enabled = true;

    friend bool operator==(const PerformanceRecord&, const PerformanceRecord&) = default;
};

// Bounded FIFO history of performance records; the oldest is evicted first.
class PerformanceReferenceTable {
public:
    explicit PerformanceReferenceTable(std::size_t capacity);

    void add(PerformanceRecord record);

    const std::deque<PerformanceRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<PerformanceRecord> records_;
};

struct SamplerConfig {
    double max_rate = 0.5;
    double min_rate = 0.01;
    double epsilon = 0.05;
    double baseline_duration = 3.0;     // s
    double adaptation_frequency = 1.0;  // s
    double max_cycle_length = 180.0;    // s
    std::size_t history_capacity = 60;
    double variability_p = 0.5;
    double margin_e = 0.05;

    // Throws ParameterError naming the first violated invariant.
    void validate() const;
};

enum class ReleaseReason { Representative, Timeout };

std::string_view to_string(ReleaseReason reason) noexcept;

// A cycle's sample handed over for analysis.
struct ReleasedSample {
    std::vector<TraceRecord> traces;
    FrequencyTable population_stats;
    FrequencyTable sample_stats;
    double cycle_length = 0.0;  // s
    double confidence_at_release = 1.0;
    double population_mean_rt = 0.0;  // ms, over every request of the cycle
    ReleaseReason reason = ReleaseReason::Representative;
    std::uint64_t cycle_index = 0;
    TimestampMs released_at = 0;
};

// Line-delimited trace file: one record per line, tab separated
//   cycle_index \t type_id \t start \t response_time \t memory_delta
// Type ids may contain spaces but not tabs or newlines.
void write_trace_line(std::ostream& out, const TraceRecord& record);
TraceRecord parse_trace_line(std::string_view line);

void write_traces(std::ostream& out, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_traces(std::istream& in);

}  // namespace reprtrace
