#include "reprtrace/trace_model.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "reprtrace/errors.hpp"

namespace reprtrace {

void FrequencyTable::add(std::string_view type_id) {
    auto it = counts_.find(type_id);
    if (it == counts_.end()) {
        counts_.emplace(std::string(type_id), 1);
    } else {
        ++it->second;
    }
    ++total_;
}

void FrequencyTable::set(std::string_view type_id, std::uint64_t count) {
    auto it = counts_.find(type_id);
    std::uint64_t old = it == counts_.end() ? 0 : it->second;
    if (it == counts_.end()) {
        counts_.emplace(std::string(type_id), count);
    } else {
        it->second = count;
    }
    total_ = total_ - old + count;
}

void FrequencyTable::clear() noexcept {
    counts_.clear();
    total_ = 0;
}

std::uint64_t FrequencyTable::count(std::string_view type_id) const {
    auto it = counts_.find(type_id);
    return it == counts_.end() ? 0 : it->second;
}

double FrequencyTable::proportion(std::string_view type_id) const {
    if (total_ == 0) {
        return 0.0;
    }
    return static_cast<double>(count(type_id)) / static_cast<double>(total_);
}

PerformanceReferenceTable::PerformanceReferenceTable(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw ParameterError("performance reference table capacity must be positive");
    }
}

void PerformanceReferenceTable::add(PerformanceRecord record) {
    if (records_.size() == capacity_) {
        records_.pop_front();
    }
    records_.push_back(std::move(record));
}

void SamplerConfig::validate() const {
    if (!(min_rate > 0.0 && min_rate <= max_rate && max_rate <= 1.0)) {
        throw ParameterError("sampler rates must satisfy 0 < min_rate <= max_rate <= 1");
    }
    if (!(epsilon >= 0.0)) {
        throw ParameterError("epsilon must be non-negative");
    }
    if (!(baseline_duration > 0.0)) {
        throw ParameterError("baseline_duration must be positive");
    }
    if (!(adaptation_frequency > 0.0)) {
        throw ParameterError("adaptation_frequency must be positive");
    }
    if (!(max_cycle_length > 0.0)) {
        throw ParameterError("max_cycle_length must be positive");
    }
    if (history_capacity == 0) {
        throw ParameterError("history_capacity must be positive");
    }
    if (!(variability_p > 0.0 && variability_p < 1.0)) {
        throw ParameterError("variability_p must lie in (0, 1)");
    }
    if (!(margin_e > 0.0 && margin_e < 1.0)) {
        throw ParameterError("margin_e must lie in (0, 1)");
    }
}

std::string_view to_string(ReleaseReason reason) noexcept {
    switch (reason) {
        case ReleaseReason::Representative: return "representative";
        case ReleaseReason::Timeout: return "timeout";
    }
    return "unknown";
}

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

template <typename T>
T parse_field(std::string_view field, const char* name) {
    T value{};
    auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
        throw ParameterError(std::string("malformed trace field '") + name + "': '" +
                             std::string(field) + "'");
    }
    return value;
}

}  // namespace

void write_trace_line(std::ostream& out, const TraceRecord& record) {
    std::string line;
    line += std::to_string(record.cycle_index);
    line += '\t';
    line += record.event.type_id;
    line += '\t';
    line += std::to_string(record.event.start);
    line += '\t';
    append_double(line, record.event.response_time);
    line += '\t';
    append_double(line, record.event.memory_delta);
    line += '\n';
    out << line;
}

TraceRecord parse_trace_line(std::string_view line) {
    std::string_view fields[5];
    std::size_t n = 0;
    while (n < 5) {
        auto tab = line.find('\t');
        if (n == 4) {
            if (tab != std::string_view::npos) {
                throw ParameterError("trace line has more than 5 fields");
            }
            fields[n++] = line;
            break;
        }
        if (tab == std::string_view::npos) {
            throw ParameterError("trace line has fewer than 5 fields");
        }
        fields[n++] = line.substr(0, tab);
        line.remove_prefix(tab + 1);
    }

    TraceRecord rec;
    rec.cycle_index = parse_field<std::uint64_t>(fields[0], "cycle_index");
    rec.event.type_id = std::string(fields[1]);
    rec.event.start = parse_field<TimestampMs>(fields[2], "start");
    rec.event.response_time = parse_field<double>(fields[3], "response_time");
    rec.event.memory_delta = parse_field<double>(fields[4], "memory_delta");
    if (!rec.event.valid()) {
        throw ParameterError("trace line violates request invariants");
    }
    rec.recorded_at = rec.event.start + static_cast<TimestampMs>(std::llround(rec.event.response_time));
    return rec;
}

void write_traces(std::ostream& out, const std::vector<TraceRecord>& records) {
    for (const auto& r : records) {
        write_trace_line(out, r);
    }
}

std::vector<TraceRecord> read_traces(std::istream& in) {
    std::vector<TraceRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(parse_trace_line(line));
    }
    return out;
}

}  // namespace reprtrace
