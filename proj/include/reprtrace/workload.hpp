#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace reprtrace {

struct StationarySegment {
    int users = 1;
    double duration = 1.0;  // s
};

// base + amplitude * max(0, sin(2*pi*t/period)): humps separated by flat
// stretches at the base level.
struct SeasonalSegment {
    int base_users = 1;
    int amplitude = 0;
    double period = 60.0;
    double duration = 1.0;
};

// Triangular spike of the given width centred at `at` (segment-relative).
struct BurstSegment {
    int base_users = 1;
    int peak_users = 1;
    double at = 0.0;
    double width = 1.0;
    double duration = 1.0;
};

using WorkloadSegment = std::variant<StationarySegment, SeasonalSegment, BurstSegment>;

std::string_view segment_kind(const WorkloadSegment& segment) noexcept;
double segment_duration(const WorkloadSegment& segment) noexcept;

struct WorkloadSpec {
    std::vector<WorkloadSegment> segments;

    double total_duration() const noexcept;

    // Throws ParameterError on non-positive durations or fewer than 1 user.
    void validate() const;
};

struct SegmentPosition {
    std::size_t index = 0;
    double offset = 0.0;  // s since the segment started
};

// Throws RangeError when t is outside [0, total_duration).
SegmentPosition locate(const WorkloadSpec& spec, double t);

int users_at(const WorkloadSpec& spec, double t);
int users_at(const WorkloadSegment& segment, double offset);

}  // namespace reprtrace
