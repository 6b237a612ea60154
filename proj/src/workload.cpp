#include "reprtrace/workload.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "reprtrace/errors.hpp"

namespace reprtrace {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
}  // namespace

std::string_view segment_kind(const WorkloadSegment& segment) noexcept {
    return std::visit(overloaded{[](const StationarySegment&) { return std::string_view("stationary"); },
                                 [](const SeasonalSegment&) { return std::string_view("seasonal"); },
                                 [](const BurstSegment&) { return std::string_view("burst"); }},
                      segment);
}

double segment_duration(const WorkloadSegment& segment) noexcept {
    return std::visit([](const auto& s) { return s.duration; }, segment);
}

double WorkloadSpec::total_duration() const noexcept {
    double total = 0.0;
    for (const auto& s : segments) total += segment_duration(s);
    return total;
}

void WorkloadSpec::validate() const {
    if (segments.empty()) {
        throw ParameterError("workload has no segments");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string where = "workload segment " + std::to_string(i + 1) + ": ";
        if (!(segment_duration(segments[i]) > 0.0)) {
            throw ParameterError(where + "duration must be positive");
        }
        std::visit(overloaded{
                       [&](const StationarySegment& s) {
                           if (s.users < 1) throw ParameterError(where + "users must be >= 1");
                       },
                       [&](const SeasonalSegment& s) {
                           if (s.base_users < 1) throw ParameterError(where + "base_users must be >= 1");
                           if (s.amplitude < 0) throw ParameterError(where + "amplitude must be >= 0");
                           if (!(s.period > 0.0)) throw ParameterError(where + "period must be positive");
                       },
                       [&](const BurstSegment& s) {
                           if (s.base_users < 1 || s.peak_users < 1)
                               throw ParameterError(where + "users must be >= 1");
                           if (!(s.width > 0.0)) throw ParameterError(where + "width must be positive");
                       }},
                   segments[i]);
    }
}

SegmentPosition locate(const WorkloadSpec& spec, double t) {
    if (!(t >= 0.0)) {
        throw RangeError("time before the workload schedule");
    }
    double start = 0.0;
    for (std::size_t i = 0; i < spec.segments.size(); ++i) {
        double end = start + segment_duration(spec.segments[i]);
        if (t < end) {
            return {i, t - start};
        }
        start = end;
    }
    throw RangeError("time " + std::to_string(t) + " s is beyond the workload schedule");
}

int users_at(const WorkloadSegment& segment, double offset) {
    return std::visit(
        overloaded{[](const StationarySegment& s) { return s.users; },
                   [&](const SeasonalSegment& s) {
                       double wave = std::max(0.0, std::sin(2.0 * std::numbers::pi * offset / s.period));
                       return static_cast<int>(std::lround(s.base_users + s.amplitude * wave));
                   },
                   [&](const BurstSegment& s) {
                       double half = 0.5 * s.width;
                       double shape = std::max(0.0, 1.0 - std::fabs(offset - s.at) / half);
                       return static_cast<int>(
                           std::lround(s.base_users + (s.peak_users - s.base_users) * shape));
                   }},
        segment);
}

int users_at(const WorkloadSpec& spec, double t) {
    auto pos = locate(spec, t);
    return users_at(spec.segments[pos.index], pos.offset);
}

}  // namespace reprtrace
