#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace pvgp {

using UtcTime = std::chrono::sys_seconds;

inline constexpr std::int64_t kStepSeconds = 300;
inline constexpr std::int64_t kStepsPerDay = 288;

/// Count of 5-minute steps since an epoch.
struct TimeIndex {
  std::int64_t value = 0;
  friend auto operator<=>(const TimeIndex&, const TimeIndex&) = default;
};

/// Throws AlignmentError unless t - epoch is a whole number of steps.
TimeIndex timestamp_to_index(UtcTime t, UtcTime epoch);
UtcTime index_to_timestamp(TimeIndex index, UtcTime epoch);

bool on_step_boundary(UtcTime t, UtcTime epoch);

UtcTime midnight_of(UtcTime t);

/// Accepts `YYYY-MM-DDTHH:MM:SS` with optional `Z` / `+00:00`, a space in
/// place of `T`, or a bare date. Throws DataError otherwise.
UtcTime parse_utc(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_utc(UtcTime t);

UtcTime make_utc(int year, unsigned month, unsigned day, int hour = 0,
                 int minute = 0, int second = 0);

}  // namespace pvgp
