#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace gcagent {

// Milliseconds since the Unix epoch, UTC.
using TimestampMs = int64_t;

// Injectable time source; tests pin it to fixed values.
using Clock = std::function<TimestampMs()>;

TimestampMs system_now_ms();
Clock system_clock();

// Calendar day number (days since 1970-01-01) containing `ts`, UTC.
int64_t utc_day(TimestampMs ts);

// "YYYY-MM-DD" for a day number and back. parse_utc_date throws
// InvalidArgument on malformed input.
std::string format_utc_date(int64_t day);
int64_t parse_utc_date(const std::string& date);

}  // namespace gcagent
