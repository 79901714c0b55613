#include "gcagent/common/time.hpp"

#include <chrono>
#include <cstdio>

#include "gcagent/common/error.hpp"

namespace gcagent {

namespace chr = std::chrono;

TimestampMs system_now_ms() {
  return chr::duration_cast<chr::milliseconds>(
             chr::system_clock::now().time_since_epoch())
      .count();
}

Clock system_clock() { return &system_now_ms; }

int64_t utc_day(TimestampMs ts) {
  constexpr int64_t kMsPerDay = 86'400'000;
  int64_t day = ts / kMsPerDay;
  if (ts % kMsPerDay < 0) --day;
  return day;
}

std::string format_utc_date(int64_t day) {
  chr::year_month_day ymd{chr::sys_days{chr::days{day}}};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

int64_t parse_utc_date(const std::string& date) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (std::sscanf(date.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) {
    throw Error(ErrorCode::InvalidArgument, "expected YYYY-MM-DD, got '" + date + "'");
  }
  chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::InvalidArgument, "not a calendar date: '" + date + "'");
  }
  return chr::sys_days{ymd}.time_since_epoch().count();
}

}  // namespace gcagent
