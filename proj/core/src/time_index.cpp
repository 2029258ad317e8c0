#include "pvgp/time_index.hpp"

#include <charconv>
#include <cstdio>

#include "pvgp/error.hpp"

namespace pvgp {

using namespace std::chrono;

TimeIndex timestamp_to_index(UtcTime t, UtcTime epoch) {
  const std::int64_t dt = (t - epoch).count();
  if (dt % kStepSeconds != 0)
    throw AlignmentError("timestamp " + format_utc(t) +
                         " is not on a 5-minute boundary relative to " +
                         format_utc(epoch));
  return TimeIndex{dt / kStepSeconds};
}

UtcTime index_to_timestamp(TimeIndex index, UtcTime epoch) {
  return epoch + seconds(index.value * kStepSeconds);
}

bool on_step_boundary(UtcTime t, UtcTime epoch) {
  return (t - epoch).count() % kStepSeconds == 0;
}

UtcTime midnight_of(UtcTime t) { return floor<days>(t); }

UtcTime make_utc(int year, unsigned month, unsigned day, int hour, int minute,
                 int second) {
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                           std::chrono::day{day}};
  if (!ymd.ok()) throw DataError("invalid calendar date");
  return sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
}

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  const char* b = s.data() + pos;
  for (std::size_t i = 0; i < len; ++i)
    if (b[i] < '0' || b[i] > '9') return false;
  return std::from_chars(b, b + len, out).ec == std::errc();
}

}  // namespace

UtcTime parse_utc(std::string_view text) {
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r'))
    text.remove_suffix(1);
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const auto bad = [&] {
    return DataError("unparseable UTC timestamp '" + std::string(text) + "'");
  };
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_int(text, 5, 2, mo) || text[7] != '-' || !read_int(text, 8, 2, d))
    throw bad();
  std::string_view rest = text.substr(10);
  if (!rest.empty()) {
    if ((rest[0] != 'T' && rest[0] != ' ') || rest.size() < 9 ||
        !read_int(rest, 1, 2, h) || rest[3] != ':' || !read_int(rest, 4, 2, mi) ||
        rest[6] != ':' || !read_int(rest, 7, 2, s))
      throw bad();
    rest = rest.substr(9);
    if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000"))
      throw bad();
  }
  if (mo < 1 || mo > 12 || h > 23 || mi > 59 || s > 60) throw bad();
  const year_month_day ymd{std::chrono::year{y},
                           std::chrono::month{static_cast<unsigned>(mo)},
                           std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw bad();
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::string format_utc(UtcTime t) {
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const hh_mm_ss tod{t - day};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()),
                static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()));
  return buf;
}

}  // namespace pvgp
