#include "spaceprofiler/date.hpp"

#include <charconv>
#include <cstdio>

#include "spaceprofiler/error.hpp"

namespace spaceprofiler {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::duplicate: return "duplicate";
    case ErrorKind::domain: return "domain";
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::config: return "config";
    case ErrorKind::alignment: return "alignment";
    case ErrorKind::isolated_node: return "isolated_node";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::schema: return "schema";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

bool read_fixed(std::string_view text, std::size_t pos, std::size_t width,
                int& out) {
  if (pos + width > text.size()) return false;
  const char* begin = text.data() + pos;
  const char* end = begin + width;
  for (const char* p = begin; p != end; ++p) {
    if (*p < '0' || *p > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!read_fixed(text, 0, 4, y) || !read_fixed(text, 5, 2, m) ||
      !read_fixed(text, 8, 2, d)) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{static_cast<unsigned>(m)},
                                  std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  if (text.size() < 16) return std::nullopt;
  auto date = parse_date(text.substr(0, 10));
  if (!date || (text[10] != 'T' && text[10] != ' ') || text[13] != ':') {
    return std::nullopt;
  }
  int hh = 0, mm = 0, ss = 0;
  if (!read_fixed(text, 11, 2, hh) || !read_fixed(text, 14, 2, mm)) {
    return std::nullopt;
  }
  std::size_t pos = 16;
  if (pos < text.size() && text[pos] == ':') {
    if (!read_fixed(text, pos + 1, 2, ss)) return std::nullopt;
    pos += 3;
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return Timestamp{*date} + std::chrono::hours{hh} +
         std::chrono::minutes{mm} + std::chrono::seconds{ss};
}

std::optional<int> parse_time_of_day(std::string_view text) {
  int hh = 0, mm = 0;
  if (text.size() != 5 || text[2] != ':' || !read_fixed(text, 0, 2, hh) ||
      !read_fixed(text, 3, 2, mm) || hh > 23 || mm > 59) {
    return std::nullopt;
  }
  return hh * 60 + mm;
}

std::string format_date(Date d) {
  std::chrono::year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_timestamp(Timestamp t) {
  const Date d = date_of(t);
  const auto secs = (t - Timestamp{d}).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02d", format_date(d).c_str(),
                static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                static_cast<int>(secs % 60));
  return buf;
}

std::string format_time_of_day(int minutes) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minutes / 60, minutes % 60);
  return buf;
}

}  // namespace spaceprofiler
