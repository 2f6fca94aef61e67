#include "spaceprofiler/config_text.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "spaceprofiler/error.hpp"

namespace spaceprofiler {

namespace {

class LineParser {
 public:
  LineParser(std::string_view text, std::size_t line, const std::string& source)
      : text_(text), line_(line), source_(source) {}

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) {
      ++pos_;
    }
  }
  bool at_end_or_comment() {
    skip_space();
    return pos_ >= text_.size() || text_[pos_] == '#';
  }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::size_t pos() const { return pos_; }

  TextConfig::Scalar scalar() {
    skip_space();
    const char c = peek();
    if (c == '"') return quoted();
    if (text_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (text_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return number();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(line_, source_ + ": " + what);
  }

 private:
  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      char c = text_[pos_++];
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated escape");
        const char e = text_[pos_++];
        switch (e) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      }
      out.push_back(c);
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if ((c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.' ||
          c == 'e' || c == 'E' || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    std::string digits;
    for (std::size_t i = start; i < pos_; ++i) {
      if (text_[i] != '_') digits.push_back(text_[i]);
    }
    if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
      fail("invalid value");
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  const std::string& source_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(std::string_view line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && in_string) {
      ++i;
    } else if (c == '"') {
      in_string = !in_string;
    } else if (c == '#' && !in_string) {
      return std::string(line.substr(0, i));
    }
  }
  return std::string(line);
}

}  // namespace

TextConfig TextConfig::parse(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  return parse(in, source);
}

TextConfig TextConfig::parse(std::istream& in, const std::string& source) {
  TextConfig cfg;
  cfg.source_ = source;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, source + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (!valid_key(section)) throw ParseError(line_no, source + ": invalid section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, source + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    if (!valid_key(key)) throw ParseError(line_no, source + ": invalid key '" + key + "'");
    std::string value_text = trim(std::string_view(line).substr(eq + 1));
    const std::size_t value_line = line_no;

    // Multi-line arrays: keep reading until brackets balance.
    if (!value_text.empty() && value_text.front() == '[') {
      auto depth = [](const std::string& s) {
        int d = 0;
        bool in_string = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (s[i] == '\\' && in_string) { ++i; continue; }
          if (s[i] == '"') in_string = !in_string;
          if (!in_string && s[i] == '[') ++d;
          if (!in_string && s[i] == ']') --d;
        }
        return d;
      };
      while (depth(value_text) > 0) {
        if (!std::getline(in, raw)) {
          throw ParseError(value_line, source + ": unterminated array");
        }
        ++line_no;
        value_text += " " + trim(strip_comment(raw));
      }
    }

    LineParser p(value_text, value_line, source);
    Value value;
    p.skip_space();
    if (p.peek() == '[') {
      p.expect('[');
      std::vector<Scalar> items;
      p.skip_space();
      if (p.peek() != ']') {
        while (true) {
          items.push_back(p.scalar());
          p.skip_space();
          if (p.peek() == ',') {
            p.expect(',');
            p.skip_space();
            if (p.peek() == ']') break;  // trailing comma
            continue;
          }
          break;
        }
      }
      p.expect(']');
      value = std::move(items);
    } else {
      value = p.scalar();
    }
    if (!p.at_end_or_comment()) p.fail("trailing characters after value");

    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full) != 0) {
      throw ParseError(value_line, source + ": duplicate key '" + full + "'");
    }
    cfg.values_.emplace(full, std::move(value));
  }
  return cfg;
}

TextConfig TextConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return parse(in, path.string());
}

bool TextConfig::has(std::string_view key) const { return find(key) != nullptr; }

std::vector<std::string> TextConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

const TextConfig::Value* TextConfig::find(std::string_view key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

namespace {

template <typename T>
const T* scalar_as(const TextConfig::Value& v) {
  const auto* s = std::get_if<TextConfig::Scalar>(&v);
  return s ? std::get_if<T>(s) : nullptr;
}

[[noreturn]] void type_error(const std::string& source, std::string_view key,
                             const char* expected) {
  throw Error(ErrorKind::config, source + ": key '" + std::string(key) +
                                     "' must be " + expected);
}

}  // namespace

std::optional<std::string> TextConfig::get_string(std::string_view key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* s = scalar_as<std::string>(*v)) return *s;
  type_error(source_, key, "a string");
}

std::optional<double> TextConfig::get_number(std::string_view key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* d = scalar_as<double>(*v)) return *d;
  type_error(source_, key, "a number");
}

std::optional<long long> TextConfig::get_integer(std::string_view key) const {
  auto d = get_number(key);
  if (!d) return std::nullopt;
  if (std::floor(*d) != *d || std::abs(*d) > 0x1p53) type_error(source_, key, "an integer");
  return static_cast<long long>(*d);
}

std::optional<bool> TextConfig::get_bool(std::string_view key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  if (const auto* b = scalar_as<bool>(*v)) return *b;
  type_error(source_, key, "a boolean");
}

std::optional<std::vector<std::string>> TextConfig::get_string_array(
    std::string_view key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  const auto* items = std::get_if<std::vector<Scalar>>(v);
  if (!items) type_error(source_, key, "an array of strings");
  std::vector<std::string> out;
  for (const auto& item : *items) {
    const auto* s = std::get_if<std::string>(&item);
    if (!s) type_error(source_, key, "an array of strings");
    out.push_back(*s);
  }
  return out;
}

std::optional<std::vector<double>> TextConfig::get_number_array(
    std::string_view key) const {
  const Value* v = find(key);
  if (!v) return std::nullopt;
  const auto* items = std::get_if<std::vector<Scalar>>(v);
  if (!items) type_error(source_, key, "an array of numbers");
  std::vector<double> out;
  for (const auto& item : *items) {
    const auto* d = std::get_if<double>(&item);
    if (!d) type_error(source_, key, "an array of numbers");
    out.push_back(*d);
  }
  return out;
}

std::string quote_config_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string format_config_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, ptr);
  (void)ec;
  return out;
}

}  // namespace spaceprofiler
