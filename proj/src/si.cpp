#include "ampkit/si.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace ampkit {

std::optional<double> parse_si(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string buf(text);
  const char* begin = buf.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;

  std::string_view suffix(end);
  if (suffix.empty()) return value;

  struct Entry {
    const char* name;
    double mult;
  };
  static constexpr Entry table[] = {
      {"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6},
      {"m", 1e-3},  {"k", 1e3},   {"Meg", 1e6}, {"G", 1e9},
  };
  for (const auto& e : table) {
    if (suffix == e.name) return value * e.mult;
  }
  return std::nullopt;
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace ampkit
