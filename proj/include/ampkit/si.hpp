#pragma once

#include <optional>
#include <string>

namespace ampkit {

/// Parse a number with an optional SPICE-style SI suffix.
/// Supported suffixes: f p n u m k Meg G.  "10p" -> 1e-11, "1Meg" -> 1e6.
/// The result is the plain decoded value times the suffix multiplier,
/// bit-exact in double arithmetic.
std::optional<double> parse_si(std::string_view text);

/// Format a double so that parse_si round-trips to the same bits.
std::string format_number(double value);

}  // namespace ampkit
