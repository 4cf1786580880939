#pragma once

#include "ampkit/loop.hpp"

namespace ampkit {

/// Full interpretable trace of one design run as versioned JSON.
std::string report_json(const DesignState& state);

/// Atomic write: the report lands under `path` complete or not at all.
void write_report(const std::string& path, const DesignState& state);

/// Condensed human-readable rendering of a report file's JSON text.
std::string report_summary(const std::string& json_text);

}  // namespace ampkit
