#pragma once
// Canonical trace interchange format: UTF-8, newline-delimited JSON.
// Each trace is a header line {"protocol": "...", "label": "..."}
// followed by one packet line {"ts": <float s>, "dir": "+"|"-",
// "size": <int>} per packet. A leading {"manifest": {...}} line
// (written by the CLI) is skipped on load.

#include <ostream>
#include <string>
#include <vector>

#include "wfp/trace.hpp"

namespace wfp {

void store_traces(const std::vector<Trace>& traces, const std::string& path);
void store_traces(const std::vector<Trace>& traces, std::ostream& out);

/// Round-trips store_traces output bit-exactly. Throws ParseError with
/// the 1-based line number for malformed input.
std::vector<Trace> load_traces(const std::string& path);
std::vector<Trace> load_traces_from_string(const std::string& content);

/// One trace serialized as canonical JSONL (header + packet lines).
std::string trace_to_jsonl(const Trace& trace);

}  // namespace wfp
