#include "wfp/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wfp/error.hpp"

namespace wfp {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string header_line(const Trace& t) {
  ordered_json j;
  j["protocol"] = to_string(t.protocol);
  j["label"] = t.label;
  return j.dump();
}

std::string packet_line(const Packet& p) {
  ordered_json j;
  j["ts"] = p.timestamp;
  j["dir"] = (p.direction == Direction::Positive) ? "+" : "-";
  j["size"] = p.size;
  return j.dump();
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw ParseError("trace file line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string trace_to_jsonl(const Trace& trace) {
  std::string out = header_line(trace);
  out.push_back('\n');
  for (const Packet& p : trace.packets) {
    out += packet_line(p);
    out.push_back('\n');
  }
  return out;
}

void store_traces(const std::vector<Trace>& traces, std::ostream& out) {
  for (const Trace& t : traces) out << trace_to_jsonl(t);
}

void store_traces(const std::vector<Trace>& traces, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open for writing: " + path);
  store_traces(traces, f);
  if (!f) throw ParseError("write failed: " + path);
}

std::vector<Trace> load_traces_from_string(const std::string& content) {
  std::vector<Trace> traces;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  bool have_trace = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(line_no, "invalid JSON");
    if (line_no == 1 && j.contains("manifest")) continue;  // CLI preamble
    if (j.contains("ts")) {
      if (!have_trace) fail(line_no, "packet line before any trace header");
      if (!j.contains("dir") || !j.contains("size")) fail(line_no, "packet line missing dir/size");
      Packet p;
      p.timestamp = j.at("ts").get<double>();
      std::string dir = j.at("dir").get<std::string>();
      if (dir == "+") {
        p.direction = Direction::Positive;
      } else if (dir == "-") {
        p.direction = Direction::Negative;
      } else {
        fail(line_no, "dir must be \"+\" or \"-\"");
      }
      p.size = j.at("size").get<uint32_t>();
      traces.back().packets.push_back(p);
    } else {
      if (!j.contains("protocol")) fail(line_no, "header missing protocol field");
      auto proto = protocol_from_string(j.at("protocol").get<std::string>());
      if (!proto) fail(line_no, "unknown protocol");
      Trace t;
      t.protocol = *proto;
      if (j.contains("label")) t.label = j.at("label").get<std::string>();
      traces.push_back(std::move(t));
      have_trace = true;
    }
  }
  return traces;
}

std::vector<Trace> load_traces(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return load_traces_from_string(buf.str());
}

}  // namespace wfp
