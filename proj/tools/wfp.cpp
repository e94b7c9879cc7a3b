// wfp: batch pipeline driver. Subcommands ingest captures into canonical
// traces, generate synthetic corpora, and run truncation-sweep and top-a
// experiments. Every report embeds a manifest; `wfp replay` re-executes a
// manifest and reproduces the outputs byte for byte.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wfp/dataset.hpp"
#include "wfp/error.hpp"
#include "wfp/eval.hpp"
#include "wfp/ingest.hpp"
#include "wfp/pcap.hpp"
#include "wfp/synth.hpp"
#include "wfp/trace_io.hpp"
#include "wfp/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace wfp;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitInvalid = 4;
constexpr int kExitEval = 5;

// ---------------------------------------------------------------- helpers

std::vector<std::size_t> parse_k_spec(const std::string& spec) {
  std::vector<std::size_t> ks;
  if (spec.find(':') != std::string::npos) {
    std::size_t c1 = spec.find(':');
    std::size_t c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) throw InvalidParam("--k range needs start:stop:step");
    long start = std::stol(spec.substr(0, c1));
    long stop = std::stol(spec.substr(c1 + 1, c2 - c1 - 1));
    long step = std::stol(spec.substr(c2 + 1));
    if (start < 1 || stop < start || step < 1) throw InvalidParam("--k range is invalid");
    for (long k = start; k <= stop; k += step) ks.push_back(static_cast<std::size_t>(k));
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      long k = std::stol(item);
      if (k < 1) throw InvalidParam("--k values must be >= 1");
      ks.push_back(static_cast<std::size_t>(k));
    }
  }
  if (ks.empty()) throw InvalidParam("--k produced an empty grid");
  return ks;
}

Protocol parse_protocol(const std::string& name) {
  auto p = protocol_from_string(name);
  if (!p) throw InvalidParam("unknown protocol: " + name);
  return *p;
}

FeatureSet parse_features(const std::string& name) {
  if (name == "simple") return FeatureSet::Simple;
  if (name == "transfer") return FeatureSet::Transfer;
  throw InvalidParam("unknown feature set: " + name);
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) {
    auto a = algorithm_from_string(n);
    if (!a) throw InvalidParam("unknown algorithm: " + n);
    out.push_back(*a);
  }
  if (out.empty()) out.push_back(Algorithm::RF);
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open for writing: " + path);
  f << content;
  if (!f) throw ParseError("write failed: " + path);
}

void write_manifest_sidecar(const ordered_json& manifest, const std::string& out_base) {
  write_text(out_base + ".manifest.json", manifest.dump(2) + "\n");
}

ordered_json base_manifest(const std::string& command) {
  ordered_json m;
  m["command"] = command;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  return m;
}

// --------------------------------------------------------------- commands

struct IngestArgs {
  std::string capture;
  std::string protocol = "gquic";
  std::string out;
  bool whole_fallback = false;
};

int run_ingest(const IngestArgs& args) {
  CaptureResult capture = parse_capture_file(args.capture);
  Protocol protocol = parse_protocol(args.protocol);
  SplitResult split = split_conversations(capture.packets, protocol);

  std::vector<Trace> traces;
  uint64_t marker_missing = 0;
  for (const Conversation& conv : split.conversations) {
    try {
      traces.push_back(tailor(conv, args.whole_fallback));
    } catch (const TailorError&) {
      ++marker_missing;
    }
  }

  ordered_json manifest = base_manifest("ingest");
  manifest["inputs"] = {args.capture};
  manifest["protocol"] = args.protocol;
  manifest["whole_conversation_fallback"] = args.whole_fallback;
  manifest["out"] = args.out;

  std::ostringstream body;
  store_traces(traces, body);

  std::cout << "packets=" << capture.packets.size() << " conversations="
            << split.conversations.size() << " traces=" << traces.size()
            << " marker_missing=" << marker_missing
            << " skipped_non_ip=" << capture.skipped_non_ip
            << " skipped_fragmented=" << capture.skipped_fragmented
            << " unreadable_cid=" << split.unreadable_cid
            << " truncated_tail=" << (capture.truncated_tail ? 1 : 0) << "\n";

  if (traces.empty()) {
    std::cerr << "no tailored traces produced\n";
    return kExitEmpty;
  }
  write_text(args.out, "{\"manifest\":" + manifest.dump() + "}\n" + body.str());
  write_manifest_sidecar(manifest, args.out);
  return kExitOk;
}

struct SynthArgs {
  uint32_t sites = 20;
  uint32_t visits = 50;
  std::string protocol = "gquic";
  uint64_t seed = 1;
  double bandwidth = 0.0;
  double delay = 0.01;
  double loss = 0.0;
  uint32_t mtu = 1400;
  uint32_t resources_lo = 5;
  uint32_t resources_hi = 30;
  double log_mean = 9.5;
  double log_sigma = 1.2;
  uint32_t request_lo = 80;
  uint32_t request_hi = 400;
  std::string out;
};

ordered_json synth_manifest(const SynthArgs& args) {
  ordered_json m = base_manifest("synth");
  m["sites"] = args.sites;
  m["visits"] = args.visits;
  m["protocol"] = args.protocol;
  m["seed"] = args.seed;
  m["bandwidth"] = args.bandwidth;
  m["delay"] = args.delay;
  m["loss"] = args.loss;
  m["mtu"] = args.mtu;
  m["resources"] = {args.resources_lo, args.resources_hi};
  m["log_mean"] = args.log_mean;
  m["log_sigma"] = args.log_sigma;
  m["request"] = {args.request_lo, args.request_hi};
  m["out"] = args.out;
  return m;
}

int run_synth(const SynthArgs& args) {
  NetworkCondition net{args.bandwidth, args.delay, args.loss};
  SiteParams params;
  params.n_resources = {args.resources_lo, args.resources_hi};
  params.log_mean = args.log_mean;
  params.log_sigma = args.log_sigma;
  params.request_size_range = {args.request_lo, args.request_hi};

  std::vector<Trace> traces = generate_dataset(args.sites, args.visits, net,
                                               parse_protocol(args.protocol), args.seed, params,
                                               args.mtu);
  ordered_json manifest = synth_manifest(args);
  std::ostringstream body;
  store_traces(traces, body);
  write_text(args.out, "{\"manifest\":" + manifest.dump() + "}\n" + body.str());
  write_manifest_sidecar(manifest, args.out);
  std::cout << "sites=" << args.sites << " visits=" << args.visits
            << " traces=" << traces.size() << " out=" << args.out << "\n";
  return kExitOk;
}

struct SweepArgs {
  std::string traces;
  std::string features = "simple";
  std::vector<std::string> algorithms;
  std::string k_spec = "5:200:5";
  uint64_t seed = 1;
  unsigned folds = 10;
  unsigned threads = 0;
  std::string out;
};

ordered_json sweep_manifest(const SweepArgs& args, const std::vector<std::size_t>& ks,
                            const std::vector<Algorithm>& algorithms) {
  ordered_json m = base_manifest("sweep");
  m["inputs"] = {args.traces};
  m["feature_set"] = args.features;
  ordered_json algo_names = ordered_json::array();
  for (Algorithm a : algorithms) algo_names.push_back(to_string(a));
  m["algorithms"] = algo_names;
  m["k_spec"] = args.k_spec;
  m["k"] = ks;
  m["seed"] = args.seed;
  m["folds"] = args.folds;
  m["threads"] = args.threads;
  m["out"] = args.out;
  return m;
}

int run_sweep(const SweepArgs& args) {
  auto ks = parse_k_spec(args.k_spec);
  auto algorithms = parse_algorithms(args.algorithms);
  auto traces = load_traces(args.traces);
  if (traces.empty()) {
    std::cerr << "no traces in " << args.traces << "\n";
    return kExitEmpty;
  }

  Hyperparams hp;
  hp.threads = args.threads;
  SweepResult sweep = k_sweep(traces, parse_features(args.features), algorithms, ks, args.seed,
                              hp, args.folds);

  ordered_json manifest = sweep_manifest(args, ks, algorithms);
  std::string manifest_line = manifest.dump();

  std::ostringstream csv;
  csv << "# manifest: " << manifest_line << "\n";
  csv << "k,algorithm,feature_set,early,mean_accuracy";
  for (unsigned f = 0; f < args.folds; ++f) csv << ",fold_" << f;
  csv << "\n";
  for (const SweepRow& row : sweep.rows) {
    csv << row.k << ',' << to_string(row.algorithm) << ',' << to_string(row.feature_set) << ','
        << (row.early ? 1 : 0) << ',' << format_double(row.mean_accuracy);
    for (double acc : row.fold_accuracy) csv << ',' << format_double(acc);
    csv << "\n";
  }

  std::ostringstream jsonl;
  jsonl << "{\"manifest\":" << manifest_line << "}\n";
  for (const SweepRow& row : sweep.rows) {
    ordered_json j;
    j["k"] = row.k;
    j["algorithm"] = to_string(row.algorithm);
    j["feature_set"] = to_string(row.feature_set);
    j["early"] = row.early;
    j["mean_accuracy"] = row.mean_accuracy;
    j["fold_accuracy"] = row.fold_accuracy;
    jsonl << j.dump() << "\n";
  }

  write_text(args.out + ".csv", csv.str());
  write_text(args.out + ".jsonl", jsonl.str());
  write_manifest_sidecar(manifest, args.out);
  std::cout << "rows=" << sweep.rows.size() << " classes=" << sweep.n_classes << " out="
            << args.out << ".{csv,jsonl}\n";
  return kExitOk;
}

struct TopaArgs {
  std::string traces;
  std::string features = "simple";
  std::string algorithm = "rf";
  std::string k_spec = "5:40:5";
  unsigned a_max = 5;
  uint64_t seed = 1;
  unsigned folds = 10;
  unsigned threads = 0;
  std::string out;
};

ordered_json topa_manifest(const TopaArgs& args, const std::vector<std::size_t>& ks) {
  ordered_json m = base_manifest("topa");
  m["inputs"] = {args.traces};
  m["feature_set"] = args.features;
  m["algorithm"] = args.algorithm;
  m["k_spec"] = args.k_spec;
  m["k"] = ks;
  m["a_max"] = args.a_max;
  m["seed"] = args.seed;
  m["folds"] = args.folds;
  m["threads"] = args.threads;
  m["out"] = args.out;
  return m;
}

int run_topa(const TopaArgs& args) {
  auto ks = parse_k_spec(args.k_spec);
  auto algorithm = algorithm_from_string(args.algorithm);
  if (!algorithm) throw InvalidParam("unknown algorithm: " + args.algorithm);
  auto traces = load_traces(args.traces);
  if (traces.empty()) {
    std::cerr << "no traces in " << args.traces << "\n";
    return kExitEmpty;
  }

  Hyperparams hp;
  hp.threads = args.threads;
  TopATable table = top_a_sweep(traces, parse_features(args.features), *algorithm, ks,
                                args.a_max, args.seed, hp, args.folds);

  ordered_json manifest = topa_manifest(args, ks);
  std::ostringstream csv;
  csv << "# manifest: " << manifest.dump() << "\n";
  csv << "k";
  for (unsigned a = 1; a <= args.a_max; ++a) csv << ",a_" << a;
  csv << ",improve_1_to_" << args.a_max << "\n";
  for (std::size_t i = 0; i < table.ks.size(); ++i) {
    csv << table.ks[i];
    for (unsigned a = 0; a < args.a_max; ++a) csv << ',' << format_double(table.accuracy[i][a]);
    csv << ',' << format_double(table.improve(i)) << "\n";
  }

  write_text(args.out + ".csv", csv.str());
  write_manifest_sidecar(manifest, args.out);
  std::cout << "rows=" << table.ks.size() << " a_max=" << args.a_max << " classes="
            << table.n_classes << " out=" << args.out << ".csv\n";
  return kExitOk;
}

// ---------------------------------------------------------------- replay

ordered_json load_manifest(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open: " + path);
  std::string first;
  std::getline(f, first);

  std::string text;
  if (first.rfind("# manifest: ", 0) == 0) {
    text = first.substr(12);
  } else if (first.rfind("{\"manifest\":", 0) == 0) {
    auto wrapper = nlohmann::json::parse(first, nullptr, false);
    if (!wrapper.is_discarded()) return wrapper.at("manifest");
    throw ParseError("malformed embedded manifest in " + path);
  } else {
    // whole file is the manifest
    std::ostringstream rest;
    rest << first << "\n" << f.rdbuf();
    text = rest.str();
  }
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("command")) {
    throw ParseError("no manifest found in " + path);
  }
  return j;
}

int run_replay(const std::string& path) {
  ordered_json m = load_manifest(path);
  std::string command = m.at("command").get<std::string>();
  if (command == "synth") {
    SynthArgs args;
    args.sites = m.at("sites").get<uint32_t>();
    args.visits = m.at("visits").get<uint32_t>();
    args.protocol = m.at("protocol").get<std::string>();
    args.seed = m.at("seed").get<uint64_t>();
    args.bandwidth = m.at("bandwidth").get<double>();
    args.delay = m.at("delay").get<double>();
    args.loss = m.at("loss").get<double>();
    args.mtu = m.at("mtu").get<uint32_t>();
    args.resources_lo = m.at("resources").at(0).get<uint32_t>();
    args.resources_hi = m.at("resources").at(1).get<uint32_t>();
    args.log_mean = m.at("log_mean").get<double>();
    args.log_sigma = m.at("log_sigma").get<double>();
    args.request_lo = m.at("request").at(0).get<uint32_t>();
    args.request_hi = m.at("request").at(1).get<uint32_t>();
    args.out = m.at("out").get<std::string>();
    return run_synth(args);
  }
  if (command == "sweep") {
    SweepArgs args;
    args.traces = m.at("inputs").at(0).get<std::string>();
    args.features = m.at("feature_set").get<std::string>();
    for (const auto& a : m.at("algorithms")) args.algorithms.push_back(a.get<std::string>());
    args.k_spec = m.at("k_spec").get<std::string>();
    args.seed = m.at("seed").get<uint64_t>();
    args.folds = m.at("folds").get<unsigned>();
    args.threads = m.at("threads").get<unsigned>();
    args.out = m.at("out").get<std::string>();
    return run_sweep(args);
  }
  if (command == "topa") {
    TopaArgs args;
    args.traces = m.at("inputs").at(0).get<std::string>();
    args.features = m.at("feature_set").get<std::string>();
    args.algorithm = m.at("algorithm").get<std::string>();
    args.k_spec = m.at("k_spec").get<std::string>();
    args.a_max = m.at("a_max").get<unsigned>();
    args.seed = m.at("seed").get<uint64_t>();
    args.folds = m.at("folds").get<unsigned>();
    args.threads = m.at("threads").get<unsigned>();
    args.out = m.at("out").get<std::string>();
    return run_topa(args);
  }
  if (command == "ingest") {
    IngestArgs args;
    args.capture = m.at("inputs").at(0).get<std::string>();
    args.protocol = m.at("protocol").get<std::string>();
    args.whole_fallback = m.at("whole_conversation_fallback").get<bool>();
    args.out = m.at("out").get<std::string>();
    return run_ingest(args);
  }
  throw InvalidParam("manifest has unknown command: " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"website fingerprinting experiment toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  IngestArgs ingest;
  auto* cmd_ingest = app.add_subcommand("ingest", "tailor a pcap capture into canonical traces");
  cmd_ingest->add_option("capture", ingest.capture, "pcap file")->required();
  cmd_ingest->add_option("--protocol", ingest.protocol, "gquic|iquic|https")
      ->envname("WFP_PROTOCOL")
      ->required();
  cmd_ingest->add_option("--out", ingest.out, "output trace JSONL")->envname("WFP_OUT")->required();
  cmd_ingest->add_flag("--whole-conversation-fallback", ingest.whole_fallback,
                       "keep whole conversation when no handshake marker is found");

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic labeled trace corpus");
  cmd_synth->add_option("--sites", synth.sites, "number of websites");
  cmd_synth->add_option("--visits", synth.visits, "visits per site");
  cmd_synth->add_option("--protocol", synth.protocol, "gquic|iquic|https")->envname("WFP_PROTOCOL");
  cmd_synth->add_option("--seed", synth.seed, "master seed")->envname("WFP_SEED");
  cmd_synth->add_option("--bandwidth", synth.bandwidth, "bits/second, 0 = unlimited");
  cmd_synth->add_option("--delay", synth.delay, "one-way delay seconds");
  cmd_synth->add_option("--loss", synth.loss, "loss probability in [0,1)");
  cmd_synth->add_option("--mtu", synth.mtu, "response chunk payload bytes");
  cmd_synth->add_option("--resources-lo", synth.resources_lo, "min resources per site");
  cmd_synth->add_option("--resources-hi", synth.resources_hi, "max resources per site");
  cmd_synth->add_option("--log-mean", synth.log_mean, "resource size log-normal mu");
  cmd_synth->add_option("--log-sigma", synth.log_sigma, "resource size log-normal sigma");
  cmd_synth->add_option("--request-lo", synth.request_lo, "min request payload bytes");
  cmd_synth->add_option("--request-hi", synth.request_hi, "max request payload bytes");
  cmd_synth->add_option("--out", synth.out, "output trace JSONL")->envname("WFP_OUT")->required();

  SweepArgs sweep;
  auto* cmd_sweep = app.add_subcommand("sweep", "cross-validated accuracy over the k grid");
  cmd_sweep->add_option("traces", sweep.traces, "trace JSONL file")->required();
  cmd_sweep->add_option("--features", sweep.features, "simple|transfer")->envname("WFP_FEATURES");
  cmd_sweep->add_option("--algo", sweep.algorithms, "rf|et|knn|nb (repeatable)");
  cmd_sweep->add_option("--k", sweep.k_spec, "single k, comma list, or start:stop:step")
      ->envname("WFP_K");
  cmd_sweep->add_option("--seed", sweep.seed, "seed")->envname("WFP_SEED");
  cmd_sweep->add_option("--folds", sweep.folds, "cross-validation folds");
  cmd_sweep->add_option("--threads", sweep.threads, "worker bound, 0 = hardware")
      ->envname("WFP_THREADS");
  cmd_sweep->add_option("--out", sweep.out, "report base path")->envname("WFP_OUT")->required();

  TopaArgs topa;
  auto* cmd_topa = app.add_subcommand("topa", "top-a attack table over k");
  cmd_topa->add_option("traces", topa.traces, "trace JSONL file")->required();
  cmd_topa->add_option("--features", topa.features, "simple|transfer")->envname("WFP_FEATURES");
  cmd_topa->add_option("--algo", topa.algorithm, "rf|et|knn|nb");
  cmd_topa->add_option("--k", topa.k_spec, "single k, comma list, or start:stop:step")
      ->envname("WFP_K");
  cmd_topa->add_option("--a-max", topa.a_max, "largest prediction set size")->envname("WFP_A_MAX");
  cmd_topa->add_option("--seed", topa.seed, "seed")->envname("WFP_SEED");
  cmd_topa->add_option("--folds", topa.folds, "cross-validation folds");
  cmd_topa->add_option("--threads", topa.threads, "worker bound, 0 = hardware")
      ->envname("WFP_THREADS");
  cmd_topa->add_option("--out", topa.out, "report base path")->envname("WFP_OUT")->required();

  std::string replay_path;
  auto* cmd_replay = app.add_subcommand("replay", "re-run a manifest and rewrite its outputs");
  cmd_replay->add_option("manifest", replay_path, "manifest json or report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (cmd_ingest->parsed()) return run_ingest(ingest);
    if (cmd_synth->parsed()) return run_synth(synth);
    if (cmd_sweep->parsed()) return run_sweep(sweep);
    if (cmd_topa->parsed()) return run_topa(topa);
    if (cmd_replay->parsed()) return run_replay(replay_path);
  } catch (const InvalidParam& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const TailorError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const Error& e) {  // fit/eval/featurize failures
    std::cerr << "error: " << e.what() << "\n";
    return kExitEval;
  }
  return kExitInvalid;
}
