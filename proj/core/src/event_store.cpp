// Copyright 2026 The tracefault Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tracefault/event_store.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"

namespace tracefault {

namespace {

using nlohmann::json;

constexpr std::string_view kComponentErrorFlag = "component_error";

std::string seal(json record) {
  record.erase("check");
  record["check"] = to_hex(fnv1a64(record.dump()));
  return record.dump();
}

std::uint64_t hex_field(const json& r, const char* key, std::size_t line) {
  std::uint64_t v = 0;
  if (!r.at(key).is_string() || !from_hex(r.at(key).get<std::string>(), v)) {
    throw IntegrityError(std::string("malformed ") + key, line);
  }
  return v;
}

struct OpenRun {
  TraceTree tree;
  std::size_t expected = 0;
  std::size_t first_line = 0;
};

void close_run(OpenRun& run, std::vector<TraceTree>& out) {
  try {
    check_structure(run.tree);
  } catch (const IntegrityError& e) {
    throw IntegrityError(e.what(), run.first_line);
  }
  out.push_back(std::move(run.tree));
}

}  // namespace

EventWriter::EventWriter(std::ostream& out, std::string campaign)
    : out_(out), campaign_(std::move(campaign)) {}

void EventWriter::write(const TraceTree& tree) {
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const TraceNode& n = tree.nodes[i];
    json flags = json::array();
    if (n.component_error) flags.push_back(kComponentErrorFlag);
    json record{{"campaign", campaign_},
                {"ts", next_ts_++},
                {"run_id", tree.run_id},
                {"input_ref", tree.input_ref},
                {"perturbation_ref",
                 tree.perturbation_ref ? json(*tree.perturbation_ref) : json()},
                {"seed", tree.seed},
                {"spec", to_hex(tree.spec_id)},
                {"node", i},
                {"nodes", tree.nodes.size()},
                {"path", path_key(n.path)},
                {"state", n.state},
                {"input_digest", to_hex(n.input_digest)},
                {"output", n.output ? to_json_value(*n.output) : json()},
                {"flags", std::move(flags)}};
    out_ << seal(std::move(record)) << '\n';
  }
}

std::vector<TraceTree> read_log(std::istream& in) {
  std::vector<TraceTree> out;
  std::unordered_set<std::string> finished;
  OpenRun run;
  bool open = false;
  std::uint64_t expected_ts = 0;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) throw IntegrityError("empty line", line);
    json r;
    try {
      r = json::parse(text);
    } catch (const json::parse_error&) {
      throw IntegrityError("malformed record", line);
    }
    try {
      if (!r.is_object() || !r.contains("check")) throw IntegrityError("missing checksum", line);
      if (hex_field(r, "check", line) != fnv1a64([&] {
            json body = r;
            body.erase("check");
            return body.dump();
          }())) {
        throw IntegrityError("checksum mismatch", line);
      }
      if (r.at("ts").get<std::uint64_t>() != expected_ts++) {
        throw IntegrityError("sequence number out of order", line);
      }
      const auto run_id = r.at("run_id").get<std::string>();
      const auto node = r.at("node").get<std::size_t>();
      const auto nodes = r.at("nodes").get<std::size_t>();
      if (node == 0) {
        if (open) throw IntegrityError("run '" + run.tree.run_id + "' is truncated", line);
        if (finished.contains(run_id)) {
          throw IntegrityError("records of run '" + run_id + "' are not contiguous", line);
        }
        if (nodes == 0) throw IntegrityError("run with no nodes", line);
        run = OpenRun{};
        run.tree.run_id = run_id;
        run.tree.input_ref = r.at("input_ref").get<std::uint64_t>();
        if (!r.at("perturbation_ref").is_null()) {
          run.tree.perturbation_ref = r.at("perturbation_ref").get<std::string>();
        }
        run.tree.seed = r.at("seed").get<std::uint64_t>();
        run.tree.spec_id = hex_field(r, "spec", line);
        run.expected = nodes;
        run.first_line = line;
        open = true;
      } else {
        const bool same_run = open && run_id == run.tree.run_id &&
                              node == run.tree.nodes.size() && nodes == run.expected &&
                              r.at("input_ref").get<std::uint64_t>() == run.tree.input_ref &&
                              r.at("seed").get<std::uint64_t>() == run.tree.seed &&
                              hex_field(r, "spec", line) == run.tree.spec_id;
        if (!same_run) throw IntegrityError("record does not continue the open run", line);
      }
      TraceNode n;
      n.state = r.at("state").get<std::string>();
      try {
        n.path = parse_path_key(r.at("path").get<std::string>());
      } catch (const IntegrityError& e) {
        throw IntegrityError(e.what(), line);
      }
      n.input_digest = hex_field(r, "input_digest", line);
      if (!r.at("output").is_null()) n.output = payload_from_json_value(r.at("output"));
      for (const auto& f : r.at("flags")) {
        if (f.get<std::string>() != kComponentErrorFlag) throw IntegrityError("unknown flag", line);
        n.component_error = true;
      }
      if (n.component_error == n.output.has_value()) {
        throw IntegrityError("output presence contradicts flags", line);
      }
      run.tree.nodes.push_back(std::move(n));
      if (run.tree.nodes.size() == run.expected) {
        finished.insert(run.tree.run_id);
        close_run(run, out);
        open = false;
      }
    } catch (const json::exception&) {
      throw IntegrityError("missing or mistyped field", line);
    } catch (const EvaluationError& e) {
      throw IntegrityError(std::string("bad output payload: ") + e.what(), line);
    }
  }
  if (open) throw IntegrityError("run '" + run.tree.run_id + "' is truncated", line);
  return out;
}

std::vector<TraceTree> read_log_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  return read_log(in);
}

TraceTree replay(std::istream& in, std::string_view run_id) {
  for (auto& tree : read_log(in)) {
    if (tree.run_id == run_id) return std::move(tree);
  }
  throw ConfigError("log holds no run '" + std::string(run_id) + "'");
}

TraceTree replay_file(const std::filesystem::path& file, std::string_view run_id) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file.string());
  return replay(in, run_id);
}

}  // namespace tracefault
