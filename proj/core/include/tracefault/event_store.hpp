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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tracefault/trace.hpp"

namespace tracefault {

// Trace event log: one JSON object per line, one line per trace node.
// Records of one run are contiguous and in pre-order. Fields:
//   campaign, ts (global sequence number), run_id, input_ref,
//   perturbation_ref (null on reference runs), seed, spec (hex),
//   node (index within the run), nodes (run size), path, state,
//   input_digest (hex), output (canonical payload or null),
//   flags (list; "component_error"), check (hex FNV-1a of the line
//   serialized without "check").
// Keys are sorted and doubles printed in shortest round-trip form, so the
// log is byte-identical across runs and machines.

class EventWriter {
 public:
  EventWriter(std::ostream& out, std::string campaign);

  /// Appends every node of `tree` as one contiguous block.
  void write(const TraceTree& tree);
  std::uint64_t records() const noexcept { return next_ts_; }

 private:
  std::ostream& out_;
  std::string campaign_;
  std::uint64_t next_ts_ = 0;
};

/// Verifies and decodes a whole log. Throws IntegrityError with the 1-based
/// line number on malformed lines, checksum mismatches, non-contiguous or
/// truncated runs, and broken tree structure.
std::vector<TraceTree> read_log(std::istream& in);
std::vector<TraceTree> read_log_file(const std::filesystem::path& file);

/// Reconstructs one run. The whole log is verified first. Throws
/// ConfigError when the log holds no run with that id.
TraceTree replay(std::istream& in, std::string_view run_id);
TraceTree replay_file(const std::filesystem::path& file, std::string_view run_id);

}  // namespace tracefault
