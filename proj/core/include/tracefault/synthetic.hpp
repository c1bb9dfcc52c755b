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
#include <memory>
#include <string>
#include <vector>

#include "tracefault/mock_components.hpp"
#include "tracefault/payload.hpp"

namespace tracefault {

/// Indexed collection of pipeline inputs, optionally carrying ground truth.
class Dataset : public GroundTruth {
 public:
  virtual std::size_t size() const = 0;
  /// Throws std::out_of_range for an index past the end.
  virtual Payload input(std::size_t index) const = 0;
};

struct SceneOptions {
  std::size_t count = 50;
  std::uint64_t seed = 0;
  std::size_t image_size = 32;
  std::vector<std::string> labels;
  std::size_t min_objects = 1;
  std::size_t max_objects = 3;
};

/// Square grey-level images with rectangular objects. Ground truth holds one
/// detection per object, with its label drawn from `labels`.
std::shared_ptr<Dataset> make_scene_dataset(const SceneOptions& options);

struct TextOptions {
  std::size_t count = 50;
  std::uint64_t seed = 0;
  std::size_t min_length = 6;
  std::size_t max_length = 16;
};

/// Lowercase alphanumeric strings. Ground-truth text equals the input.
std::shared_ptr<Dataset> make_text_dataset(const TextOptions& options);

struct TensorOptions {
  std::size_t count = 50;
  std::uint64_t seed = 0;
  std::vector<std::size_t> shape{8};
};

/// Uniform [0,1) tensors without ground truth.
std::shared_ptr<Dataset> make_tensor_dataset(const TensorOptions& options);

/// Payload JSON files, one input per file, in the given order.
std::shared_ptr<Dataset> make_file_dataset(const std::vector<std::filesystem::path>& files);

}  // namespace tracefault
