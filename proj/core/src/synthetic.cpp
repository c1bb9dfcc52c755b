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

#include "tracefault/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tracefault/errors.hpp"
#include "tracefault/hash.hpp"

namespace tracefault {

namespace {

void check_index(std::size_t index, std::size_t size) {
  if (index >= size) throw std::out_of_range("dataset index " + std::to_string(index));
}

class SceneDataset final : public Dataset {
 public:
  explicit SceneDataset(const SceneOptions& o) {
    if (o.labels.empty()) throw ConfigError("scene dataset needs at least one label");
    if (o.image_size < 8) throw ConfigError("scene image_size must be at least 8");
    if (o.min_objects == 0 || o.min_objects > o.max_objects) {
      throw ConfigError("scene object counts must satisfy 1 <= min <= max");
    }
    const std::size_t s = o.image_size;
    const std::size_t max_side = std::max<std::size_t>(3, s / 3);
    for (std::size_t i = 0; i < o.count; ++i) {
      SplitMix64 rng(hash_combine(o.seed, static_cast<std::uint64_t>(i)));
      Tensor image{std::vector<double>(s * s, 0.1), {s, s}};
      DetectionSet truth;
      const std::size_t n = o.min_objects + rng.below(o.max_objects - o.min_objects + 1);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t label = rng.below(o.labels.size());
        const std::size_t w = 3 + rng.below(max_side - 2);
        const std::size_t h = 3 + rng.below(max_side - 2);
        const std::size_t x = rng.below(s - w + 1);
        const std::size_t y = rng.below(s - h + 1);
        const double level =
            0.3 + 0.6 * static_cast<double>(label + 1) / static_cast<double>(o.labels.size() + 1);
        for (std::size_t r = y; r < y + h; ++r) {
          for (std::size_t c = x; c < x + w; ++c) image.data[r * s + c] = level;
        }
        truth.items.push_back(Detection{
            Box{static_cast<double>(x), static_cast<double>(y), static_cast<double>(w),
                static_cast<double>(h)},
            o.labels[label], 0.9});
      }
      images_.push_back(std::move(image));
      truth_.push_back(std::move(truth));
    }
  }

  std::size_t size() const override { return images_.size(); }
  Payload input(std::size_t index) const override {
    check_index(index, size());
    return images_[index];
  }
  std::optional<DetectionSet> detections(std::uint64_t input_ref) const override {
    if (input_ref >= truth_.size()) return std::nullopt;
    return truth_[input_ref];
  }

 private:
  std::vector<Tensor> images_;
  std::vector<DetectionSet> truth_;
};

class TextDataset final : public Dataset {
 public:
  explicit TextDataset(const TextOptions& o) {
    if (o.min_length == 0 || o.min_length > o.max_length) {
      throw ConfigError("text lengths must satisfy 1 <= min <= max");
    }
    constexpr std::string_view kAlphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    for (std::size_t i = 0; i < o.count; ++i) {
      SplitMix64 rng(hash_combine(o.seed, static_cast<std::uint64_t>(i)));
      std::string s(o.min_length + rng.below(o.max_length - o.min_length + 1), ' ');
      for (char& c : s) c = kAlphabet[rng.below(kAlphabet.size())];
      texts_.push_back(std::move(s));
    }
  }

  std::size_t size() const override { return texts_.size(); }
  Payload input(std::size_t index) const override {
    check_index(index, size());
    return Text{texts_[index]};
  }
  std::optional<std::string> text(std::uint64_t input_ref) const override {
    if (input_ref >= texts_.size()) return std::nullopt;
    return texts_[input_ref];
  }

 private:
  std::vector<std::string> texts_;
};

class PayloadDataset final : public Dataset {
 public:
  explicit PayloadDataset(std::vector<Payload> items) : items_(std::move(items)) {}
  std::size_t size() const override { return items_.size(); }
  Payload input(std::size_t index) const override {
    check_index(index, size());
    return items_[index];
  }

 private:
  std::vector<Payload> items_;
};

}  // namespace

std::shared_ptr<Dataset> make_scene_dataset(const SceneOptions& options) {
  return std::make_shared<SceneDataset>(options);
}

std::shared_ptr<Dataset> make_text_dataset(const TextOptions& options) {
  return std::make_shared<TextDataset>(options);
}

std::shared_ptr<Dataset> make_tensor_dataset(const TensorOptions& o) {
  if (o.shape.empty()) throw ConfigError("tensor dataset needs a shape");
  std::size_t n = 1;
  for (std::size_t d : o.shape) n *= d;
  if (n == 0) throw ConfigError("tensor dataset shape has a zero extent");
  std::vector<Payload> items;
  items.reserve(o.count);
  for (std::size_t i = 0; i < o.count; ++i) {
    SplitMix64 rng(hash_combine(o.seed, static_cast<std::uint64_t>(i)));
    Tensor t{std::vector<double>(n), o.shape};
    for (double& v : t.data) v = rng.uniform();
    items.emplace_back(std::move(t));
  }
  return std::make_shared<PayloadDataset>(std::move(items));
}

std::shared_ptr<Dataset> make_file_dataset(const std::vector<std::filesystem::path>& files) {
  std::vector<Payload> items;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open input " + file.string());
    std::ostringstream text;
    text << in.rdbuf();
    items.push_back(parse_payload(text.str()));
  }
  return std::make_shared<PayloadDataset>(std::move(items));
}

}  // namespace tracefault
