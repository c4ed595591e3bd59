// Copyright 2026 The hyqut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

// Versioned binary checkpoints:
//
//   "HYQUTCKP"  u32 version
//   u64 len + config text, u64 len + vocabulary (UTF-8)
//   u64 step, u64 adam step counter, u64 tensor count
//   per tensor: u32 len + name, u32 rank, u64 dims..., float32 values
//   u64 FNV-1a hash of every preceding byte
//
// Integers and floats are little-endian. Adam moments are stored as tensors
// named "adam.m.<param>" and "adam.v.<param>".

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hyqut/config.hpp"
#include "hyqut/model.hpp"
#include "hyqut/train.hpp"

namespace hyqut::checkpoint {

inline constexpr std::uint32_t kVersion = 1;

struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<float> values;
};

struct Checkpoint {
  std::string config_text;
  std::string vocabulary;
  std::uint64_t step = 0;
  std::uint64_t adam_t = 0;
  std::map<std::string, Tensor> tensors;
};

/// Captures model parameters (and optimizer moments when state.t > 0).
Checkpoint capture(Model& model, const train::AdamState& state, const Config& config,
                   const std::string& vocabulary, std::uint64_t step);

/// Writes atomically (temporary file, then rename). Raises IoError.
void save(const Checkpoint& ckpt, const std::filesystem::path& path);
/// Raises IoError for unreadable, truncated, corrupt or wrong-version files.
Checkpoint load(const std::filesystem::path& path);

/// Copies tensors into the model and optimizer. The embedded config must
/// match `current` on every architecture field, else ConfigError listing
/// each differing field. Missing tensors or shape mismatches raise IoError.
void restore(const Checkpoint& ckpt, const Config& current, Model& model,
             train::AdamState& state);

}  // namespace hyqut::checkpoint
