// Copyright 2026 The envanim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "envanim/clip.hpp"
#include "envanim/sprites.hpp"

namespace envanim {

/// One dataset entry: a clip shard directory plus its generator provenance.
///
/// Shard layout (all binary files little-endian, row-major):
///   frames.bin    float32 [N,3,H,W]
///   masks.bin     uint8   [2,N,H,W]   (character masks first, then object)
///   depth.bin     float32 [N,H,W]
///   skeleton.bin  float32 [N,J,3]     (x, y, depth; occluded joints all -1)
///   manifest.json shapes, dtypes, seed, and the scene spec echo
struct ClipRecord {
    std::string name;
    uint64_t seed = 0;
    std::string split;  // "train" or "val"
};

struct DatasetIndex {
    int64_t height = 0, width = 0, frames = 0;
    std::vector<ClipRecord> clips;
};

void write_clip_shard(const std::filesystem::path& dir, const VideoClip& clip,
                      const sprites::SceneSpec& spec, uint64_t seed);

struct LoadedClip {
    VideoClip clip;
    sprites::SceneSpec spec;
    uint64_t seed = 0;
};

LoadedClip read_clip_shard(const std::filesystem::path& dir);

void write_index(const std::filesystem::path& dataset_dir, const DatasetIndex& index);
DatasetIndex read_index(const std::filesystem::path& dataset_dir);

std::vector<ClipRecord> clips_with_split(const DatasetIndex& index, const std::string& split);

}  // namespace envanim
