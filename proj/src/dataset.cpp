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

#include "envanim/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace envanim {

namespace {

using nlohmann::json;

void write_f32(const std::filesystem::path& path, const double* data, int64_t count) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for write: " + path.string());
    std::vector<float> buf(static_cast<size_t>(count));
    for (int64_t i = 0; i < count; ++i) buf[static_cast<size_t>(i)] = static_cast<float>(data[i]);
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(count * 4));
}

std::vector<float> read_f32(const std::filesystem::path& path, int64_t count) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for read: " + path.string());
    std::vector<float> buf(static_cast<size_t>(count));
    f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count * 4));
    if (f.gcount() != count * 4) throw std::runtime_error("short read: " + path.string());
    return buf;
}

}  // namespace

void write_clip_shard(const std::filesystem::path& dir, const VideoClip& clip,
                      const sprites::SceneSpec& spec, uint64_t seed) {
    std::filesystem::create_directories(dir);
    const int64_t n = clip.n(), h = clip.height(), w = clip.width();
    write_f32(dir / "frames.bin", clip.frames.data(), clip.frames.size());
    write_f32(dir / "depth.bin", clip.depth.data(), clip.depth.size());
    write_f32(dir / "skeleton.bin", clip.skeleton.data(), clip.skeleton.size());
    {
        std::ofstream f(dir / "masks.bin", std::ios::binary);
        if (!f) throw std::runtime_error("cannot open for write: " + (dir / "masks.bin").string());
        for (const auto& m : clip.character_masks)
            f.write(reinterpret_cast<const char*>(m.v.data()), static_cast<std::streamsize>(m.v.size()));
        for (const auto& m : clip.object_masks)
            f.write(reinterpret_cast<const char*>(m.v.data()), static_cast<std::streamsize>(m.v.size()));
    }
    json manifest;
    manifest["version"] = 1;
    manifest["seed"] = seed;
    manifest["shapes"] = {{"frames", {n, 3, h, w}},
                          {"masks", {2, n, h, w}},
                          {"depth", {n, h, w}},
                          {"skeleton", {n, kJointCount, 3}}};
    manifest["dtypes"] = {{"frames", "float32"},
                          {"masks", "uint8"},
                          {"depth", "float32"},
                          {"skeleton", "float32"}};
    manifest["spec"] = json::parse(sprites::spec_to_json(spec));
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
}

LoadedClip read_clip_shard(const std::filesystem::path& dir) {
    std::ifstream mf(dir / "manifest.json");
    if (!mf) throw std::runtime_error("missing manifest: " + dir.string());
    json manifest = json::parse(mf);
    auto fs = manifest.at("shapes").at("frames");
    const int64_t n = fs.at(0), h = fs.at(2), w = fs.at(3);

    LoadedClip out;
    out.seed = manifest.at("seed");
    out.spec = sprites::spec_from_json(manifest.at("spec").dump());

    VideoClip& clip = out.clip;
    clip.frames = Tensor({n, 3, h, w});
    clip.depth = Tensor({n, h, w});
    clip.skeleton = Tensor({n, kJointCount, 3});
    auto frames = read_f32(dir / "frames.bin", clip.frames.size());
    auto depth = read_f32(dir / "depth.bin", clip.depth.size());
    auto skel = read_f32(dir / "skeleton.bin", clip.skeleton.size());
    for (int64_t i = 0; i < clip.frames.size(); ++i) clip.frames[i] = frames[static_cast<size_t>(i)];
    for (int64_t i = 0; i < clip.depth.size(); ++i) clip.depth[i] = depth[static_cast<size_t>(i)];
    for (int64_t i = 0; i < clip.skeleton.size(); ++i) clip.skeleton[i] = skel[static_cast<size_t>(i)];

    std::ifstream f(dir / "masks.bin", std::ios::binary);
    if (!f) throw std::runtime_error("missing masks.bin: " + dir.string());
    auto read_masks = [&](std::vector<ByteGrid>& dst) {
        dst.assign(static_cast<size_t>(n), ByteGrid(h, w));
        for (auto& m : dst) {
            f.read(reinterpret_cast<char*>(m.v.data()), static_cast<std::streamsize>(m.v.size()));
            if (f.gcount() != static_cast<std::streamsize>(m.v.size()))
                throw std::runtime_error("short masks.bin: " + dir.string());
        }
    };
    read_masks(clip.character_masks);
    read_masks(clip.object_masks);
    return out;
}

void write_index(const std::filesystem::path& dataset_dir, const DatasetIndex& index) {
    json j;
    j["height"] = index.height;
    j["width"] = index.width;
    j["frames"] = index.frames;
    j["clips"] = json::array();
    for (const auto& c : index.clips)
        j["clips"].push_back({{"name", c.name}, {"seed", c.seed}, {"split", c.split}});
    std::ofstream f(dataset_dir / "index.json");
    if (!f) throw std::runtime_error("cannot write index: " + dataset_dir.string());
    f << j.dump(2) << "\n";
}

DatasetIndex read_index(const std::filesystem::path& dataset_dir) {
    std::ifstream f(dataset_dir / "index.json");
    if (!f) throw std::runtime_error("missing index.json in " + dataset_dir.string());
    json j = json::parse(f);
    DatasetIndex index;
    index.height = j.at("height");
    index.width = j.at("width");
    index.frames = j.at("frames");
    for (const auto& c : j.at("clips"))
        index.clips.push_back(ClipRecord{c.at("name"), c.at("seed"), c.at("split")});
    return index;
}

std::vector<ClipRecord> clips_with_split(const DatasetIndex& index, const std::string& split) {
    std::vector<ClipRecord> out;
    for (const auto& c : index.clips)
        if (c.split == split) out.push_back(c);
    return out;
}

}  // namespace envanim
