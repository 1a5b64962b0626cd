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

#include <array>
#include <string>
#include <vector>

#include "envanim/clip.hpp"
#include "envanim/tensor.hpp"

namespace envanim::sprites {

using Color = std::array<double, 3>;

struct BackgroundSpec {
    Color top{0.2, 0.3, 0.5};
    Color bottom{0.6, 0.6, 0.7};
    double dither = 0.01;  // amplitude of the seed-derived per-pixel texture
};

struct RectSpec {
    double x = 0, y = 0;  // top-left, pixels
    double w = 8, h = 8;
    Color color{0.5, 0.5, 0.5};
    double depth = 0.8;
};

enum class ObjectShape { Disc, Box };
enum class ObjectTrajectory { Held, Static, Tossed };

struct ObjectSpec {
    ObjectShape shape = ObjectShape::Disc;
    ObjectTrajectory trajectory = ObjectTrajectory::Held;
    Color color{0.9, 0.6, 0.2};
    double size = 2.5;          // disc radius or box half-extent
    double depth = 0.4;         // constant per clip
    double x = 32, y = 32;      // initial position (static / tossed)
    double vx = 0, vy = 0;      // toss velocity, px/frame
};

struct CharacterSpec {
    double torso_len = 12, arm_len = 9, leg_len = 10;
    double head_radius = 2.8, limb_radius = 1.3;
    double gait_freq = 0.08;  // gait cycles per frame
    double arm_swing = 0.6, leg_swing = 0.45, bob_amp = 0.5;  // radians / px
    double phase = 0.0;
    double start_x = 32, start_y = 34;  // pelvis at frame 0
    double vel_x = 0.6, vel_y = 0.0;    // px/frame
    double scale = 1.0;
    double base_depth = 0.45;
    Color color{0.8, 0.3, 0.3};
};

/// Full procedural description of one clip.
struct SceneSpec {
    int64_t width = 64, height = 64, frames = 16;
    BackgroundSpec background;
    std::vector<RectSpec> rects;
    ObjectSpec object;
    CharacterSpec character;
};

/// Randomized scene with all anchors guaranteed inside the frame.
SceneSpec sample_scene(Rng& rng, int64_t size = 64, int64_t frames = 16);

/// Deterministic render of a scene. The seed only drives the background
/// dither texture, so re-rendering a scaled variant keeps the same backdrop.
VideoClip generate_clip(const SceneSpec& spec, uint64_t seed);

/// Joint positions [J,3] for one frame (x, y, depth).
Tensor character_pose(const CharacterSpec& c, int64_t frame, int64_t width, int64_t height);

/// Scene re-rendered with character and object scaled by `scale` about
/// `anchor` (row, col). scale == 1 reproduces generate_clip(spec, seed) exactly.
SceneSpec scale_scene(const SceneSpec& spec, double scale, double anchor_row, double anchor_col);

/// JSON round-trip for manifests.
std::string spec_to_json(const SceneSpec& spec);
SceneSpec spec_from_json(const std::string& json_text);

}  // namespace envanim::sprites
