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

#include "envanim/sprites.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace envanim {

const std::vector<std::pair<int, int>>& bone_topology() {
    static const std::vector<std::pair<int, int>> bones = {
        {kHead, kNeck},   {kNeck, kTorsoMid},  {kTorsoMid, kPelvis}, {kNeck, kLeftHand},
        {kNeck, kRightHand}, {kPelvis, kLeftFoot}, {kPelvis, kRightFoot},
    };
    return bones;
}

void validate_clip(const VideoClip& clip) {
    const int64_t n = clip.n(), h = clip.height(), w = clip.width();
    auto fail = [](const std::string& m) { throw std::runtime_error("invalid clip: " + m); };
    if (clip.frames.rank() != 4 || clip.frames.dim(1) != 3) fail("frames not [N,3,H,W]");
    if (static_cast<int64_t>(clip.character_masks.size()) != n) fail("character mask count");
    if (static_cast<int64_t>(clip.object_masks.size()) != n) fail("object mask count");
    if (clip.skeleton.rank() != 3 || clip.skeleton.dim(0) != n || clip.skeleton.dim(1) != kJointCount ||
        clip.skeleton.dim(2) != 3)
        fail("skeleton not [N,J,3]");
    if (clip.depth.rank() != 3 || clip.depth.dim(0) != n || clip.depth.dim(1) != h || clip.depth.dim(2) != w)
        fail("depth not [N,H,W]");
    for (int64_t i = 0; i < clip.frames.size(); ++i)
        if (clip.frames[i] < 0.0 || clip.frames[i] > 1.0) fail("frame value outside [0,1]");
    for (int64_t f = 0; f < n; ++f) {
        const auto& cm = clip.character_masks[static_cast<size_t>(f)];
        const auto& om = clip.object_masks[static_cast<size_t>(f)];
        if (cm.h != h || cm.w != w || om.h != h || om.w != w) fail("mask shape");
        for (uint8_t v : cm.v)
            if (v > 1) fail("character mask not binary");
        for (uint8_t v : om.v)
            if (v > 1) fail("object mask not binary");
        for (int64_t j = 0; j < kJointCount; ++j) {
            double x = clip.skeleton.at(f, j, 0), y = clip.skeleton.at(f, j, 1),
                   d = clip.skeleton.at(f, j, 2);
            if (joint_occluded(x, y, d)) continue;
            if (x >= static_cast<double>(w) || y >= static_cast<double>(h)) fail("joint out of frame");
            if (d > 1.0) fail("joint depth outside [0,1]");
        }
        for (int64_t i = 0; i < h * w; ++i)
            if (clip.depth[f * h * w + i] < 0.0 || clip.depth[f * h * w + i] > 1.0)
                fail("depth outside [0,1]");
    }
}

VideoClip slice_clip(const VideoClip& clip, int64_t first, int64_t count) {
    if (first < 0 || count < 1 || first + count > clip.n())
        throw std::invalid_argument("slice_clip: range out of bounds");
    const int64_t h = clip.height(), w = clip.width();
    VideoClip out;
    out.frames = Tensor({count, 3, h, w});
    out.depth = Tensor({count, h, w});
    out.skeleton = Tensor({count, kJointCount, 3});
    std::copy_n(clip.frames.data() + first * 3 * h * w, count * 3 * h * w, out.frames.data());
    std::copy_n(clip.depth.data() + first * h * w, count * h * w, out.depth.data());
    std::copy_n(clip.skeleton.data() + first * kJointCount * 3, count * kJointCount * 3,
                out.skeleton.data());
    for (int64_t f = 0; f < count; ++f) {
        out.character_masks.push_back(clip.character_masks[static_cast<size_t>(first + f)]);
        out.object_masks.push_back(clip.object_masks[static_cast<size_t>(first + f)]);
        if (!clip.region_basis.empty())
            out.region_basis.push_back(clip.region_basis[static_cast<size_t>(first + f)]);
    }
    out.clipped = clip.clipped;
    return out;
}

}  // namespace envanim

namespace envanim::sprites {

namespace {

constexpr double kPi = 3.14159265358979323846;

double dist_to_segment(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double qx = ax + t * dx, qy = ay + t * dy;
    return std::hypot(px - qx, py - qy);
}

// Projection parameter along the segment, for per-pixel depth interpolation.
double segment_t(double px, double py, double ax, double ay, double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    if (len2 <= 0) return 0.0;
    return std::clamp(((px - ax) * dx + (py - ay) * dy) / len2, 0.0, 1.0);
}

struct Painter {
    int64_t h, w;
    Tensor* frame;     // [3,H,W] view offset handled by caller pointers
    double* depth;     // H*W
    double* rgb[3];

    void put(int64_t r, int64_t c, const Color& col, double d) {
        if (d < depth[r * w + c]) {
            depth[r * w + c] = d;
            for (int k = 0; k < 3; ++k) rgb[k][r * w + c] = col[static_cast<size_t>(k)];
        }
    }
};

Color shade(const Color& c, double f) {
    return Color{std::clamp(c[0] * f, 0.0, 1.0), std::clamp(c[1] * f, 0.0, 1.0),
                 std::clamp(c[2] * f, 0.0, 1.0)};
}

// Per-bone depth offsets: right-side limbs slightly nearer, left slightly
// farther, so structured depth carries limb ordering information.
double joint_depth_offset(int joint) {
    switch (joint) {
        case kLeftHand:
        case kLeftFoot:
            return +0.04;
        case kRightHand:
        case kRightFoot:
            return -0.04;
        case kHead:
            return -0.01;
        default:
            return 0.0;
    }
}

double object_x(const ObjectSpec& o, const Tensor& pose, int64_t t) {
    switch (o.trajectory) {
        case ObjectTrajectory::Held:
            return pose.at(kRightHand, 0);
        case ObjectTrajectory::Static:
            return o.x;
        case ObjectTrajectory::Tossed:
            return o.x + o.vx * static_cast<double>(t);
    }
    return o.x;
}

double object_y(const ObjectSpec& o, const Tensor& pose, int64_t t) {
    constexpr double kGravity = 0.12;  // px/frame^2
    switch (o.trajectory) {
        case ObjectTrajectory::Held:
            return pose.at(kRightHand, 1);
        case ObjectTrajectory::Static:
            return o.y;
        case ObjectTrajectory::Tossed:
            return o.y + o.vy * static_cast<double>(t) + 0.5 * kGravity * t * static_cast<double>(t);
    }
    return o.y;
}

}  // namespace

Tensor character_pose(const CharacterSpec& c, int64_t frame, int64_t width, int64_t height) {
    Tensor pose({kJointCount, 3});
    const double s = c.scale;
    const double ph = c.phase + 2.0 * kPi * c.gait_freq * static_cast<double>(frame);
    double px = c.start_x + c.vel_x * static_cast<double>(frame);
    double py = c.start_y + c.vel_y * static_cast<double>(frame) + c.bob_amp * s * std::sin(2.0 * ph);

    // Keep the full body inside the frame: clamp the pelvis into a safe box.
    const double reach_side = std::max(c.arm_len, c.leg_len) * s + c.limb_radius * s + 1.0;
    const double reach_up = (c.torso_len + c.torso_len * 0.45) * s + c.head_radius * s + 1.0;
    const double reach_down = c.leg_len * s + c.limb_radius * s + 1.0;
    px = std::clamp(px, reach_side, static_cast<double>(width - 1) - reach_side);
    py = std::clamp(py, reach_up, static_cast<double>(height - 1) - reach_down);

    const double nx = px, ny = py - c.torso_len * s;
    const double arm_l = c.arm_swing * std::sin(ph) - 0.35;
    const double arm_r = c.arm_swing * std::sin(ph + kPi) + 0.35;
    const double leg_l = c.leg_swing * std::sin(ph + kPi);
    const double leg_r = c.leg_swing * std::sin(ph);

    auto set = [&](int j, double x, double y) {
        pose.at(j, 0) = x;
        pose.at(j, 1) = y;
        pose.at(j, 2) = std::clamp(c.base_depth + joint_depth_offset(j), 0.0, 1.0);
    };
    set(kPelvis, px, py);
    set(kNeck, nx, ny);
    set(kTorsoMid, (px + nx) / 2.0, (py + ny) / 2.0);
    set(kHead, nx, ny - c.torso_len * 0.45 * s);
    set(kLeftHand, nx + c.arm_len * s * std::sin(arm_l), ny + c.arm_len * s * std::cos(arm_l));
    set(kRightHand, nx + c.arm_len * s * std::sin(arm_r), ny + c.arm_len * s * std::cos(arm_r));
    set(kLeftFoot, px + c.leg_len * s * std::sin(leg_l), py + c.leg_len * s * std::cos(leg_l));
    set(kRightFoot, px + c.leg_len * s * std::sin(leg_r), py + c.leg_len * s * std::cos(leg_r));
    return pose;
}

VideoClip generate_clip(const SceneSpec& spec, uint64_t seed) {
    const int64_t n = spec.frames, h = spec.height, w = spec.width;
    if (n < 1 || h < 8 || w < 8) throw std::invalid_argument("generate_clip: degenerate scene dims");
    for (const auto& r : spec.rects)
        if (r.depth < 0.0 || r.depth > 1.0) throw std::invalid_argument("generate_clip: rect depth outside [0,1]");
    if (spec.object.depth < 0.0 || spec.object.depth > 1.0 || spec.character.base_depth < 0.0 ||
        spec.character.base_depth > 1.0)
        throw std::invalid_argument("generate_clip: depth outside [0,1]");

    VideoClip clip;
    clip.frames = Tensor({n, 3, h, w});
    clip.depth = Tensor({n, h, w}, 1.0);
    clip.skeleton = Tensor({n, kJointCount, 3});
    clip.character_masks.assign(static_cast<size_t>(n), ByteGrid(h, w));
    clip.object_masks.assign(static_cast<size_t>(n), ByteGrid(h, w));

    // Seed-derived static background texture, shared by all frames.
    Tensor dither({h, w});
    Rng drng = Rng::stream(seed, /*purpose=*/0xD17);
    for (int64_t i = 0; i < dither.size(); ++i)
        dither[i] = (drng.uniform() - 0.5) * 2.0 * spec.background.dither;

    for (int64_t t = 0; t < n; ++t) {
        double* rgb0 = clip.frames.data() + (t * 3 + 0) * h * w;
        double* rgb1 = clip.frames.data() + (t * 3 + 1) * h * w;
        double* rgb2 = clip.frames.data() + (t * 3 + 2) * h * w;
        double* dep = clip.depth.data() + t * h * w;
        Painter paint{h, w, nullptr, dep, {rgb0, rgb1, rgb2}};

        // Background gradient (depth 1.0, painted directly).
        for (int64_t r = 0; r < h; ++r) {
            double a = h > 1 ? static_cast<double>(r) / static_cast<double>(h - 1) : 0.0;
            for (int64_t c = 0; c < w; ++c) {
                double d = dither.at(r, c);
                rgb0[r * w + c] = std::clamp(spec.background.top[0] * (1 - a) + spec.background.bottom[0] * a + d, 0.0, 1.0);
                rgb1[r * w + c] = std::clamp(spec.background.top[1] * (1 - a) + spec.background.bottom[1] * a + d, 0.0, 1.0);
                rgb2[r * w + c] = std::clamp(spec.background.top[2] * (1 - a) + spec.background.bottom[2] * a + d, 0.0, 1.0);
            }
        }

        for (const auto& rect : spec.rects) {
            int64_t r0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(rect.y)));
            int64_t r1 = std::min<int64_t>(h, static_cast<int64_t>(std::ceil(rect.y + rect.h)));
            int64_t c0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(rect.x)));
            int64_t c1 = std::min<int64_t>(w, static_cast<int64_t>(std::ceil(rect.x + rect.w)));
            for (int64_t r = r0; r < r1; ++r)
                for (int64_t c = c0; c < c1; ++c) paint.put(r, c, rect.color, rect.depth);
        }

        // Character: capsule bones plus a head disc; masks record the raster
        // footprint regardless of the z-test outcome.
        Tensor pose = character_pose(spec.character, t, w, h);
        for (int64_t j = 0; j < kJointCount; ++j)
            for (int64_t k = 0; k < 3; ++k) clip.skeleton.at(t, j, k) = pose.at(j, k);
        auto& cmask = clip.character_masks[static_cast<size_t>(t)];
        const double limb_r = std::max(0.9, spec.character.limb_radius * spec.character.scale);
        const double head_r = spec.character.head_radius * spec.character.scale;
        const auto& bones = bone_topology();
        for (size_t b = 0; b < bones.size(); ++b) {
            auto [ja, jb] = bones[b];
            double ax = pose.at(ja, 0), ay = pose.at(ja, 1), az = pose.at(ja, 2);
            double bx = pose.at(jb, 0), by = pose.at(jb, 1), bz = pose.at(jb, 2);
            Color col = shade(spec.character.color, b == 1 || b == 2 ? 1.0 : 0.82 + 0.06 * (b % 3));
            int64_t r0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::min(ay, by) - limb_r - 1)));
            int64_t r1 = std::min<int64_t>(h, static_cast<int64_t>(std::ceil(std::max(ay, by) + limb_r + 1)));
            int64_t c0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(std::min(ax, bx) - limb_r - 1)));
            int64_t c1 = std::min<int64_t>(w, static_cast<int64_t>(std::ceil(std::max(ax, bx) + limb_r + 1)));
            for (int64_t r = r0; r < r1; ++r)
                for (int64_t c = c0; c < c1; ++c) {
                    double pxc = static_cast<double>(c) + 0.5, pyc = static_cast<double>(r) + 0.5;
                    if (dist_to_segment(pxc, pyc, ax, ay, bx, by) <= limb_r) {
                        cmask.at(r, c) = 1;
                        double tt = segment_t(pxc, pyc, ax, ay, bx, by);
                        paint.put(r, c, col, az + tt * (bz - az));
                    }
                }
        }
        {
            double hx = pose.at(kHead, 0), hy = pose.at(kHead, 1), hz = pose.at(kHead, 2);
            Color col = shade(spec.character.color, 1.25);
            int64_t r0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(hy - head_r - 1)));
            int64_t r1 = std::min<int64_t>(h, static_cast<int64_t>(std::ceil(hy + head_r + 1)));
            int64_t c0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(hx - head_r - 1)));
            int64_t c1 = std::min<int64_t>(w, static_cast<int64_t>(std::ceil(hx + head_r + 1)));
            for (int64_t r = r0; r < r1; ++r)
                for (int64_t c = c0; c < c1; ++c)
                    if (std::hypot(static_cast<double>(c) + 0.5 - hx, static_cast<double>(r) + 0.5 - hy) <= head_r) {
                        cmask.at(r, c) = 1;
                        paint.put(r, c, col, hz);
                    }
        }

        // Object.
        auto& omask = clip.object_masks[static_cast<size_t>(t)];
        const auto& obj = spec.object;
        double ox = std::clamp(object_x(obj, pose, t), obj.size, static_cast<double>(w - 1) - obj.size);
        double oy = std::clamp(object_y(obj, pose, t), obj.size, static_cast<double>(h - 1) - obj.size);
        int64_t r0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(oy - obj.size - 1)));
        int64_t r1 = std::min<int64_t>(h, static_cast<int64_t>(std::ceil(oy + obj.size + 1)));
        int64_t c0 = std::max<int64_t>(0, static_cast<int64_t>(std::floor(ox - obj.size - 1)));
        int64_t c1 = std::min<int64_t>(w, static_cast<int64_t>(std::ceil(ox + obj.size + 1)));
        for (int64_t r = r0; r < r1; ++r)
            for (int64_t c = c0; c < c1; ++c) {
                double pxc = static_cast<double>(c) + 0.5, pyc = static_cast<double>(r) + 0.5;
                bool inside = obj.shape == ObjectShape::Disc
                                  ? std::hypot(pxc - ox, pyc - oy) <= obj.size
                                  : std::abs(pxc - ox) <= obj.size && std::abs(pyc - oy) <= obj.size;
                if (inside) {
                    omask.at(r, c) = 1;
                    paint.put(r, c, obj.color, obj.depth);
                }
            }
    }
    return clip;
}

SceneSpec scale_scene(const SceneSpec& spec, double scale, double anchor_row, double anchor_col) {
    SceneSpec out = spec;
    out.character.scale = spec.character.scale * scale;
    out.character.start_x = anchor_col + (spec.character.start_x - anchor_col) * scale;
    out.character.start_y = anchor_row + (spec.character.start_y - anchor_row) * scale;
    out.character.vel_x = spec.character.vel_x * scale;
    out.character.vel_y = spec.character.vel_y * scale;
    out.character.bob_amp = spec.character.bob_amp;  // scaled via character.scale
    out.object.size = spec.object.size * scale;
    out.object.x = anchor_col + (spec.object.x - anchor_col) * scale;
    out.object.y = anchor_row + (spec.object.y - anchor_row) * scale;
    out.object.vx = spec.object.vx * scale;
    out.object.vy = spec.object.vy * scale;
    return out;
}

SceneSpec sample_scene(Rng& rng, int64_t size, int64_t frames) {
    const double sf = static_cast<double>(size) / 64.0;
    SceneSpec s;
    s.width = s.height = size;
    s.frames = frames;

    auto color = [&rng]() { return Color{rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92)}; };
    s.background.top = color();
    s.background.bottom = color();
    s.background.dither = 0.012;

    int64_t nrects = rng.uniform_int(0, 3);
    for (int64_t i = 0; i < nrects; ++i) {
        RectSpec r;
        r.w = rng.uniform(6, 24) * sf;
        r.h = rng.uniform(6, 24) * sf;
        r.x = rng.uniform(0, static_cast<double>(size) - r.w);
        r.y = rng.uniform(0, static_cast<double>(size) - r.h);
        r.color = color();
        r.depth = rng.uniform(0.7, 0.95);
        s.rects.push_back(r);
    }

    auto& c = s.character;
    c.torso_len = rng.uniform(10, 14) * sf;
    c.arm_len = rng.uniform(7, 10) * sf;
    c.leg_len = rng.uniform(8, 12) * sf;
    c.head_radius = rng.uniform(2.2, 3.2) * sf;
    c.limb_radius = std::max(1.0, rng.uniform(1.1, 1.6) * sf);
    c.gait_freq = rng.uniform(0.05, 0.12);
    c.arm_swing = rng.uniform(0.3, 0.8);
    c.leg_swing = rng.uniform(0.25, 0.6);
    c.bob_amp = rng.uniform(0.3, 0.8) * sf;
    c.phase = rng.uniform(0, 2 * 3.14159265358979323846);
    c.scale = rng.uniform(0.8, 1.2);
    c.base_depth = rng.uniform(0.35, 0.55);
    c.color = color();
    c.vel_x = rng.uniform(-1.2, 1.2) * sf;
    c.vel_y = rng.uniform(-0.3, 0.3) * sf;
    c.start_x = rng.uniform(0.3, 0.7) * static_cast<double>(size);
    c.start_y = rng.uniform(0.45, 0.65) * static_cast<double>(size);

    auto& o = s.object;
    o.shape = rng.uniform() < 0.5 ? ObjectShape::Disc : ObjectShape::Box;
    int64_t traj = rng.uniform_int(0, 2);
    o.trajectory = traj == 0 ? ObjectTrajectory::Held
                             : (traj == 1 ? ObjectTrajectory::Static : ObjectTrajectory::Tossed);
    o.color = color();
    o.size = rng.uniform(2.0, 3.8) * sf;
    bool in_front = rng.uniform() < 0.5;
    o.depth = std::clamp(c.base_depth + (in_front ? -0.1 : 0.1), 0.05, 0.68);
    o.x = rng.uniform(0.2, 0.8) * static_cast<double>(size);
    o.y = rng.uniform(0.2, 0.8) * static_cast<double>(size);
    o.vx = rng.uniform(-0.8, 0.8) * sf;
    o.vy = rng.uniform(-1.2, -0.3) * sf;
    return s;
}

namespace {

using nlohmann::json;

json color_json(const Color& c) { return json::array({c[0], c[1], c[2]}); }
Color color_from(const json& j) { return Color{j.at(0), j.at(1), j.at(2)}; }

}  // namespace

std::string spec_to_json(const SceneSpec& s) {
    json j;
    j["width"] = s.width;
    j["height"] = s.height;
    j["frames"] = s.frames;
    j["background"] = {{"top", color_json(s.background.top)},
                       {"bottom", color_json(s.background.bottom)},
                       {"dither", s.background.dither}};
    j["rects"] = json::array();
    for (const auto& r : s.rects)
        j["rects"].push_back({{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h},
                              {"color", color_json(r.color)}, {"depth", r.depth}});
    const auto& o = s.object;
    j["object"] = {{"shape", o.shape == ObjectShape::Disc ? "disc" : "box"},
                   {"trajectory", o.trajectory == ObjectTrajectory::Held
                                      ? "held"
                                      : (o.trajectory == ObjectTrajectory::Static ? "static" : "tossed")},
                   {"color", color_json(o.color)}, {"size", o.size}, {"depth", o.depth},
                   {"x", o.x}, {"y", o.y}, {"vx", o.vx}, {"vy", o.vy}};
    const auto& c = s.character;
    j["character"] = {{"torso_len", c.torso_len}, {"arm_len", c.arm_len}, {"leg_len", c.leg_len},
                      {"head_radius", c.head_radius}, {"limb_radius", c.limb_radius},
                      {"gait_freq", c.gait_freq}, {"arm_swing", c.arm_swing},
                      {"leg_swing", c.leg_swing}, {"bob_amp", c.bob_amp}, {"phase", c.phase},
                      {"start_x", c.start_x}, {"start_y", c.start_y}, {"vel_x", c.vel_x},
                      {"vel_y", c.vel_y}, {"scale", c.scale}, {"base_depth", c.base_depth},
                      {"color", color_json(c.color)}};
    return j.dump();
}

SceneSpec spec_from_json(const std::string& text) {
    json j = json::parse(text);
    SceneSpec s;
    s.width = j.at("width");
    s.height = j.at("height");
    s.frames = j.at("frames");
    s.background.top = color_from(j.at("background").at("top"));
    s.background.bottom = color_from(j.at("background").at("bottom"));
    s.background.dither = j.at("background").at("dither");
    for (const auto& r : j.at("rects")) {
        RectSpec rs;
        rs.x = r.at("x");
        rs.y = r.at("y");
        rs.w = r.at("w");
        rs.h = r.at("h");
        rs.color = color_from(r.at("color"));
        rs.depth = r.at("depth");
        s.rects.push_back(rs);
    }
    const auto& o = j.at("object");
    s.object.shape = o.at("shape") == "disc" ? ObjectShape::Disc : ObjectShape::Box;
    std::string traj = o.at("trajectory");
    s.object.trajectory = traj == "held" ? ObjectTrajectory::Held
                                         : (traj == "static" ? ObjectTrajectory::Static
                                                             : ObjectTrajectory::Tossed);
    s.object.color = color_from(o.at("color"));
    s.object.size = o.at("size");
    s.object.depth = o.at("depth");
    s.object.x = o.at("x");
    s.object.y = o.at("y");
    s.object.vx = o.at("vx");
    s.object.vy = o.at("vy");
    const auto& c = j.at("character");
    s.character.torso_len = c.at("torso_len");
    s.character.arm_len = c.at("arm_len");
    s.character.leg_len = c.at("leg_len");
    s.character.head_radius = c.at("head_radius");
    s.character.limb_radius = c.at("limb_radius");
    s.character.gait_freq = c.at("gait_freq");
    s.character.arm_swing = c.at("arm_swing");
    s.character.leg_swing = c.at("leg_swing");
    s.character.bob_amp = c.at("bob_amp");
    s.character.phase = c.at("phase");
    s.character.start_x = c.at("start_x");
    s.character.start_y = c.at("start_y");
    s.character.vel_x = c.at("vel_x");
    s.character.vel_y = c.at("vel_y");
    s.character.scale = c.at("scale");
    s.character.base_depth = c.at("base_depth");
    s.character.color = color_from(c.at("color"));
    return s;
}

}  // namespace envanim::sprites
