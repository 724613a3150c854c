#include "plvton/fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "plvton/error.hpp"
#include "plvton/io.hpp"
#include "plvton/toynet.hpp"

namespace plvton {

namespace {

using Rgb = std::array<double, 3>;

struct Body {
  double cx = 0.0;
  double head_cy = 0.0;
  double head_r = 0.0;
  double shoulder_y = 0.0;
  double waist_y = 0.0;
  double top_hw = 0.0;     // torso half-width at the shoulders
  double bottom_hw = 0.0;  // and at the waist
  double arm_w = 0.0;
  double arm_len = 0.0;
  double sleeve_len = 0.0;
  double feet_y = 0.0;
};

double torso_half_width(const Body& b, double y) {
  const double t = (y - b.shoulder_y) / std::max(1.0, b.waist_y - b.shoulder_y);
  return b.top_hw + (b.bottom_hw - b.top_hw) * std::clamp(t, 0.0, 1.0);
}

int classify(const Body& b, double x, double y) {
  const double dx = x - b.cx;
  const double hy = y - b.head_cy;
  if (dx * dx + hy * hy <= (b.head_r + 1.5) * (b.head_r + 1.5) && hy < -0.25 * b.head_r) {
    return 1;
  }
  if (dx * dx + hy * hy <= b.head_r * b.head_r) return 2;
  if (y > b.head_cy && y < b.shoulder_y && std::abs(dx) <= 0.4 * b.head_r) return 2;
  if (y >= b.shoulder_y && y <= b.waist_y) {
    const double hw = torso_half_width(b, y);
    if (std::abs(dx) <= hw) return 3;
    const double arm_top = b.shoulder_y + 1.0;
    if (y >= arm_top && y <= arm_top + b.arm_len && std::abs(dx) <= b.top_hw + b.arm_w &&
        std::abs(dx) > b.top_hw) {
      if (y <= arm_top + b.sleeve_len) return 3;
      return dx < 0 ? 4 : 5;
    }
  }
  if (y > b.waist_y && y <= b.feet_y && std::abs(dx) <= b.bottom_hw) {
    // Two legs separated by a small gap.
    if (y > b.waist_y + 0.3 * (b.feet_y - b.waist_y) && std::abs(dx) < 1.0) return 0;
    return 6;
  }
  return 0;
}

Rgb jitter_color(CounterRng& rng, Rgb base, double amount) {
  for (double& v : base) v = std::clamp(v + rng.uniform(-amount, amount), 0.0, 1.0);
  return base;
}

// Smooth two-tone stripe pattern; phase and frequency are per-garment.
Rgb garment_color(const Rgb& a, const Rgb& b, double freq, double phase, double x, double y) {
  const double t = 0.5 + 0.5 * std::sin(freq * (x + 0.5 * y) + phase);
  return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t, a[2] + (b[2] - a[2]) * t};
}

std::vector<Keypoint> body_keypoints(const Body& b, int height, int width) {
  const double arm_x = b.top_hw + 0.5 * b.arm_w;
  const double leg_x = 0.5 * b.bottom_hw;
  const double elbow_y = b.shoulder_y + 1.0 + 0.5 * b.arm_len;
  const double wrist_y = b.shoulder_y + 1.0 + b.arm_len;
  const double knee_y = 0.5 * (b.waist_y + b.feet_y);
  const double eye_dy = -0.2 * b.head_r;
  const double eye_dx = 0.35 * b.head_r;
  const std::array<std::pair<double, double>, kKeypointCount> xy = {{
      {b.cx, b.head_cy + 0.2 * b.head_r},         // nose
      {b.cx, b.shoulder_y},                       // neck
      {b.cx - b.top_hw, b.shoulder_y},            // right shoulder
      {b.cx - arm_x, elbow_y},                    // right elbow
      {b.cx - arm_x, wrist_y},                    // right wrist
      {b.cx + b.top_hw, b.shoulder_y},            // left shoulder
      {b.cx + arm_x, elbow_y},                    // left elbow
      {b.cx + arm_x, wrist_y},                    // left wrist
      {b.cx - leg_x, b.waist_y},                  // right hip
      {b.cx - leg_x, knee_y},                     // right knee
      {b.cx - leg_x, b.feet_y},                   // right ankle
      {b.cx + leg_x, b.waist_y},                  // left hip
      {b.cx + leg_x, knee_y},                     // left knee
      {b.cx + leg_x, b.feet_y},                   // left ankle
      {b.cx - eye_dx, b.head_cy + eye_dy},        // right eye
      {b.cx + eye_dx, b.head_cy + eye_dy},        // left eye
      {b.cx - b.head_r, b.head_cy},               // right ear
      {b.cx + b.head_r, b.head_cy},               // left ear
  }};
  std::vector<Keypoint> points;
  for (int i = 0; i < kKeypointCount; ++i) {
    const auto [x, y] = xy[static_cast<std::size_t>(i)];
    points.push_back({i, std::clamp(x, 0.0, width - 1.0), std::clamp(y, 0.0, height - 1.0)});
  }
  return points;
}

}  // namespace

FixturePair make_fixture(std::uint64_t seed, int height, int width) {
  if (height < 32 || width < 24) {
    throw ParameterError("make_fixture: raster must be at least 32x24");
  }
  CounterRng rng(seed, "fixture");
  const double sy = height / 96.0;
  const double sx = width / 64.0;

  Body b;
  b.cx = width * (0.5 + rng.uniform(-0.06, 0.06));
  b.head_r = rng.uniform(6.0, 8.0) * std::min(sx, sy);
  b.head_cy = rng.uniform(12.0, 15.0) * sy;
  b.shoulder_y = b.head_cy + b.head_r + rng.uniform(2.0, 4.0) * sy;
  b.waist_y = b.shoulder_y + rng.uniform(26.0, 34.0) * sy;
  b.top_hw = rng.uniform(12.0, 15.0) * sx;
  b.bottom_hw = b.top_hw - rng.uniform(0.0, 3.0) * sx;
  b.arm_w = rng.uniform(4.0, 6.0) * sx;
  b.arm_len = rng.uniform(22.0, 28.0) * sy;
  b.sleeve_len = rng.uniform(5.0, 10.0) * sy;
  b.feet_y = std::min(height - 2.0, b.waist_y + rng.uniform(30.0, 40.0) * sy);

  const Rgb skin = jitter_color(rng, {0.92, 0.72, 0.58}, 0.06);
  const Rgb hair = jitter_color(rng, {0.18, 0.12, 0.08}, 0.08);
  const Rgb shirt_a = jitter_color(rng, {0.5, 0.5, 0.5}, 0.45);
  const Rgb shirt_b = jitter_color(rng, shirt_a, 0.25);
  const Rgb pants = jitter_color(rng, {0.22, 0.26, 0.45}, 0.1);
  const double shirt_freq = rng.uniform(0.25, 0.8);
  const double shirt_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double bg_level = rng.uniform(0.8, 0.92);

  FixturePair pair;
  pair.person = ImageTensor(3, height, width);
  pair.parsing = ParsingMap(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int cls = classify(b, x, y);
      pair.parsing.set(y, x, static_cast<std::uint8_t>(cls));
      Rgb c{};
      switch (cls) {
        case 1: c = hair; break;
        case 2:
        case 4:
        case 5: c = skin; break;
        case 3: c = garment_color(shirt_a, shirt_b, shirt_freq, shirt_phase, x, y); break;
        case 6: c = pants; break;
        default: {
          const double g = bg_level - 0.08 * y / height;
          c = {g, g, g * 0.97};
        }
      }
      for (int k = 0; k < 3; ++k) pair.person(k, y, x) = c[static_cast<std::size_t>(k)];
    }
  }
  pair.keypoints = body_keypoints(b, height, width);

  // In-shop item: a short-sleeved shirt silhouette on black.
  const double c_cx = width * (0.5 + rng.uniform(-0.12, 0.12));
  const double c_h = std::max(8.0, height * rng.uniform(0.3, 0.55));
  const double c_top = std::clamp(height * 0.5 - c_h * 0.5 + rng.uniform(-0.1, 0.1) * height,
                                  1.0, height - 2.0 - c_h);
  const double c_hw = std::min(width * 0.3, c_h * rng.uniform(0.35, 0.5));
  const double c_sleeve_w = c_hw * 0.35;
  const double c_sleeve_h = c_h * 0.3;
  const Rgb cloth_a = jitter_color(rng, {0.5, 0.5, 0.5}, 0.45);
  const Rgb cloth_b = jitter_color(rng, cloth_a, 0.3);
  const double cloth_freq = rng.uniform(0.25, 0.8);
  const double cloth_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  pair.cloth = ImageTensor(3, height, width);
  pair.cloth_mask = BinaryMask(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = std::abs(x - c_cx);
      const double t = y - c_top;
      bool in = false;
      if (t >= 0.0 && t < c_h) {
        const bool collar = t < 0.12 * c_h && dx < 0.3 * c_hw - t;
        in = dx <= c_hw && !collar;
        if (!in && t < c_sleeve_h) in = dx <= c_hw + c_sleeve_w * (1.0 - 0.3 * t / c_sleeve_h);
      }
      if (!in) continue;
      pair.cloth_mask.set(y, x, true);
      const Rgb c = garment_color(cloth_a, cloth_b, cloth_freq, cloth_phase, x, y);
      for (int k = 0; k < 3; ++k) pair.cloth(k, y, x) = c[static_cast<std::size_t>(k)];
    }
  }
  return pair;
}

void write_fixture(const std::filesystem::path& dir, const FixturePair& pair) {
  std::filesystem::create_directories(dir);
  write_png(dir / "I.png", pair.person);
  write_parsing_png(dir / "P_s.png", pair.parsing);
  write_keypoints(dir / "K.json", pair.keypoints);
  write_png(dir / "C.png", pair.cloth);
  write_mask_png(dir / "M_c.png", pair.cloth_mask);
}

FixturePair read_fixture(const std::filesystem::path& dir) {
  FixturePair pair;
  pair.person = read_png(dir / "I.png");
  pair.parsing = read_parsing_png(dir / "P_s.png");
  pair.keypoints = read_keypoints(dir / "K.json");
  pair.cloth = read_png(dir / "C.png");
  pair.cloth_mask = read_mask_png(dir / "M_c.png");
  return pair;
}

}  // namespace plvton
