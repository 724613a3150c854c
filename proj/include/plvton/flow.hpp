#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "plvton/tensor.hpp"
#include "plvton/toynet.hpp"

namespace plvton {

/// Dense per-pixel displacement field: channel 0 = dx (columns), 1 = dy (rows).
/// Target pixel (y, x) reads the source at (x + dx, y + dy).
class AppearanceFlow {
 public:
  AppearanceFlow() = default;
  AppearanceFlow(int height, int width) : field_(2, height, width) {}
  explicit AppearanceFlow(ImageTensor field);

  static AppearanceFlow constant(int height, int width, double dx, double dy);

  int height() const noexcept { return field_.height(); }
  int width() const noexcept { return field_.width(); }
  bool empty() const noexcept { return field_.empty(); }

  double& dx(int y, int x) noexcept { return field_(0, y, x); }
  double& dy(int y, int x) noexcept { return field_(1, y, x); }
  double dx(int y, int x) const noexcept { return field_(0, y, x); }
  double dy(int y, int x) const noexcept { return field_(1, y, x); }

  const ImageTensor& tensor() const noexcept { return field_; }
  ImageTensor& tensor() noexcept { return field_; }

  friend bool operator==(const AppearanceFlow&, const AppearanceFlow&) = default;

 private:
  ImageTensor field_;
};

enum class PyramidMode {
  kLiteral,     // level k is ceil(H / (6 - k)) x ceil(W / (6 - k))
  kPowerOfTwo,  // level k is ceil(H / 2^(5 - k)) x ceil(W / 2^(5 - k))
};

inline constexpr int kPyramidLevels = 5;

struct FlowPyramid {
  std::vector<AppearanceFlow> levels;  // coarse (k = 1) to fine (k = 5)
};

/// Spatial size (height, width) of each pyramid level k = 1..5.
std::vector<std::pair<int, int>> pyramid_level_sizes(int height, int width, PyramidMode mode);

/// Throws StructureError unless the pyramid has five levels of the documented
/// sizes for a raster of (height, width).
void validate_pyramid(const FlowPyramid& pyramid, int height, int width, PyramidMode mode);

/// Backward warp: out(y, x) = bilinear_sample(src, x + dx, y + dy), zero outside.
ImageTensor warp_with_flow(const ImageTensor& src, const AppearanceFlow& flow);

/// Warps the mask as a real raster, then thresholds at 0.5.
BinaryMask warp_mask(const BinaryMask& mask, const AppearanceFlow& flow);

/// Bilinear resize; dx scales by new_width / W and dy by new_height / H.
AppearanceFlow upsample_flow(const AppearanceFlow& flow, int new_height, int new_width);

/// Coarse-to-fine ConvGRU aggregation. The hidden state is the running flow:
/// h starts at zero on level 1, and for each level h = cell(upsample(h), f_k).
AppearanceFlow aggregate_flows(const FlowPyramid& pyramid, const ConvGRUCell& cell,
                               PyramidMode mode = PyramidMode::kLiteral);

/// PLVF: magic "PLVF", u32 H, u32 W, then H*W little-endian f32 (dx, dy) pairs.
std::vector<std::uint8_t> encode_flow(const AppearanceFlow& flow);
AppearanceFlow decode_flow(std::span<const std::uint8_t> bytes);
void write_flow(const std::filesystem::path& path, const AppearanceFlow& flow);
AppearanceFlow read_flow(const std::filesystem::path& path);

}  // namespace plvton
