#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <vector>

#include "plvton/tensor.hpp"

namespace plvton {

inline constexpr int kParsingClasses = 7;
inline constexpr int kKeypointCount = 18;

/// Semantic classes of the 7-channel parsing convention.
enum class BodyClass : std::uint8_t {
  kBackground = 0,
  kHair = 1,
  kFaceSkin = 2,
  kUpperClothing = 3,
  kLeftArm = 4,
  kRightArm = 5,
  kLowerBody = 6,
};

/// Per-pixel class labels of a person. Stored as indices so the one-hot
/// invariant holds by construction; `to_one_hot` produces the 7-plane form.
class ParsingMap {
 public:
  ParsingMap() = default;
  ParsingMap(int height, int width, std::uint8_t fill = 0);
  ParsingMap(int height, int width, std::vector<std::uint8_t> labels);

  /// Accepts a 7-plane tensor in which every pixel is exactly one-hot.
  static ParsingMap from_one_hot(const ImageTensor& planes);
  /// Hardens 7-plane scores by per-pixel argmax (first maximum wins).
  static ParsingMap from_argmax(const ImageTensor& scores);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return labels_.empty(); }

  std::uint8_t at(int y, int x) const noexcept { return labels_[idx(y, x)]; }
  void set(int y, int x, std::uint8_t label);

  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

  ImageTensor to_one_hot() const;

  friend bool operator==(const ParsingMap&, const ParsingMap&) = default;

 private:
  std::size_t idx(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> labels_;
};

struct Keypoint {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

/// 18 planes, one per body joint; a plane is zero when the joint is absent.
struct KeypointMap {
  ImageTensor planes;
};

/// Person image restricted to arm pixels of a parsing map (3 x H x W).
struct LimbMap {
  ImageTensor image;
};

BinaryMask class_mask(const ParsingMap& parsing, std::initializer_list<int> classes);
BinaryMask class_mask(const ParsingMap& parsing, std::span<const int> classes);

/// Filled circumscribed rectangle of the upper-clothing pixels united with
/// both arm classes. Throws EmptyRegionError without clothing pixels.
BinaryMask build_agnostic_mask(const ParsingMap& source);

struct MaskedPerson {
  ImageTensor image;
  ParsingMap parsing;
};

/// Blacks out masked image pixels and relabels masked parsing pixels as background.
MaskedPerson apply_agnostic_mask(const ImageTensor& image, const ParsingMap& source,
                                 const BinaryMask& mask);

LimbMap extract_limb_map(const ParsingMap& target, const ImageTensor& image);

/// 3 * s^2 planes of size ceil(H/s) x ceil(W/s): color-major, then row-major grid.
ImageTensor limb_patches(const LimbMap& limb, int grid_scale);

/// Inverse of limb_patches back to a 3 x H x W raster.
ImageTensor reassemble_limb_patches(const ImageTensor& stacked, int grid_scale, int height,
                                    int width);

/// Default disk radius: 4 px at a 256-row raster, scaled with height.
double default_keypoint_radius(int height);

KeypointMap render_keypoints(std::span<const Keypoint> points, int height, int width,
                             std::optional<double> radius = std::nullopt);

}  // namespace plvton
