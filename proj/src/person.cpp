#include "plvton/person.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "plvton/error.hpp"

namespace plvton {

ParsingMap::ParsingMap(int height, int width, std::uint8_t fill)
    : height_(height), width_(width) {
  if (height < 1 || width < 1) throw DimensionError("ParsingMap: dimensions must be positive");
  if (fill >= kParsingClasses) throw ParameterError("ParsingMap: class id out of range");
  labels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

ParsingMap::ParsingMap(int height, int width, std::vector<std::uint8_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
  if (height < 1 || width < 1) throw DimensionError("ParsingMap: dimensions must be positive");
  if (labels_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw DimensionError("ParsingMap: label count does not match dimensions");
  }
  for (auto l : labels_) {
    if (l >= kParsingClasses) {
      throw ValidationError("ParsingMap: class id " + std::to_string(l) + " out of range 0..6");
    }
  }
}

void ParsingMap::set(int y, int x, std::uint8_t label) {
  if (label >= kParsingClasses) throw ParameterError("ParsingMap: class id out of range");
  labels_[idx(y, x)] = label;
}

ParsingMap ParsingMap::from_one_hot(const ImageTensor& planes) {
  if (planes.channels() != kParsingClasses) {
    throw DimensionError("ParsingMap::from_one_hot: expected 7 planes, got " +
                         planes.shape_string());
  }
  const int h = planes.height();
  const int w = planes.width();
  std::vector<std::uint8_t> labels(planes.plane_size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int hot = -1;
      for (int c = 0; c < kParsingClasses; ++c) {
        const double v = planes(c, y, x);
        if (v == 1.0) {
          if (hot >= 0) throw ValidationError("ParsingMap::from_one_hot: pixel is not one-hot");
          hot = c;
        } else if (v != 0.0) {
          throw ValidationError("ParsingMap::from_one_hot: non-binary value");
        }
      }
      if (hot < 0) throw ValidationError("ParsingMap::from_one_hot: pixel has no class");
      labels[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
             static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(hot);
    }
  }
  return ParsingMap(h, w, std::move(labels));
}

ParsingMap ParsingMap::from_argmax(const ImageTensor& scores) {
  if (scores.channels() != kParsingClasses) {
    throw DimensionError("ParsingMap::from_argmax: expected 7 planes, got " +
                         scores.shape_string());
  }
  std::vector<std::uint8_t> labels(scores.plane_size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int best = 0;
    double best_v = scores.plane(0)[i];
    for (int c = 1; c < kParsingClasses; ++c) {
      const double v = scores.plane(c)[i];
      if (v > best_v) {
        best_v = v;
        best = c;
      }
    }
    labels[i] = static_cast<std::uint8_t>(best);
  }
  return ParsingMap(scores.height(), scores.width(), std::move(labels));
}

ImageTensor ParsingMap::to_one_hot() const {
  ImageTensor out(kParsingClasses, height_, width_);
  for (std::size_t i = 0; i < labels_.size(); ++i) out.plane(labels_[i])[i] = 1.0;
  return out;
}

BinaryMask class_mask(const ParsingMap& parsing, std::span<const int> classes) {
  std::array<bool, kParsingClasses> wanted{};
  for (int c : classes) {
    if (c < 0 || c >= kParsingClasses) {
      throw ParameterError("class_mask: invalid class id " + std::to_string(c));
    }
    wanted[static_cast<std::size_t>(c)] = true;
  }
  BinaryMask m(parsing.height(), parsing.width());
  for (int y = 0; y < parsing.height(); ++y)
    for (int x = 0; x < parsing.width(); ++x)
      if (wanted[parsing.at(y, x)]) m.set(y, x, true);
  return m;
}

BinaryMask class_mask(const ParsingMap& parsing, std::initializer_list<int> classes) {
  return class_mask(parsing, std::span<const int>(classes.begin(), classes.size()));
}

BinaryMask build_agnostic_mask(const ParsingMap& source) {
  const int h = source.height();
  const int w = source.width();
  int x_min = w, x_max = -1, y_min = h, y_max = -1;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (source.at(y, x) != static_cast<std::uint8_t>(BodyClass::kUpperClothing)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max < 0) throw EmptyRegionError("build_agnostic_mask: parsing map has no clothing pixels");

  BinaryMask mask = class_mask(source, {4, 5});
  for (int y = y_min; y <= y_max; ++y)
    for (int x = x_min; x <= x_max; ++x) mask.set(y, x, true);
  return mask;
}

MaskedPerson apply_agnostic_mask(const ImageTensor& image, const ParsingMap& source,
                                 const BinaryMask& mask) {
  if (image.height() != source.height() || image.width() != source.width() ||
      mask.height() != source.height() || mask.width() != source.width()) {
    throw DimensionError("apply_agnostic_mask: image, parsing and mask sizes differ");
  }
  MaskedPerson out{image, source};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x)) continue;
      for (int c = 0; c < image.channels(); ++c) out.image(c, y, x) = 0.0;
      out.parsing.set(y, x, static_cast<std::uint8_t>(BodyClass::kBackground));
    }
  }
  return out;
}

LimbMap extract_limb_map(const ParsingMap& target, const ImageTensor& image) {
  if (image.height() != target.height() || image.width() != target.width()) {
    throw DimensionError("extract_limb_map: image and parsing sizes differ");
  }
  if (image.channels() != 3) throw DimensionError("extract_limb_map: expects an RGB image");
  return LimbMap{apply_mask(image, class_mask(target, {4, 5}))};
}

ImageTensor limb_patches(const LimbMap& limb, int grid_scale) {
  const ImageTensor& l = limb.image;
  std::vector<ImageTensor> planes;
  for (int c = 0; c < l.channels(); ++c) {
    PatchSet set = extract_patches(select_channels(l, c, 1), grid_scale);
    for (auto& p : set.patches) planes.push_back(std::move(p));
  }
  std::vector<const ImageTensor*> ptrs;
  ptrs.reserve(planes.size());
  for (const auto& p : planes) ptrs.push_back(&p);
  return concat_channels(ptrs);
}

ImageTensor reassemble_limb_patches(const ImageTensor& stacked, int grid_scale, int height,
                                    int width) {
  const int per_channel = grid_scale * grid_scale;
  if (grid_scale < 1 || stacked.channels() % per_channel != 0) {
    throw StructureError("reassemble_limb_patches: channel count is not a multiple of s^2");
  }
  const int colors = stacked.channels() / per_channel;
  std::vector<ImageTensor> planes;
  for (int c = 0; c < colors; ++c) {
    PatchSet set{grid_scale, stacked.height(), stacked.width(), {}};
    for (int i = 0; i < per_channel; ++i) {
      set.patches.push_back(select_channels(stacked, c * per_channel + i, 1));
    }
    planes.push_back(reassemble_patches(set, height, width));
  }
  std::vector<const ImageTensor*> ptrs;
  for (const auto& p : planes) ptrs.push_back(&p);
  return concat_channels(ptrs);
}

double default_keypoint_radius(int height) { return 4.0 * height / 256.0; }

KeypointMap render_keypoints(std::span<const Keypoint> points, int height, int width,
                             std::optional<double> radius) {
  const double r = radius.value_or(default_keypoint_radius(height));
  if (r < 0.0) throw ParameterError("render_keypoints: radius must be non-negative");
  if (points.size() > kKeypointCount) {
    throw ParameterError("render_keypoints: more than 18 keypoints");
  }
  KeypointMap map{ImageTensor(kKeypointCount, height, width)};
  std::array<bool, kKeypointCount> seen{};
  for (const Keypoint& p : points) {
    if (p.id < 0 || p.id >= kKeypointCount) {
      throw ParameterError("render_keypoints: keypoint id " + std::to_string(p.id) +
                           " outside 0..17");
    }
    if (seen[static_cast<std::size_t>(p.id)]) {
      throw ParameterError("render_keypoints: duplicate keypoint id " + std::to_string(p.id));
    }
    seen[static_cast<std::size_t>(p.id)] = true;
    const int y0 = std::max(0, static_cast<int>(std::floor(p.y - r)));
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(p.y + r)));
    const int x0 = std::max(0, static_cast<int>(std::floor(p.x - r)));
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(p.x + r)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double dx = x - p.x;
        const double dy = y - p.y;
        if (dx * dx + dy * dy <= r * r) map.planes(p.id, y, x) = 1.0;
      }
    }
  }
  return map;
}

}  // namespace plvton
