#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace plvton {

/// Dense C x H x W raster of doubles, row-major within each channel plane.
///
/// Coordinates follow raster order: x is the column, y is the row, origin at
/// the top-left pixel. Images live in [0,1]; feature maps and flows are
/// unrestricted. A default-constructed tensor is empty and only valid as a
/// placeholder.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(int channels, int height, int width, double fill = 0.0);
  ImageTensor(int channels, int height, int width, std::vector<double> data);

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t plane_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
  double operator()(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

  std::span<double> plane(int c) noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }
  std::span<const double> plane(int c) const noexcept {
    return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const ImageTensor& other) const noexcept {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }
  bool same_spatial(const ImageTensor& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  std::string shape_string() const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  std::size_t index(int c, int y, int x) const noexcept {
    return (static_cast<std::size_t>(c) * static_cast<std::size_t>(height_) +
            static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> data_;
};

/// Single-plane raster whose values are exactly 0 or 1.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool fill = false);

  /// Thresholds plane 0 of `t`: value >= threshold becomes 1.
  static BinaryMask from_threshold(const ImageTensor& t, double threshold = 0.5);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return data_.empty(); }

  bool at(int y, int x) const noexcept { return data_[idx(y, x)] != 0; }
  void set(int y, int x, bool v) noexcept { data_[idx(y, x)] = v ? 1 : 0; }

  std::size_t count() const noexcept;
  std::span<const std::uint8_t> values() const noexcept { return data_; }

  ImageTensor to_tensor() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t idx(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// s x s grid of equally sized single-channel tiles in row-major grid order.
struct PatchSet {
  int grid_scale = 0;
  int patch_height = 0;
  int patch_width = 0;
  std::vector<ImageTensor> patches;
};

// Sampling and filtering primitives.

/// Bilinear interpolation at (x, y). Coordinates outside [0,W-1]x[0,H-1]
/// yield zeros.
std::vector<double> bilinear_sample(const ImageTensor& img, double x, double y);

/// Resize with the align-corners-false convention and edge clamping.
ImageTensor resize_bilinear(const ImageTensor& img, int new_height, int new_width);

/// Sobel responses with replicate padding: planes are [Gx(c0), Gy(c0), Gx(c1), ...].
ImageTensor sobel_gradients(const ImageTensor& img);

/// Adjoint of sobel_gradients: maps a gradient on the Sobel output back to the input.
ImageTensor sobel_gradients_adjoint(const ImageTensor& grad, int channels);

/// Normalized 1-D Gaussian taps of radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

ImageTensor gaussian_blur(const ImageTensor& img, double sigma);

PatchSet extract_patches(const ImageTensor& img, int grid_scale);

/// Inverse of extract_patches; zero padding beyond (height, width) is dropped.
ImageTensor reassemble_patches(const PatchSet& patches, int height, int width);

double l1_mean(const ImageTensor& a, const ImageTensor& b);

// Raster helpers used across the pipeline.

ImageTensor concat_channels(std::span<const ImageTensor* const> parts);
ImageTensor concat_channels(std::initializer_list<const ImageTensor*> parts);
ImageTensor select_channels(const ImageTensor& t, int first, int count);
ImageTensor pad_bottom_right(const ImageTensor& t, int height, int width);
ImageTensor crop_top_left(const ImageTensor& t, int height, int width);
ImageTensor clamp01(ImageTensor t);

/// Elementwise product with a mask broadcast over every channel.
ImageTensor apply_mask(const ImageTensor& t, const BinaryMask& m);

/// Integer translation with zero fill: out(y, x) = in(y - dy, x - dx).
ImageTensor translate(const ImageTensor& t, int dx, int dy);
BinaryMask translate(const BinaryMask& m, int dx, int dy);

double max_abs_diff(const ImageTensor& a, const ImageTensor& b);

}  // namespace plvton
