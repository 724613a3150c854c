#include "plvton/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "plvton/error.hpp"

namespace plvton {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimension: return "dimension_error";
    case ErrorCode::kParameter: return "parameter_error";
    case ErrorCode::kEmptyRegion: return "empty_region";
    case ErrorCode::kStructure: return "structure_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kFormat: return "format_error";
    case ErrorCode::kInvariant: return "invariant_violation";
  }
  return "unknown";
}

namespace {

void check_dims(int c, int h, int w) {
  if (c < 1 || h < 1 || w < 1) {
    std::ostringstream os;
    os << "tensor dimensions must be positive, got " << c << "x" << h << "x" << w;
    throw DimensionError(os.str());
  }
}

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

}  // namespace

ImageTensor::ImageTensor(int channels, int height, int width, double fill)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(static_cast<std::size_t>(channels) * plane_size(), fill);
}

ImageTensor::ImageTensor(int channels, int height, int width, std::vector<double> data)
    : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
  check_dims(channels, height, width);
  if (data_.size() != static_cast<std::size_t>(channels) * plane_size()) {
    throw DimensionError("tensor data length does not match " + shape_string());
  }
}

std::string ImageTensor::shape_string() const {
  std::ostringstream os;
  os << channels_ << "x" << height_ << "x" << width_;
  return os.str();
}

BinaryMask::BinaryMask(int height, int width, bool fill) : height_(height), width_(width) {
  check_dims(1, height, width);
  data_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width),
               fill ? 1 : 0);
}

BinaryMask BinaryMask::from_threshold(const ImageTensor& t, double threshold) {
  BinaryMask m(t.height(), t.width());
  auto p = t.plane(0);
  for (std::size_t i = 0; i < p.size(); ++i) m.data_[i] = p[i] >= threshold ? 1 : 0;
  return m;
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

ImageTensor BinaryMask::to_tensor() const {
  ImageTensor t(1, height_, width_);
  auto p = t.plane(0);
  for (std::size_t i = 0; i < data_.size(); ++i) p[i] = data_[i];
  return t;
}

std::vector<double> bilinear_sample(const ImageTensor& img, double x, double y) {
  std::vector<double> out(static_cast<std::size_t>(img.channels()), 0.0);
  const int w = img.width();
  const int h = img.height();
  if (!(x >= 0.0 && y >= 0.0 && x <= w - 1 && y <= h - 1)) return out;
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const bool has_x1 = x0 + 1 < w;
  const bool has_y1 = y0 + 1 < h;
  for (int c = 0; c < img.channels(); ++c) {
    const double p00 = img(c, y0, x0);
    const double p01 = has_x1 ? img(c, y0, x0 + 1) : 0.0;
    const double p10 = has_y1 ? img(c, y0 + 1, x0) : 0.0;
    const double p11 = has_x1 && has_y1 ? img(c, y0 + 1, x0 + 1) : 0.0;
    out[static_cast<std::size_t>(c)] =
        (1.0 - fy) * ((1.0 - fx) * p00 + fx * p01) + fy * ((1.0 - fx) * p10 + fx * p11);
  }
  return out;
}

ImageTensor resize_bilinear(const ImageTensor& img, int new_height, int new_width) {
  if (new_height < 1 || new_width < 1) {
    throw ParameterError("resize_bilinear: target size must be positive");
  }
  const int h = img.height();
  const int w = img.width();
  ImageTensor out(img.channels(), new_height, new_width);
  const double sy_scale = static_cast<double>(h) / new_height;
  const double sx_scale = static_cast<double>(w) / new_width;

  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int n_out, int n_in, double scale) {
    std::vector<Tap> t(static_cast<std::size_t>(n_out));
    for (int i = 0; i < n_out; ++i) {
      double s = (i + 0.5) * scale - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(n_in - 1));
      const int i0 = static_cast<int>(std::floor(s));
      const int i1 = std::min(i0 + 1, n_in - 1);
      t[static_cast<std::size_t>(i)] = {i0, i1, s - i0};
    }
    return t;
  };
  const auto ty = taps(new_height, h, sy_scale);
  const auto tx = taps(new_width, w, sx_scale);

  for (int c = 0; c < img.channels(); ++c) {
    for (int i = 0; i < new_height; ++i) {
      const Tap& a = ty[static_cast<std::size_t>(i)];
      for (int j = 0; j < new_width; ++j) {
        const Tap& b = tx[static_cast<std::size_t>(j)];
        const double top = (1.0 - b.f) * img(c, a.i0, b.i0) + b.f * img(c, a.i0, b.i1);
        const double bot = (1.0 - b.f) * img(c, a.i1, b.i0) + b.f * img(c, a.i1, b.i1);
        out(c, i, j) = (1.0 - a.f) * top + a.f * bot;
      }
    }
  }
  return out;
}

ImageTensor sobel_gradients(const ImageTensor& img) {
  const int h = img.height();
  const int w = img.width();
  if (h < 3 || w < 3) {
    throw DimensionError("sobel_gradients: image must be at least 3x3, got " +
                         img.shape_string());
  }
  ImageTensor out(2 * img.channels(), h, w);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      const int ym = std::max(y - 1, 0);
      const int yp = std::min(y + 1, h - 1);
      for (int x = 0; x < w; ++x) {
        const int xm = std::max(x - 1, 0);
        const int xp = std::min(x + 1, w - 1);
        const double gx = (img(c, ym, xp) - img(c, ym, xm)) +
                          2.0 * (img(c, y, xp) - img(c, y, xm)) +
                          (img(c, yp, xp) - img(c, yp, xm));
        const double gy = (img(c, yp, xm) - img(c, ym, xm)) +
                          2.0 * (img(c, yp, x) - img(c, ym, x)) +
                          (img(c, yp, xp) - img(c, ym, xp));
        out(2 * c, y, x) = gx;
        out(2 * c + 1, y, x) = gy;
      }
    }
  }
  return out;
}

ImageTensor sobel_gradients_adjoint(const ImageTensor& grad, int channels) {
  if (grad.channels() != 2 * channels) {
    throw DimensionError("sobel_gradients_adjoint: expected 2x channel planes");
  }
  const int h = grad.height();
  const int w = grad.width();
  ImageTensor out(channels, h, w);
  static constexpr int kWeights[3] = {1, 2, 1};
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double gx = grad(2 * c, y, x);
        const double gy = grad(2 * c + 1, y, x);
        for (int k = -1; k <= 1; ++k) {
          const double wk = kWeights[k + 1];
          // Gx row k: +w at column x+1, -w at column x-1.
          const int yk = std::clamp(y + k, 0, h - 1);
          out(c, yk, std::min(x + 1, w - 1)) += wk * gx;
          out(c, yk, std::max(x - 1, 0)) -= wk * gx;
          // Gy column k: +w at row y+1, -w at row y-1.
          const int xk = std::clamp(x + k, 0, w - 1);
          out(c, std::min(y + 1, h - 1), xk) += wk * gy;
          out(c, std::max(y - 1, 0), xk) -= wk * gy;
        }
      }
    }
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_blur: sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

ImageTensor gaussian_blur(const ImageTensor& img, double sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int h = img.height();
  const int w = img.width();
  ImageTensor tmp(img.channels(), h, w);
  ImageTensor out(img.channels(), h, w);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          acc += k[static_cast<std::size_t>(i + r)] * img(c, y, std::clamp(x + i, 0, w - 1));
        }
        tmp(c, y, x) = acc;
      }
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0.0;
        for (int i = -r; i <= r; ++i) {
          acc += k[static_cast<std::size_t>(i + r)] * tmp(c, std::clamp(y + i, 0, h - 1), x);
        }
        out(c, y, x) = acc;
      }
    }
  }
  return out;
}

PatchSet extract_patches(const ImageTensor& img, int grid_scale) {
  if (img.channels() != 1) throw DimensionError("extract_patches: expects one channel");
  if (grid_scale < 1) throw ParameterError("extract_patches: grid scale must be >= 1");
  if (grid_scale > std::min(img.height(), img.width())) {
    throw ParameterError("extract_patches: grid scale exceeds raster size");
  }
  PatchSet set;
  set.grid_scale = grid_scale;
  set.patch_height = (img.height() + grid_scale - 1) / grid_scale;
  set.patch_width = (img.width() + grid_scale - 1) / grid_scale;
  set.patches.reserve(static_cast<std::size_t>(grid_scale * grid_scale));
  for (int gy = 0; gy < grid_scale; ++gy) {
    for (int gx = 0; gx < grid_scale; ++gx) {
      ImageTensor p(1, set.patch_height, set.patch_width);
      for (int y = 0; y < set.patch_height; ++y) {
        const int sy = gy * set.patch_height + y;
        if (sy >= img.height()) break;
        for (int x = 0; x < set.patch_width; ++x) {
          const int sx = gx * set.patch_width + x;
          if (sx >= img.width()) break;
          p(0, y, x) = img(0, sy, sx);
        }
      }
      set.patches.push_back(std::move(p));
    }
  }
  return set;
}

ImageTensor reassemble_patches(const PatchSet& set, int height, int width) {
  const int s = set.grid_scale;
  if (s < 1 || set.patches.size() != static_cast<std::size_t>(s * s)) {
    throw StructureError("reassemble_patches: patch count does not match grid scale");
  }
  ImageTensor out(1, height, width);
  for (int gy = 0; gy < s; ++gy) {
    for (int gx = 0; gx < s; ++gx) {
      const ImageTensor& p = set.patches[static_cast<std::size_t>(gy * s + gx)];
      for (int y = 0; y < set.patch_height; ++y) {
        const int ty = gy * set.patch_height + y;
        if (ty >= height) break;
        for (int x = 0; x < set.patch_width; ++x) {
          const int tx = gx * set.patch_width + x;
          if (tx >= width) break;
          out(0, ty, tx) = p(0, y, x);
        }
      }
    }
  }
  return out;
}

double l1_mean(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "l1_mean");
  auto va = a.values();
  auto vb = b.values();
  double acc = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) acc += std::abs(va[i] - vb[i]);
  return acc / static_cast<double>(va.size());
}

ImageTensor concat_channels(std::span<const ImageTensor* const> parts) {
  if (parts.empty()) throw ParameterError("concat_channels: nothing to concatenate");
  const int h = parts.front()->height();
  const int w = parts.front()->width();
  int total = 0;
  for (const ImageTensor* p : parts) {
    if (p->height() != h || p->width() != w) {
      throw DimensionError("concat_channels: spatial mismatch " + p->shape_string());
    }
    total += p->channels();
  }
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(total) * static_cast<std::size_t>(h) *
               static_cast<std::size_t>(w));
  for (const ImageTensor* p : parts) {
    data.insert(data.end(), p->values().begin(), p->values().end());
  }
  return ImageTensor(total, h, w, std::move(data));
}

ImageTensor concat_channels(std::initializer_list<const ImageTensor*> parts) {
  return concat_channels(std::span<const ImageTensor* const>(parts.begin(), parts.size()));
}

ImageTensor select_channels(const ImageTensor& t, int first, int count) {
  if (first < 0 || count < 1 || first + count > t.channels()) {
    throw DimensionError("select_channels: range out of bounds for " + t.shape_string());
  }
  auto begin = t.values().begin() + static_cast<std::ptrdiff_t>(first * t.plane_size());
  auto end = begin + static_cast<std::ptrdiff_t>(count * t.plane_size());
  return ImageTensor(count, t.height(), t.width(), std::vector<double>(begin, end));
}

ImageTensor pad_bottom_right(const ImageTensor& t, int height, int width) {
  if (height < t.height() || width < t.width()) {
    throw DimensionError("pad_bottom_right: target smaller than source");
  }
  if (height == t.height() && width == t.width()) return t;
  ImageTensor out(t.channels(), height, width);
  for (int c = 0; c < t.channels(); ++c)
    for (int y = 0; y < t.height(); ++y)
      for (int x = 0; x < t.width(); ++x) out(c, y, x) = t(c, y, x);
  return out;
}

ImageTensor crop_top_left(const ImageTensor& t, int height, int width) {
  if (height > t.height() || width > t.width()) {
    throw DimensionError("crop_top_left: crop larger than source");
  }
  if (height == t.height() && width == t.width()) return t;
  ImageTensor out(t.channels(), height, width);
  for (int c = 0; c < t.channels(); ++c)
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out(c, y, x) = t(c, y, x);
  return out;
}

ImageTensor clamp01(ImageTensor t) {
  for (double& v : t.values()) v = std::clamp(v, 0.0, 1.0);
  return t;
}

ImageTensor apply_mask(const ImageTensor& t, const BinaryMask& m) {
  if (t.height() != m.height() || t.width() != m.width()) {
    throw DimensionError("apply_mask: spatial mismatch");
  }
  ImageTensor out = t;
  const auto mv = m.values();
  for (int c = 0; c < t.channels(); ++c) {
    auto p = out.plane(c);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (mv[i] == 0) p[i] = 0.0;
    }
  }
  return out;
}

ImageTensor translate(const ImageTensor& t, int dx, int dy) {
  ImageTensor out(t.channels(), t.height(), t.width());
  for (int c = 0; c < t.channels(); ++c) {
    for (int y = 0; y < t.height(); ++y) {
      const int sy = y - dy;
      if (sy < 0 || sy >= t.height()) continue;
      for (int x = 0; x < t.width(); ++x) {
        const int sx = x - dx;
        if (sx < 0 || sx >= t.width()) continue;
        out(c, y, x) = t(c, sy, sx);
      }
    }
  }
  return out;
}

BinaryMask translate(const BinaryMask& m, int dx, int dy) {
  BinaryMask out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y) {
    const int sy = y - dy;
    if (sy < 0 || sy >= m.height()) continue;
    for (int x = 0; x < m.width(); ++x) {
      const int sx = x - dx;
      if (sx < 0 || sx >= m.width()) continue;
      out.set(y, x, m.at(sy, sx));
    }
  }
  return out;
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  auto va = a.values();
  auto vb = b.values();
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
  return m;
}

}  // namespace plvton
