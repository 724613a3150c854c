#include "plvton/prealign.hpp"

#include <algorithm>
#include <cmath>

#include "plvton/error.hpp"

namespace plvton {

Rect circumscribed_rect(const BinaryMask& mask) {
  Rect r{mask.width(), -1, mask.height(), -1};
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(y, x)) continue;
      r.x_min = std::min(r.x_min, x);
      r.x_max = std::max(r.x_max, x);
      r.y_min = std::min(r.y_min, y);
      r.y_max = std::max(r.y_max, y);
    }
  }
  if (r.x_max < 0) throw EmptyRegionError("circumscribed_rect: mask has no set pixels");
  return r;
}

Point2 rect_center(const Rect& r) {
  return {(r.x_min + r.x_max) / 2.0, (r.y_min + r.y_max) / 2.0};
}

int clothing_height(const BinaryMask& mask) { return circumscribed_rect(mask).height(); }

PreAlignResult prealign(const ImageTensor& cloth, const BinaryMask& cloth_mask,
                        const ParsingMap& source) {
  if (cloth.height() != cloth_mask.height() || cloth.width() != cloth_mask.width() ||
      cloth.height() != source.height() || cloth.width() != source.width()) {
    throw DimensionError("prealign: clothing, mask and parsing sizes differ");
  }
  const BinaryMask person_cloth = class_mask(source, {3});
  const Rect src = circumscribed_rect(cloth_mask);
  const Rect dst = circumscribed_rect(person_cloth);
  const Point2 c_src = rect_center(src);
  const Point2 c_dst = rect_center(dst);

  PreAlignResult out;
  // Move the clothing onto the person's clothing center.
  out.shift_x = static_cast<int>(std::lround(c_dst.x - c_src.x));
  out.shift_y = static_cast<int>(std::lround(c_dst.y - c_src.y));
  out.shifted = translate(cloth, out.shift_x, out.shift_y);
  out.shifted_mask = translate(cloth_mask, out.shift_x, out.shift_y);

  out.source_height = src.height();
  out.target_height = dst.height();
  out.ratio = static_cast<double>(out.source_height) / out.target_height;

  // The integer shift can leave a half-pixel residual; scaling maps the
  // target center onto the shifted clothing center so the resample absorbs it.
  const double cx = c_src.x + out.shift_x;
  const double cy = c_src.y + out.shift_y;
  const int h = cloth.height();
  const int w = cloth.width();
  out.scaled = ImageTensor(cloth.channels(), h, w);
  out.scaled_mask = BinaryMask(h, w);
  for (int y = 0; y < h; ++y) {
    const double sy = cy + (y - c_dst.y) * out.ratio;
    const int ny = static_cast<int>(std::floor(sy + 0.5));
    for (int x = 0; x < w; ++x) {
      const double sx = cx + (x - c_dst.x) * out.ratio;
      const auto v = bilinear_sample(out.shifted, sx, sy);
      for (int c = 0; c < cloth.channels(); ++c) out.scaled(c, y, x) = v[static_cast<std::size_t>(c)];
      const int nx = static_cast<int>(std::floor(sx + 0.5));
      if (ny >= 0 && ny < h && nx >= 0 && nx < w && out.shifted_mask.at(ny, nx)) {
        out.scaled_mask.set(y, x, true);
      }
    }
  }
  return out;
}

}  // namespace plvton
