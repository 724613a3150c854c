#include "plvton/flow.hpp"

#include <cmath>
#include <string>

#include "binary_io.hpp"
#include "plvton/error.hpp"

namespace plvton {

AppearanceFlow::AppearanceFlow(ImageTensor field) : field_(std::move(field)) {
  if (field_.channels() != 2) {
    throw DimensionError("AppearanceFlow: expected 2 channels, got " + field_.shape_string());
  }
  for (double v : field_.values()) {
    if (!std::isfinite(v)) throw ValidationError("AppearanceFlow: non-finite displacement");
  }
}

AppearanceFlow AppearanceFlow::constant(int height, int width, double dx, double dy) {
  AppearanceFlow f(height, width);
  auto px = f.field_.plane(0);
  auto py = f.field_.plane(1);
  std::fill(px.begin(), px.end(), dx);
  std::fill(py.begin(), py.end(), dy);
  return f;
}

std::vector<std::pair<int, int>> pyramid_level_sizes(int height, int width, PyramidMode mode) {
  if (height < 1 || width < 1) throw ParameterError("pyramid_level_sizes: invalid raster");
  std::vector<std::pair<int, int>> sizes;
  for (int k = 1; k <= kPyramidLevels; ++k) {
    const int d = mode == PyramidMode::kLiteral ? 6 - k : 1 << (kPyramidLevels - k);
    sizes.emplace_back((height + d - 1) / d, (width + d - 1) / d);
  }
  return sizes;
}

void validate_pyramid(const FlowPyramid& pyramid, int height, int width, PyramidMode mode) {
  if (pyramid.levels.size() != static_cast<std::size_t>(kPyramidLevels)) {
    throw StructureError("flow pyramid must have 5 levels, got " +
                         std::to_string(pyramid.levels.size()));
  }
  const auto sizes = pyramid_level_sizes(height, width, mode);
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto& f = pyramid.levels[k];
    if (f.height() != sizes[k].first || f.width() != sizes[k].second) {
      throw StructureError("flow pyramid level " + std::to_string(k + 1) + " has size " +
                           std::to_string(f.height()) + "x" + std::to_string(f.width()) +
                           ", expected " + std::to_string(sizes[k].first) + "x" +
                           std::to_string(sizes[k].second));
    }
  }
}

ImageTensor warp_with_flow(const ImageTensor& src, const AppearanceFlow& flow) {
  if (src.height() != flow.height() || src.width() != flow.width()) {
    throw DimensionError("warp_with_flow: flow " + flow.tensor().shape_string() +
                         " does not match source " + src.shape_string());
  }
  ImageTensor out(src.channels(), src.height(), src.width());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const auto v = bilinear_sample(src, x + flow.dx(y, x), y + flow.dy(y, x));
      for (int c = 0; c < src.channels(); ++c) out(c, y, x) = v[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

BinaryMask warp_mask(const BinaryMask& mask, const AppearanceFlow& flow) {
  if (mask.height() != flow.height() || mask.width() != flow.width()) {
    throw DimensionError("warp_mask: flow does not match mask size");
  }
  return BinaryMask::from_threshold(warp_with_flow(mask.to_tensor(), flow), 0.5);
}

AppearanceFlow upsample_flow(const AppearanceFlow& flow, int new_height, int new_width) {
  if (new_height == flow.height() && new_width == flow.width()) return flow;
  ImageTensor t = resize_bilinear(flow.tensor(), new_height, new_width);
  const double sx = static_cast<double>(new_width) / flow.width();
  const double sy = static_cast<double>(new_height) / flow.height();
  for (double& v : t.plane(0)) v *= sx;
  for (double& v : t.plane(1)) v *= sy;
  return AppearanceFlow(std::move(t));
}

AppearanceFlow aggregate_flows(const FlowPyramid& pyramid, const ConvGRUCell& cell,
                               PyramidMode mode) {
  if (pyramid.levels.size() != static_cast<std::size_t>(kPyramidLevels)) {
    throw StructureError("aggregate_flows: pyramid must have 5 levels");
  }
  const AppearanceFlow& finest = pyramid.levels.back();
  validate_pyramid(pyramid, finest.height(), finest.width(), mode);
  if (cell.update_gate.out_channels != ConvGRUCell::kStateChannels) {
    throw StructureError("aggregate_flows: GRU hidden state must have 2 channels");
  }
  const AppearanceFlow& first = pyramid.levels.front();
  AppearanceFlow h(first.height(), first.width());
  for (const AppearanceFlow& level : pyramid.levels) {
    h = upsample_flow(h, level.height(), level.width());
    h = AppearanceFlow(gru_step(cell, h.tensor(), level.tensor()));
  }
  return h;
}

std::vector<std::uint8_t> encode_flow(const AppearanceFlow& flow) {
  std::vector<std::uint8_t> out = {'P', 'L', 'V', 'F'};
  detail::put_u32(out, static_cast<std::uint32_t>(flow.height()));
  detail::put_u32(out, static_cast<std::uint32_t>(flow.width()));
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      detail::put_f32(out, static_cast<float>(flow.dx(y, x)));
      detail::put_f32(out, static_cast<float>(flow.dy(y, x)));
    }
  }
  return out;
}

AppearanceFlow decode_flow(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.str(4) != "PLVF") throw FormatError("flow: bad magic, expected PLVF");
  const auto h = r.u32();
  const auto w = r.u32();
  if (h == 0 || w == 0 || static_cast<std::uint64_t>(h) * w * 8 + 12 != bytes.size()) {
    throw FormatError("flow: header size does not match payload");
  }
  AppearanceFlow f(static_cast<int>(h), static_cast<int>(w));
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      f.dx(y, x) = r.f32();
      f.dy(y, x) = r.f32();
      if (!std::isfinite(f.dx(y, x)) || !std::isfinite(f.dy(y, x))) {
        throw FormatError("flow: non-finite displacement");
      }
    }
  }
  return f;
}

void write_flow(const std::filesystem::path& path, const AppearanceFlow& flow) {
  write_file_atomic(path, encode_flow(flow));
}

AppearanceFlow read_flow(const std::filesystem::path& path) {
  return decode_flow(read_file_bytes(path));
}

}  // namespace plvton
