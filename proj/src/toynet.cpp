#include "plvton/toynet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "binary_io.hpp"
#include "plvton/error.hpp"

namespace plvton {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double to_float_precision(double v) { return static_cast<double>(static_cast<float>(v)); }

void fill_uniform(std::vector<double>& v, CounterRng& rng, double a) {
  for (double& x : v) x = to_float_precision(rng.uniform(-a, a));
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
    : key_(splitmix64(seed ^ splitmix64(fnv1a(stream)))) {}

std::uint64_t CounterRng::next_u64() noexcept {
  return splitmix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double sigmoid(double v) noexcept { return 1.0 / (1.0 + std::exp(-v)); }

// ---------------------------------------------------------------------------
// Conv2D

Conv2D Conv2D::zeros(int in_channels, int out_channels, int stride) {
  if (in_channels < 1 || out_channels < 1) throw ParameterError("Conv2D: channel counts must be positive");
  if (stride != 1 && stride != 2) throw ParameterError("Conv2D: stride must be 1 or 2");
  Conv2D c;
  c.in_channels = in_channels;
  c.out_channels = out_channels;
  c.stride = stride;
  c.weight.assign(static_cast<std::size_t>(out_channels) * in_channels * 9, 0.0);
  c.bias.assign(static_cast<std::size_t>(out_channels), 0.0);
  return c;
}

Conv2D Conv2D::seeded(int in_channels, int out_channels, int stride, std::uint64_t seed,
                      std::string_view name) {
  Conv2D c = zeros(in_channels, out_channels, stride);
  const double a = std::sqrt(1.0 / (in_channels * 9.0));
  CounterRng rng(seed, name);
  fill_uniform(c.weight, rng, a);
  fill_uniform(c.bias, rng, a);
  return c;
}

ImageTensor Conv2D::forward(const ImageTensor& x) const {
  if (x.channels() != in_channels) {
    std::ostringstream os;
    os << "conv_forward: expected " << in_channels << " input channels, got " << x.channels();
    throw DimensionError(os.str());
  }
  const int h = x.height();
  const int iw = x.width();
  const int oh = output_size(h);
  const int ow = output_size(iw);
  ImageTensor out(out_channels, oh, ow);
  for (int o = 0; o < out_channels; ++o) {
    auto op = out.plane(o);
    std::fill(op.begin(), op.end(), bias[static_cast<std::size_t>(o)]);
    for (int i = 0; i < in_channels; ++i) {
      auto ip = x.plane(i);
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = w(o, i, ky, kx);
          if (wv == 0.0) continue;
          // Output columns whose input column ox*stride + kx - 1 lies in [0, w).
          const int ox_lo = kx == 0 ? 1 : 0;
          const int ox_hi = std::min(ow - 1, (iw - kx) / stride);
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= h) continue;
            double* orow = op.data() + static_cast<std::size_t>(oy) * ow;
            const double* irow = ip.data() + static_cast<std::size_t>(iy) * iw;
            if (stride == 1) {
              for (int ox = ox_lo; ox <= ox_hi; ++ox) orow[ox] += wv * irow[ox + kx - 1];
            } else {
              for (int ox = ox_lo; ox <= ox_hi; ++ox) orow[ox] += wv * irow[ox * 2 + kx - 1];
            }
          }
        }
      }
    }
  }
  return out;
}

ImageTensor Conv2D::backward_input(const ImageTensor& grad_out, int in_height,
                                   int in_width) const {
  if (grad_out.channels() != out_channels || grad_out.height() != output_size(in_height) ||
      grad_out.width() != output_size(in_width)) {
    throw DimensionError("Conv2D::backward_input: gradient shape does not match layer");
  }
  const int oh = grad_out.height();
  const int ow = grad_out.width();
  ImageTensor gin(in_channels, in_height, in_width);
  for (int o = 0; o < out_channels; ++o) {
    auto gp = grad_out.plane(o);
    for (int i = 0; i < in_channels; ++i) {
      auto ip = gin.plane(i);
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = w(o, i, ky, kx);
          if (wv == 0.0) continue;
          for (int oy = 0; oy < oh; ++oy) {
            const int iy = oy * stride + ky - 1;
            if (iy < 0 || iy >= in_height) continue;
            for (int ox = 0; ox < ow; ++ox) {
              const int ix = ox * stride + kx - 1;
              if (ix < 0 || ix >= in_width) continue;
              ip[static_cast<std::size_t>(iy) * in_width + ix] +=
                  wv * gp[static_cast<std::size_t>(oy) * ow + ox];
            }
          }
        }
      }
    }
  }
  return gin;
}

void Conv2D::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".weight", {out_channels, in_channels, 3, 3}, weight});
  out.push_back({prefix + ".bias", {out_channels}, bias});
}

ImageTensor conv_forward(const Conv2D& layer, const ImageTensor& x) { return layer.forward(x); }

ImageTensor relu(ImageTensor x) {
  for (double& v : x.values()) v = std::max(v, 0.0);
  return x;
}

// ---------------------------------------------------------------------------
// SE block

SEBlock SEBlock::seeded(int channels, int reduction, std::uint64_t seed, std::string_view name) {
  if (channels < 1 || reduction < 1) throw ParameterError("SEBlock: invalid channel/reduction");
  SEBlock b;
  b.channels = channels;
  b.reduced = std::max(1, channels / reduction);
  b.w1.assign(static_cast<std::size_t>(b.reduced) * channels, 0.0);
  b.b1.assign(static_cast<std::size_t>(b.reduced), 0.0);
  b.w2.assign(static_cast<std::size_t>(channels) * b.reduced, 0.0);
  b.b2.assign(static_cast<std::size_t>(channels), 0.0);
  CounterRng rng(seed, name);
  fill_uniform(b.w1, rng, std::sqrt(1.0 / channels));
  fill_uniform(b.b1, rng, std::sqrt(1.0 / channels));
  fill_uniform(b.w2, rng, std::sqrt(1.0 / b.reduced));
  fill_uniform(b.b2, rng, std::sqrt(1.0 / b.reduced));
  return b;
}

std::vector<double> SEBlock::gates(const ImageTensor& x) const {
  if (x.channels() != channels) {
    throw DimensionError("se_forward: channel mismatch, expected " + std::to_string(channels));
  }
  std::vector<double> pooled(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    double s = 0.0;
    for (double v : x.plane(c)) s += v;
    pooled[static_cast<std::size_t>(c)] = s / static_cast<double>(x.plane_size());
  }
  std::vector<double> hidden(static_cast<std::size_t>(reduced));
  for (int r = 0; r < reduced; ++r) {
    double s = b1[static_cast<std::size_t>(r)];
    for (int c = 0; c < channels; ++c) {
      s += w1[static_cast<std::size_t>(r) * channels + c] * pooled[static_cast<std::size_t>(c)];
    }
    hidden[static_cast<std::size_t>(r)] = std::max(s, 0.0);
  }
  std::vector<double> g(static_cast<std::size_t>(channels));
  for (int c = 0; c < channels; ++c) {
    double s = b2[static_cast<std::size_t>(c)];
    for (int r = 0; r < reduced; ++r) {
      s += w2[static_cast<std::size_t>(c) * reduced + r] * hidden[static_cast<std::size_t>(r)];
    }
    g[static_cast<std::size_t>(c)] = sigmoid(s);
  }
  return g;
}

ImageTensor SEBlock::forward(const ImageTensor& x) const {
  const auto g = gates(x);
  ImageTensor out = x;
  for (int c = 0; c < channels; ++c) {
    for (double& v : out.plane(c)) v *= g[static_cast<std::size_t>(c)];
  }
  return out;
}

void SEBlock::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  out.push_back({prefix + ".fc1.weight", {reduced, channels}, w1});
  out.push_back({prefix + ".fc1.bias", {reduced}, b1});
  out.push_back({prefix + ".fc2.weight", {channels, reduced}, w2});
  out.push_back({prefix + ".fc2.bias", {channels}, b2});
}

ImageTensor se_forward(const SEBlock& block, const ImageTensor& x) { return block.forward(x); }

// ---------------------------------------------------------------------------
// ConvGRU

ConvGRUCell ConvGRUCell::seeded(std::uint64_t seed) {
  ConvGRUCell cell;
  cell.update_gate = Conv2D::seeded(2 * kStateChannels, kStateChannels, 1, seed, "gru.update");
  cell.reset_gate = Conv2D::seeded(2 * kStateChannels, kStateChannels, 1, seed, "gru.reset");
  cell.candidate = Conv2D::seeded(2 * kStateChannels, kStateChannels, 1, seed, "gru.candidate");
  std::fill(cell.candidate.bias.begin(), cell.candidate.bias.end(), 0.0);
  return cell;
}

ConvGRUCell ConvGRUCell::forced(GateLimit limit) {
  // exp(-1000) underflows to 0 and exp(1000) overflows to inf, so the gates are
  // exactly 1 and 0.
  constexpr double kSaturation = 1000.0;
  ConvGRUCell cell;
  cell.update_gate = Conv2D::zeros(2 * kStateChannels, kStateChannels);
  cell.reset_gate = Conv2D::zeros(2 * kStateChannels, kStateChannels);
  cell.candidate = Conv2D::zeros(2 * kStateChannels, kStateChannels);
  const double zb = limit == GateLimit::kAlwaysUpdate ? kSaturation : -kSaturation;
  std::fill(cell.update_gate.bias.begin(), cell.update_gate.bias.end(), zb);
  // Candidate copies the input channels [2, 4) of [r.h, x] through the kernel center.
  for (int c = 0; c < kStateChannels; ++c) cell.candidate.w(c, kStateChannels + c, 1, 1) = 1.0;
  cell.activation = CandidateActivation::kIdentity;
  return cell;
}

void ConvGRUCell::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  update_gate.collect(prefix + ".update", out);
  reset_gate.collect(prefix + ".reset", out);
  candidate.collect(prefix + ".candidate", out);
}

GruTrace gru_step_trace(const ConvGRUCell& cell, const ImageTensor& h, const ImageTensor& x) {
  if (!h.same_shape(x)) {
    throw DimensionError("gru_step: state " + h.shape_string() + " and input " +
                         x.shape_string() + " differ");
  }
  if (h.channels() != ConvGRUCell::kStateChannels) {
    throw DimensionError("gru_step: state must have 2 channels");
  }
  GruTrace t;
  const ImageTensor hx = concat_channels({&h, &x});
  t.update = cell.update_gate.forward(hx);
  t.reset = cell.reset_gate.forward(hx);
  for (double& v : t.update.values()) v = sigmoid(v);
  for (double& v : t.reset.values()) v = sigmoid(v);

  ImageTensor rh = h;
  {
    auto a = rh.values();
    auto r = t.reset.values();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= r[i];
  }
  t.candidate = cell.candidate.forward(concat_channels({&rh, &x}));
  if (cell.activation == CandidateActivation::kTanh) {
    for (double& v : t.candidate.values()) v = std::tanh(v);
  }

  t.next = ImageTensor(h.channels(), h.height(), h.width());
  auto nv = t.next.values();
  auto hv = h.values();
  auto zv = t.update.values();
  auto cv = t.candidate.values();
  for (std::size_t i = 0; i < nv.size(); ++i) nv[i] = (1.0 - zv[i]) * hv[i] + zv[i] * cv[i];
  return t;
}

ImageTensor gru_step(const ConvGRUCell& cell, const ImageTensor& h, const ImageTensor& x) {
  return gru_step_trace(cell, h, x).next;
}

// ---------------------------------------------------------------------------
// Encoder-decoder

EncoderDecoder::EncoderDecoder(EncoderDecoderConfig config) : config_(std::move(config)) {
  if (config_.in_channels < 1 || config_.out_channels < 1 || config_.base_width < 1) {
    throw ParameterError("EncoderDecoder: channel counts must be positive");
  }
  const auto seed = config_.seed;
  const std::string& n = config_.name;
  stem_ = Conv2D::seeded(config_.in_channels, stage_width(0), 1, seed, n + ".stem");
  for (int k = 1; k <= kDepth; ++k) {
    const std::string p = n + ".enc" + std::to_string(k);
    Stage s;
    s.down = Conv2D::seeded(stage_width(k - 1), stage_width(k), 2, seed, p + ".down");
    s.res_a = Conv2D::seeded(stage_width(k), stage_width(k), 1, seed, p + ".res_a");
    s.res_b = Conv2D::seeded(stage_width(k), stage_width(k), 1, seed, p + ".res_b");
    if (config_.squeeze_excitation) s.se.push_back(SEBlock::seeded(stage_width(k), 4, seed, p + ".se"));
    stages_.push_back(std::move(s));
  }
  // Decoder layer j consumes upsample(previous) ++ skip from encoder stage 5 - j.
  int prev = stage_width(kDepth);
  for (int j = 1; j <= kDepth; ++j) {
    const int skip = stage_width(kDepth - j);
    decoder_.push_back(Conv2D::seeded(prev + skip, skip, 1, seed, n + ".dec" + std::to_string(j)));
    prev = skip;
  }
  head_ = Conv2D::seeded(prev, config_.out_channels, 1, seed, n + ".head");
}

int EncoderDecoder::stage_width(int stage) const noexcept {
  return config_.base_width * std::min(1 << stage, 8);
}

EncoderDecoderOutput EncoderDecoder::forward(const ImageTensor& x) const {
  if (x.channels() != config_.in_channels) {
    throw DimensionError("encdec_forward: expected " + std::to_string(config_.in_channels) +
                         " input channels, got " + std::to_string(x.channels()));
  }
  if (x.height() % kAlignment != 0 || x.width() % kAlignment != 0) {
    const int ph = (x.height() + kAlignment - 1) / kAlignment * kAlignment;
    const int pw = (x.width() + kAlignment - 1) / kAlignment * kAlignment;
    std::ostringstream os;
    os << "encdec_forward: input " << x.height() << "x" << x.width()
       << " is not divisible by " << kAlignment << "; pad to " << ph << "x" << pw;
    throw DimensionError(os.str());
  }
  std::vector<ImageTensor> skips;
  skips.push_back(relu(stem_.forward(x)));
  for (const Stage& s : stages_) {
    ImageTensor d = relu(s.down.forward(skips.back()));
    ImageTensor r = s.res_b.forward(relu(s.res_a.forward(d)));
    auto rv = r.values();
    auto dv = d.values();
    for (std::size_t i = 0; i < rv.size(); ++i) rv[i] = std::max(rv[i] + dv[i], 0.0);
    if (!s.se.empty()) r = s.se.front().forward(r);
    skips.push_back(std::move(r));
  }

  EncoderDecoderOutput out;
  ImageTensor cur = skips.back();
  for (int j = 1; j <= kDepth; ++j) {
    const ImageTensor& skip = skips[static_cast<std::size_t>(kDepth - j)];
    const ImageTensor up = resize_bilinear(cur, skip.height(), skip.width());
    cur = relu(decoder_[static_cast<std::size_t>(j - 1)].forward(concat_channels({&up, &skip})));
    out.decoder_maps.push_back(cur);
  }
  out.output = head_.forward(cur);
  return out;
}

void EncoderDecoder::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  stem_.collect(prefix + ".stem", out);
  for (std::size_t k = 0; k < stages_.size(); ++k) {
    const std::string p = prefix + ".enc" + std::to_string(k + 1);
    stages_[k].down.collect(p + ".down", out);
    stages_[k].res_a.collect(p + ".res_a", out);
    stages_[k].res_b.collect(p + ".res_b", out);
    for (auto& se : stages_[k].se) se.collect(p + ".se", out);
  }
  for (std::size_t j = 0; j < decoder_.size(); ++j) {
    decoder_[j].collect(prefix + ".dec" + std::to_string(j + 1), out);
  }
  head_.collect(prefix + ".head", out);
}

EncoderDecoderOutput encdec_forward(const EncoderDecoder& net, const ImageTensor& x) {
  return net.forward(x);
}

// ---------------------------------------------------------------------------
// Perceptual stand-in

ImageTensor avg_pool2(const ImageTensor& x) {
  const int oh = (x.height() + 1) / 2;
  const int ow = (x.width() + 1) / 2;
  ImageTensor out(x.channels(), oh, ow);
  for (int c = 0; c < x.channels(); ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int xo = 0; xo < ow; ++xo) {
        double s = 0.0;
        int n = 0;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const int iy = 2 * y + dy;
            const int ix = 2 * xo + dx;
            if (iy < x.height() && ix < x.width()) {
              s += x(c, iy, ix);
              ++n;
            }
          }
        }
        out(c, y, xo) = s / n;
      }
    }
  }
  return out;
}

ImageTensor avg_pool2_adjoint(const ImageTensor& grad, int in_height, int in_width) {
  ImageTensor out(grad.channels(), in_height, in_width);
  for (int c = 0; c < grad.channels(); ++c) {
    for (int y = 0; y < grad.height(); ++y) {
      for (int xo = 0; xo < grad.width(); ++xo) {
        const int ny = std::min(2, in_height - 2 * y);
        const int nx = std::min(2, in_width - 2 * xo);
        const double g = grad(c, y, xo) / (ny * nx);
        for (int dy = 0; dy < ny; ++dy)
          for (int dx = 0; dx < nx; ++dx) out(c, 2 * y + dy, 2 * xo + dx) += g;
      }
    }
  }
  return out;
}

PerceptualExtractor::PerceptualExtractor(std::uint64_t seed) {
  static constexpr std::array<int, kLevels> kWidths = {8, 8, 16, 16, 16};
  int in = 3;
  for (int k = 0; k < kLevels; ++k) {
    convs_.push_back(Conv2D::seeded(in, kWidths[static_cast<std::size_t>(k)], 1, seed,
                                    "perceptual.level" + std::to_string(k + 1)));
    in = kWidths[static_cast<std::size_t>(k)];
  }
}

std::vector<ImageTensor> PerceptualExtractor::features(const ImageTensor& x) const {
  if (x.channels() != 3) {
    throw DimensionError("toy_perceptual_features: expects 3 channels, got " + x.shape_string());
  }
  std::vector<ImageTensor> levels;
  ImageTensor cur = x;
  for (int k = 0; k < kLevels; ++k) {
    if (k > 0) cur = avg_pool2(levels.back());
    ImageTensor f = convs_[static_cast<std::size_t>(k)].forward(cur);
    for (double& v : f.values()) v = std::tanh(v);
    levels.push_back(std::move(f));
  }
  return levels;
}

ImageTensor PerceptualExtractor::backward(const ImageTensor& x,
                                          std::span<const ImageTensor> level_grads) const {
  if (level_grads.size() != static_cast<std::size_t>(kLevels)) {
    throw StructureError("PerceptualExtractor::backward: need one gradient per level");
  }
  const auto levels = features(x);
  ImageTensor carry;  // gradient flowing into level k from level k+1
  for (int k = kLevels - 1; k >= 0; --k) {
    const auto ks = static_cast<std::size_t>(k);
    if (!level_grads[ks].same_shape(levels[ks])) {
      throw DimensionError("PerceptualExtractor::backward: gradient shape mismatch at level " +
                           std::to_string(k + 1));
    }
    ImageTensor delta = level_grads[ks];
    if (!carry.empty()) {
      auto dv = delta.values();
      auto cv = carry.values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += cv[i];
    }
    {
      auto dv = delta.values();
      auto fv = levels[ks].values();
      for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= 1.0 - fv[i] * fv[i];
    }
    if (k == 0) return convs_[0].backward_input(delta, x.height(), x.width());
    const ImageTensor& below = levels[ks - 1];
    const int ph = (below.height() + 1) / 2;
    const int pw = (below.width() + 1) / 2;
    carry = avg_pool2_adjoint(convs_[ks].backward_input(delta, ph, pw), below.height(),
                              below.width());
  }
  return {};
}

void PerceptualExtractor::collect(const std::string& prefix, std::vector<ParamRef>& out) {
  for (std::size_t k = 0; k < convs_.size(); ++k) {
    convs_[k].collect(prefix + ".level" + std::to_string(k + 1), out);
  }
}

std::vector<ImageTensor> toy_perceptual_features(const PerceptualExtractor& extractor,
                                                 const ImageTensor& x) {
  return extractor.features(x);
}

std::vector<ImageTensor> toy_perceptual_features(const ImageTensor& x) {
  static const PerceptualExtractor extractor;
  return extractor.features(x);
}

// ---------------------------------------------------------------------------
// Weight files

std::vector<std::uint8_t> encode_weights(std::span<const ParamRef> params) {
  std::vector<std::uint8_t> out = {'P', 'L', 'V', 'W'};
  for (const ParamRef& p : params) {
    detail::put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    detail::put_u32(out, static_cast<std::uint32_t>(p.shape.size()));
    for (int d : p.shape) detail::put_u32(out, static_cast<std::uint32_t>(d));
    for (double v : p.values) detail::put_f32(out, static_cast<float>(v));
  }
  return out;
}

std::vector<WeightRecord> decode_weights(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.str(4) != "PLVW") throw FormatError("weights: bad magic, expected PLVW");
  std::vector<WeightRecord> records;
  while (!r.at_end()) {
    WeightRecord rec;
    const auto name_len = r.u32();
    if (name_len > bytes.size()) throw FormatError("weights: name length out of range");
    rec.name = r.str(name_len);
    const auto rank = r.u32();
    if (rank > 8) throw FormatError("weights: rank out of range in " + rec.name);
    std::size_t count = 1;
    for (std::uint32_t i = 0; i < rank; ++i) {
      const auto d = r.u32();
      if (d == 0 || d > (1u << 24)) throw FormatError("weights: bad dimension in " + rec.name);
      rec.shape.push_back(static_cast<int>(d));
      count *= d;
      if (count > bytes.size()) throw FormatError("weights: record larger than file");
    }
    rec.values.reserve(count);
    for (std::size_t i = 0; i < count; ++i) rec.values.push_back(r.f32());
    records.push_back(std::move(rec));
  }
  return records;
}

void write_weights(const std::filesystem::path& path, std::span<const ParamRef> params) {
  write_file_atomic(path, encode_weights(params));
}

std::vector<WeightRecord> read_weights(const std::filesystem::path& path) {
  return decode_weights(read_file_bytes(path));
}

void load_weights(std::span<const WeightRecord> records, std::span<ParamRef> params) {
  if (records.size() != params.size()) {
    throw StructureError("load_weights: expected " + std::to_string(params.size()) +
                         " records, file has " + std::to_string(records.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (records[i].name != params[i].name || records[i].shape != params[i].shape) {
      throw StructureError("load_weights: record " + records[i].name + " does not match " +
                           params[i].name);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = 0; j < params[i].values.size(); ++j) {
      params[i].values[j] = records[i].values[j];
    }
  }
}

}  // namespace plvton
