#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "plvton/tensor.hpp"

namespace plvton {

/// Counter-based generator: draw i of stream (seed, name) is
/// splitmix64(key(seed, name) + i * golden_gamma). Output depends only on the
/// key and the draw index, so parameter values are identical across platforms.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view stream);

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Named view of one parameter array, used for weight dump/load.
struct ParamRef {
  std::string name;
  std::vector<int> shape;
  std::span<double> values;
};

double sigmoid(double v) noexcept;

/// 3x3 convolution with zero padding 1. Weights are laid out [out][in][ky][kx].
struct Conv2D {
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
  std::vector<double> weight;
  std::vector<double> bias;

  /// uniform(-a, a), a = sqrt(1 / (in * 9)), values rounded to float precision.
  static Conv2D seeded(int in_channels, int out_channels, int stride, std::uint64_t seed,
                       std::string_view name);
  static Conv2D zeros(int in_channels, int out_channels, int stride = 1);

  double& w(int o, int i, int ky, int kx) {
    return weight[((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) * 3 + kx];
  }
  double w(int o, int i, int ky, int kx) const {
    return weight[((static_cast<std::size_t>(o) * in_channels + i) * 3 + ky) * 3 + kx];
  }

  int output_size(int n) const noexcept { return (n - 1) / stride + 1; }

  ImageTensor forward(const ImageTensor& x) const;
  /// Gradient w.r.t. the input given the gradient w.r.t. the output.
  ImageTensor backward_input(const ImageTensor& grad_out, int in_height, int in_width) const;

  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

ImageTensor conv_forward(const Conv2D& layer, const ImageTensor& x);

/// Squeeze-and-excitation: channel means -> affine -> ReLU -> affine -> sigmoid gates.
struct SEBlock {
  int channels = 0;
  int reduced = 0;
  std::vector<double> w1;  // reduced x channels
  std::vector<double> b1;
  std::vector<double> w2;  // channels x reduced
  std::vector<double> b2;

  static SEBlock seeded(int channels, int reduction, std::uint64_t seed, std::string_view name);

  std::vector<double> gates(const ImageTensor& x) const;
  ImageTensor forward(const ImageTensor& x) const;

  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

ImageTensor se_forward(const SEBlock& block, const ImageTensor& x);

enum class CandidateActivation { kTanh, kIdentity };
enum class GateLimit { kAlwaysUpdate, kNeverUpdate };

/// Convolutional GRU over 2-channel flow states:
///   z = sigmoid(Wz * [h, x]),  r = sigmoid(Wr * [h, x]),
///   c = act(Wc * [r . h, x]),  h' = (1 - z) . h + z . c
/// The candidate convolution has no bias, so zero state and zero input stay zero.
struct ConvGRUCell {
  Conv2D update_gate;
  Conv2D reset_gate;
  Conv2D candidate;
  CandidateActivation activation = CandidateActivation::kTanh;

  static constexpr int kStateChannels = 2;

  static ConvGRUCell seeded(std::uint64_t seed);
  /// Cell whose weights saturate the update gate: kAlwaysUpdate gives z = 1 with
  /// an identity candidate path (h' = x); kNeverUpdate gives z = 0 (h' = h).
  static ConvGRUCell forced(GateLimit limit);

  void collect(const std::string& prefix, std::vector<ParamRef>& out);
};

struct GruTrace {
  ImageTensor update;
  ImageTensor reset;
  ImageTensor candidate;
  ImageTensor next;
};

GruTrace gru_step_trace(const ConvGRUCell& cell, const ImageTensor& h, const ImageTensor& x);
ImageTensor gru_step(const ConvGRUCell& cell, const ImageTensor& h, const ImageTensor& x);

struct EncoderDecoderConfig {
  int in_channels = 3;
  int out_channels = 3;
  int base_width = 8;
  bool squeeze_excitation = false;
  std::uint64_t seed = 0;
  std::string name = "encdec";
};

struct EncoderDecoderOutput {
  ImageTensor output;
  /// Decoder layer k (1-based) at index k-1; layer k is H / 2^(5-k) tall.
  std::vector<ImageTensor> decoder_maps;
};

/// U-shaped network: stem, five stride-2 residual stages (optionally SE-gated),
/// five decoder layers with skip connections and a linear 3x3 head.
class EncoderDecoder {
 public:
  static constexpr int kDepth = 5;
  static constexpr int kAlignment = 1 << kDepth;

  explicit EncoderDecoder(EncoderDecoderConfig config);

  const EncoderDecoderConfig& config() const noexcept { return config_; }
  int stage_width(int stage) const noexcept;

  /// Throws DimensionError unless both spatial sizes are multiples of 32.
  EncoderDecoderOutput forward(const ImageTensor& x) const;

  void collect(const std::string& prefix, std::vector<ParamRef>& out);

 private:
  struct Stage {
    Conv2D down;
    Conv2D res_a;
    Conv2D res_b;
    std::vector<SEBlock> se;  // empty or one block
  };

  EncoderDecoderConfig config_;
  Conv2D stem_;
  std::vector<Stage> stages_;
  std::vector<Conv2D> decoder_;
  Conv2D head_;
};

EncoderDecoderOutput encdec_forward(const EncoderDecoder& net, const ImageTensor& x);

/// Fixed, never-trained stand-in for a pretrained perceptual network: five
/// tanh(conv) levels at strides 1, 2, 4, 8, 16 linked by 2x2 average pooling.
class PerceptualExtractor {
 public:
  static constexpr int kLevels = 5;
  static constexpr std::uint64_t kDefaultSeed = 0x5eed'0f'fea7;

  explicit PerceptualExtractor(std::uint64_t seed = kDefaultSeed);

  std::vector<ImageTensor> features(const ImageTensor& x) const;

  /// Gradient w.r.t. x of sum_k <level_grads[k], features_k(x)>.
  ImageTensor backward(const ImageTensor& x, std::span<const ImageTensor> level_grads) const;

  void collect(const std::string& prefix, std::vector<ParamRef>& out);

 private:
  std::vector<Conv2D> convs_;
};

std::vector<ImageTensor> toy_perceptual_features(const ImageTensor& x);
std::vector<ImageTensor> toy_perceptual_features(const PerceptualExtractor& extractor,
                                                 const ImageTensor& x);

/// 2x2 mean pooling with ceil sizing; partial windows average their valid pixels.
ImageTensor avg_pool2(const ImageTensor& x);
ImageTensor avg_pool2_adjoint(const ImageTensor& grad, int in_height, int in_width);

ImageTensor relu(ImageTensor x);

/// Weight files: magic "PLVW", then records of
/// (u32 name length, name bytes, u32 rank, u32 dims..., f32 values), little-endian.
struct WeightRecord {
  std::string name;
  std::vector<int> shape;
  std::vector<float> values;
};

void write_weights(const std::filesystem::path& path, std::span<const ParamRef> params);
std::vector<WeightRecord> read_weights(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_weights(std::span<const ParamRef> params);
std::vector<WeightRecord> decode_weights(std::span<const std::uint8_t> bytes);
/// Copies records into params; names, order and shapes must match exactly.
void load_weights(std::span<const WeightRecord> records, std::span<ParamRef> params);

}  // namespace plvton
