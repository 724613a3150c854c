#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "plvton/flow.hpp"
#include "plvton/losses.hpp"
#include "plvton/person.hpp"
#include "plvton/prealign.hpp"
#include "plvton/tensor.hpp"
#include "plvton/toynet.hpp"

namespace plvton {

enum class RunMode { kTrain, kEval };

RunMode parse_run_mode(std::string_view name);
std::string_view run_mode_name(RunMode mode);
PyramidMode parse_pyramid_mode(std::string_view name);
std::string_view pyramid_mode_name(PyramidMode mode);

/// Published optimization schedule. Nothing here is executed; the values are
/// carried so configs document the setting the networks stand in for.
struct TrainingSchedule {
  int mcw_steps = 24000;
  int hpe_steps = 40000;
  int ltf_steps = 80000;
  int mcw_batch = 16;
  int hpe_batch = 16;
  int ltf_batch = 4;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double decay_start_fraction = 0.5;  // constant lr, then linear decay to zero

  friend bool operator==(const TrainingSchedule&, const TrainingSchedule&) = default;
};

struct PipelineConfig {
  int height = 256;
  int width = 192;
  int patch_scale = 4;
  double blur_sigma = 3.0;
  PyramidMode pyramid_mode = PyramidMode::kLiteral;
  std::uint64_t seed = 42;
  /// Peak displacement of a predicted sub-flow, as a fraction of its level size.
  double flow_scale = 0.1;
  RunMode mode = RunMode::kEval;
  /// Replaces the predicted sub-flows with zeros.
  bool debug_zero_flow = false;
  LossWeightsMCW mcw_weights;
  ClassWeights class_weights;
  LossWeightsLTF ltf_weights;
  TrainingSchedule schedule;

  /// Throws ParameterError on out-of-range fields.
  void validate() const;
  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

std::string config_to_json(const PipelineConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
PipelineConfig config_from_json(std::string_view text);

/// Seeded stand-ins for the three networks plus the fixed perceptual extractor.
class TryOnModel {
 public:
  explicit TryOnModel(const PipelineConfig& config);

  /// Flow pyramid for a raster of (height, width); levels ordered coarse to fine.
  FlowPyramid predict_flows(const ImageTensor& input, int height, int width,
                            PyramidMode mode) const;
  /// Network scores plus a fixed structural prior: known labels of the masked
  /// parsing, clothing where C_w is non-black, arms on elbow/wrist disks.
  ImageTensor parse_logits(const ImageTensor& input) const;
  ImageTensor coarse_image(const ImageTensor& input) const;
  ImageTensor fine_image(const ImageTensor& input) const;

  const ConvGRUCell& gru() const noexcept { return gru_; }
  const PerceptualExtractor& extractor() const noexcept { return extractor_; }

  /// Every trainable parameter, in a stable order.
  std::vector<ParamRef> parameters();

  static constexpr double kParsingPriorWeight = 4.0;
  static constexpr int kFlowInputs = 3 + kKeypointCount + kParsingClasses;
  static constexpr int kParseInputs = 3 + kKeypointCount + kParsingClasses + 3;
  static constexpr int kCoarseInputs = 3 + kKeypointCount + kParsingClasses + 3;
  static int fine_inputs(int patch_scale) {
    return 3 * patch_scale * patch_scale + kKeypointCount + 3 + kParsingClasses + 3;
  }

 private:
  EncoderDecoder flow_net_;
  std::vector<Conv2D> flow_heads_;  // decoder layers 1..4; layer 5 uses the net's head
  ConvGRUCell gru_;
  EncoderDecoder parse_net_;
  EncoderDecoder coarse_net_;
  EncoderDecoder fine_net_;
  PerceptualExtractor extractor_;
  double flow_scale_;
};

/// Prior logits (7 x H x W) read from a parse-network input.
ImageTensor parsing_prior(const ImageTensor& input);

/// Runs a network on an input zero-padded to multiples of 32, cropping the
/// output back to the input size.
ImageTensor run_padded(const EncoderDecoder& net, const ImageTensor& x);

struct McwResult {
  PreAlignResult prealigned;  // C_l, C_s and their masks
  FlowPyramid pyramid;
  AppearanceFlow flow;        // f_a
  ImageTensor warped;         // C_w
  BinaryMask warped_mask;     // M^w_c
};

struct HpeResult {
  ImageTensor probabilities;  // softmax scores, 7 x H x W
  ParsingMap parsing;         // P^t, argmax
};

struct LtfResult {
  LimbMap limb;               // L
  ImageTensor limb_patches;   // L_p, 3 s^2 x ceil(H/s) x ceil(W/s)
  ImageTensor coarse;         // I_c
  ImageTensor coarse_fed;     // I_c as seen by the fine network
  ImageTensor final_image;    // I_f
};

/// Pre-alignment against P^s, flow prediction from (C_s, K, masked P^s),
/// aggregation and warping.
McwResult run_mcw(const TryOnModel& model, const ImageTensor& cloth, const BinaryMask& cloth_mask,
                  const KeypointMap& keypoints, const ParsingMap& source,
                  const PipelineConfig& config);

HpeResult run_hpe(const TryOnModel& model, const ImageTensor& warped, const KeypointMap& keypoints,
                  const ParsingMap& masked_source, const ImageTensor& masked_person);

/// In train mode the coarse result is blurred inside the target arm classes
/// before the fine network sees it; eval feeds it unchanged.
LtfResult run_ltf(const TryOnModel& model, const ImageTensor& warped, const KeypointMap& keypoints,
                  const ParsingMap& target, const ImageTensor& masked_person,
                  const ImageTensor& person, const PipelineConfig& config);

/// Replaces the coarse result by its Gaussian blur on class 4/5 pixels of `target`.
ImageTensor blur_limb_region(const ImageTensor& image, const ParsingMap& target, double sigma);

struct TryOnInputs {
  ImageTensor cloth;               // C
  BinaryMask cloth_mask;           // M_c
  std::vector<Keypoint> keypoints;
  ParsingMap parsing;              // P^s
  ImageTensor person;              // I
};

struct StageTimings {
  double mcw_ms = 0.0;
  double hpe_ms = 0.0;
  double ltf_ms = 0.0;
};

struct TryOnBundle {
  // Inputs and the clothing-agnostic representation.
  ImageTensor cloth;
  BinaryMask cloth_mask;
  KeypointMap keypoints;
  ParsingMap parsing;
  ImageTensor person;
  BinaryMask agnostic_mask;
  ImageTensor masked_person;       // I_mask
  ParsingMap masked_parsing;       // P^s with the agnostic region relabelled
  // Stage outputs.
  McwResult mcw;
  HpeResult hpe;
  LtfResult ltf;
  StageTimings timings;
};

TryOnBundle run_pipeline(const TryOnModel& model, const TryOnInputs& inputs,
                         const PipelineConfig& config);

/// Throws InvariantError when rasters disagree in size or outputs leave [0,1].
void check_bundle(const TryOnBundle& bundle);

/// Exact raster equality of every bundle field (timings excluded).
bool bundles_identical(const TryOnBundle& a, const TryOnBundle& b);

struct TrainingSample {
  ImageTensor cloth;
  BinaryMask cloth_mask;
  KeypointMap keypoints;
  BinaryMask agnostic_mask;
  ImageTensor masked_person;      // I_mask
  ParsingMap masked_parsing;
  BinaryMask cloth_mask_target;   // M^gt_c
  ImageTensor cloth_target;       // C^gt_w
  ParsingMap parsing_target;      // P^s
  ImageTensor image_target;       // I
};

TrainingSample make_training_sample(const ImageTensor& person, const ParsingMap& source,
                                    std::span<const Keypoint> keypoints, const ImageTensor& cloth,
                                    const BinaryMask& cloth_mask);

/// Self-supervised objectives of a bundle against its own person image.
std::map<std::string, double> loss_report(const TryOnBundle& bundle, const TryOnModel& model,
                                          const PipelineConfig& config);

}  // namespace plvton
