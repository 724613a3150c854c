#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "plvton/flow.hpp"
#include "plvton/person.hpp"
#include "plvton/tensor.hpp"
#include "plvton/toynet.hpp"

namespace plvton {

/// Warping-stage objective weights.
struct LossWeightsMCW {
  double mask = 2.5;
  double cloth = 5.0;
  double vgg = 1.0;
  double tv = 0.1;

  friend bool operator==(const LossWeightsMCW&, const LossWeightsMCW&) = default;
};

/// Per-class cross-entropy weights; clothing and both arm classes are boosted.
struct ClassWeights {
  std::array<double, kParsingClasses> w = {1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 1.0};

  friend bool operator==(const ClassWeights&, const ClassWeights&) = default;
};

/// Texture-fusion objective weights.
struct LossWeightsLTF {
  double img = 1.0;
  double perceptual = 2.0;
  double edge = 0.1;

  friend bool operator==(const LossWeightsLTF&, const LossWeightsLTF&) = default;
};

/// Weights of the five stand-in feature levels, shallow to deep.
using PerceptualLevelWeights = std::array<double, PerceptualExtractor::kLevels>;
inline constexpr PerceptualLevelWeights kDefaultLevelWeights = {1.0 / 32, 1.0 / 16, 1.0 / 8,
                                                                1.0 / 4, 1.0};

inline constexpr double kTvEpsilon = 1e-8;
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kNormalizationTolerance = 1e-5;

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Warping stage ------------------------------------------------------------

double mask_loss(const ImageTensor& warped_mask, const BinaryMask& target);
ImageTensor cloth_ground_truth(const ImageTensor& image, const BinaryMask& target);
double cloth_loss(const ImageTensor& warped, const ImageTensor& target);
double perceptual_loss(const ImageTensor& a, const ImageTensor& b,
                       const PerceptualExtractor& extractor,
                       const PerceptualLevelWeights& level_weights = kDefaultLevelWeights);

/// Smoothed isotropic total variation of a flow. Per channel and pixel the
/// forward differences (zero on the last row/column) give s = Dx^2 + Dy^2 and
/// the magnitude s / sqrt(s + eps), which is 0 at s = 0 and |D| - O(eps/|D|)
/// otherwise. Magnitudes are averaged over the H*W pixels, then over channels.
double tv_loss(const AppearanceFlow& flow);

struct McwLossParts {
  double mask = 0.0;
  double cloth = 0.0;
  double vgg = 0.0;
  double tv = 0.0;
};

double mcw_loss(const McwLossParts& parts, const LossWeightsMCW& weights = {});

// Parsing stage ------------------------------------------------------------

/// Mean over pixels of w[class] * -log(max(p_true, 1e-12)). Throws
/// ValidationError unless each pixel's probabilities sum to 1 within 1e-5.
double weighted_cross_entropy(const ImageTensor& probabilities, const ParsingMap& target,
                              const ClassWeights& weights = {});
/// Same objective on per-pixel softmax of raw scores.
double weighted_cross_entropy_logits(const ImageTensor& logits, const ParsingMap& target,
                                     const ClassWeights& weights = {});
ImageTensor softmax_channels(const ImageTensor& logits);

// Fusion stage -------------------------------------------------------------

double edge_loss(const ImageTensor& a, const ImageTensor& b);

double composite_image_loss(const ImageTensor& pred, const ImageTensor& target,
                            const PerceptualExtractor& extractor,
                            const LossWeightsLTF& weights = {},
                            const PerceptualLevelWeights& level_weights = kDefaultLevelWeights);

/// Coarse plus fine composite losses against the same target.
double ltf_loss(const ImageTensor& coarse, const ImageTensor& fine, const ImageTensor& target,
                const PerceptualExtractor& extractor, const LossWeightsLTF& weights = {},
                const PerceptualLevelWeights& level_weights = kDefaultLevelWeights);

// Gradients ----------------------------------------------------------------

enum class LossKind { kMask, kCloth, kPerceptual, kTotalVariation, kCrossEntropy, kEdge, kComposite };
enum class LossSlot { kPrediction, kTarget, kProbabilities, kLogits, kFlow };

LossKind parse_loss_kind(std::string_view name);
LossSlot parse_loss_slot(std::string_view name);
std::string_view loss_kind_name(LossKind kind);

/// Arguments of a loss evaluation. `first` is the prediction (or the flow, the
/// probabilities, the logits); `second` is the target (a one-hot 7-plane
/// tensor for cross-entropy, unused for total variation).
struct LossPoint {
  ImageTensor first;
  ImageTensor second;
  const PerceptualExtractor* extractor = nullptr;
  PerceptualLevelWeights level_weights = kDefaultLevelWeights;
  LossWeightsLTF ltf;
  ClassWeights class_weights;
};

/// Scalar loss as a function of the slot's tensor. The probability slot skips
/// the normalization check so that finite-difference probes stay defined.
double evaluate_loss(LossKind kind, LossSlot slot, const LossPoint& point);

/// Analytic gradient of evaluate_loss w.r.t. the slot tensor. L1 terms use
/// sign(0) = 0. Throws ParameterError for slots the loss does not have.
ImageTensor loss_gradient(LossKind kind, LossSlot slot, const LossPoint& point);

ImageTensor l1_mean_gradient(const ImageTensor& a, const ImageTensor& b);
ImageTensor perceptual_loss_gradient(const ImageTensor& a, const ImageTensor& b,
                                     const PerceptualExtractor& extractor,
                                     const PerceptualLevelWeights& level_weights);
ImageTensor tv_loss_gradient(const AppearanceFlow& flow);
ImageTensor cross_entropy_gradient(const ImageTensor& probabilities, const ParsingMap& target,
                                   const ClassWeights& weights);
ImageTensor cross_entropy_logits_gradient(const ImageTensor& logits, const ParsingMap& target,
                                          const ClassWeights& weights);
ImageTensor edge_loss_gradient(const ImageTensor& a, const ImageTensor& b);
ImageTensor composite_image_loss_gradient(const ImageTensor& pred, const ImageTensor& target,
                                          const PerceptualExtractor& extractor,
                                          const LossWeightsLTF& weights,
                                          const PerceptualLevelWeights& level_weights);

// Frechet distance ---------------------------------------------------------

/// ||mu1 - mu2||^2 + tr(S1 + S2 - 2 (S1 S2)^(1/2)). The trace of the root is
/// taken as tr sqrt(S1^(1/2) S2 S1^(1/2)), with symmetric eigendecompositions
/// whose small negative eigenvalues are clamped to zero.
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

/// Sample mean and unbiased covariance of the rows of `samples`.
GaussianStats gaussian_stats(const Eigen::MatrixXd& samples);

/// Per-image embedding: channel means of every stand-in feature level, concatenated.
Eigen::VectorXd perceptual_embedding(const PerceptualExtractor& extractor, const ImageTensor& image);
GaussianStats feature_statistics(const PerceptualExtractor& extractor,
                                 std::span<const ImageTensor> images);

}  // namespace plvton
