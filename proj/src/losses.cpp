#include "plvton/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "plvton/error.hpp"

namespace plvton {

namespace {

void require_same_shape(const ImageTensor& a, const ImageTensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                         b.shape_string());
  }
}

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_weights(const ClassWeights& w) {
  for (double v : w.w) {
    if (!(v > 0.0)) throw ParameterError("class weights must be positive");
  }
}

void check_parsing_shape(const ImageTensor& t, const ParsingMap& target, const char* what) {
  if (t.channels() != kParsingClasses || t.height() != target.height() ||
      t.width() != target.width()) {
    throw DimensionError(std::string(what) + ": expected 7x" + std::to_string(target.height()) +
                         "x" + std::to_string(target.width()) + ", got " + t.shape_string());
  }
}

double cross_entropy_unchecked(const ImageTensor& probabilities, const ParsingMap& target,
                               const ClassWeights& weights) {
  const auto labels = target.labels();
  double acc = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = std::max(probabilities.plane(labels[i])[i], kProbabilityFloor);
    acc += weights.w[labels[i]] * -std::log(p);
  }
  return acc / static_cast<double>(labels.size());
}

const PerceptualExtractor& require_extractor(const LossPoint& p) {
  if (p.extractor == nullptr) throw ParameterError("loss requires a perceptual extractor");
  return *p.extractor;
}

void add_scaled(ImageTensor& acc, const ImageTensor& g, double s) {
  auto a = acc.values();
  auto b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

}  // namespace

double mask_loss(const ImageTensor& warped_mask, const BinaryMask& target) {
  return l1_mean(warped_mask, target.to_tensor());
}

ImageTensor cloth_ground_truth(const ImageTensor& image, const BinaryMask& target) {
  return apply_mask(image, target);
}

double cloth_loss(const ImageTensor& warped, const ImageTensor& target) {
  return l1_mean(warped, target);
}

double perceptual_loss(const ImageTensor& a, const ImageTensor& b,
                       const PerceptualExtractor& extractor,
                       const PerceptualLevelWeights& level_weights) {
  require_same_shape(a, b, "perceptual_loss");
  const auto fa = extractor.features(a);
  const auto fb = extractor.features(b);
  double acc = 0.0;
  for (std::size_t k = 0; k < fa.size(); ++k) {
    if (level_weights[k] == 0.0) continue;
    acc += level_weights[k] * l1_mean(fa[k], fb[k]);
  }
  return acc;
}

namespace {

// Visits each pixel's forward differences for channel c.
template <typename F>
void for_each_difference(const ImageTensor& t, int c, F&& f) {
  const int h = t.height();
  const int w = t.width();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dx = x + 1 < w ? t(c, y, x + 1) - t(c, y, x) : 0.0;
      const double dy = y + 1 < h ? t(c, y + 1, x) - t(c, y, x) : 0.0;
      f(y, x, dx, dy);
    }
  }
}

}  // namespace

double tv_loss(const AppearanceFlow& flow) {
  const ImageTensor& t = flow.tensor();
  if (t.height() < 2 || t.width() < 2) {
    throw DimensionError("tv_loss: flow must be at least 2x2, got " + t.shape_string());
  }
  double total = 0.0;
  for (int c = 0; c < t.channels(); ++c) {
    double acc = 0.0;
    for_each_difference(t, c, [&](int, int, double dx, double dy) {
      const double s = dx * dx + dy * dy;
      acc += s / std::sqrt(s + kTvEpsilon);
    });
    total += acc / static_cast<double>(t.plane_size());
  }
  return total / t.channels();
}

ImageTensor tv_loss_gradient(const AppearanceFlow& flow) {
  const ImageTensor& t = flow.tensor();
  if (t.height() < 2 || t.width() < 2) throw DimensionError("tv_loss: flow must be at least 2x2");
  ImageTensor g(t.channels(), t.height(), t.width());
  const double k = 1.0 / (static_cast<double>(t.plane_size()) * t.channels());
  for (int c = 0; c < t.channels(); ++c) {
    for_each_difference(t, c, [&](int y, int x, double dx, double dy) {
      const double s = dx * dx + dy * dy;
      const double q = s + kTvEpsilon;
      const double scale = k * (s + 2.0 * kTvEpsilon) / (q * std::sqrt(q));
      if (x + 1 < t.width()) {
        g(c, y, x + 1) += scale * dx;
        g(c, y, x) -= scale * dx;
      }
      if (y + 1 < t.height()) {
        g(c, y + 1, x) += scale * dy;
        g(c, y, x) -= scale * dy;
      }
    });
  }
  return g;
}

double mcw_loss(const McwLossParts& parts, const LossWeightsMCW& weights) {
  return weights.mask * parts.mask + weights.cloth * parts.cloth + weights.vgg * parts.vgg +
         weights.tv * parts.tv;
}

ImageTensor softmax_channels(const ImageTensor& logits) {
  ImageTensor out(logits.channels(), logits.height(), logits.width());
  const std::size_t n = logits.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    double m = logits.plane(0)[i];
    for (int c = 1; c < logits.channels(); ++c) m = std::max(m, logits.plane(c)[i]);
    double z = 0.0;
    for (int c = 0; c < logits.channels(); ++c) {
      const double e = std::exp(logits.plane(c)[i] - m);
      out.plane(c)[i] = e;
      z += e;
    }
    for (int c = 0; c < logits.channels(); ++c) out.plane(c)[i] /= z;
  }
  return out;
}

double weighted_cross_entropy(const ImageTensor& probabilities, const ParsingMap& target,
                              const ClassWeights& weights) {
  check_parsing_shape(probabilities, target, "weighted_cross_entropy");
  check_weights(weights);
  const std::size_t n = probabilities.plane_size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < kParsingClasses; ++c) {
      const double p = probabilities.plane(c)[i];
      if (!(p >= 0.0)) throw ValidationError("weighted_cross_entropy: negative or NaN probability");
      s += p;
    }
    if (std::abs(s - 1.0) > kNormalizationTolerance) {
      throw ValidationError("weighted_cross_entropy: probabilities at pixel " + std::to_string(i) +
                            " sum to " + std::to_string(s));
    }
  }
  return cross_entropy_unchecked(probabilities, target, weights);
}

double weighted_cross_entropy_logits(const ImageTensor& logits, const ParsingMap& target,
                                     const ClassWeights& weights) {
  check_parsing_shape(logits, target, "weighted_cross_entropy_logits");
  check_weights(weights);
  return cross_entropy_unchecked(softmax_channels(logits), target, weights);
}

ImageTensor cross_entropy_gradient(const ImageTensor& probabilities, const ParsingMap& target,
                                   const ClassWeights& weights) {
  check_parsing_shape(probabilities, target, "cross_entropy_gradient");
  ImageTensor g(kParsingClasses, target.height(), target.width());
  const auto labels = target.labels();
  const double n = static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double p = probabilities.plane(labels[i])[i];
    // The floor clamp is flat below 1e-12.
    if (p > kProbabilityFloor) g.plane(labels[i])[i] = -weights.w[labels[i]] / (p * n);
  }
  return g;
}

ImageTensor cross_entropy_logits_gradient(const ImageTensor& logits, const ParsingMap& target,
                                          const ClassWeights& weights) {
  check_parsing_shape(logits, target, "cross_entropy_logits_gradient");
  ImageTensor p = softmax_channels(logits);
  const auto labels = target.labels();
  const double n = static_cast<double>(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double w = weights.w[labels[i]] / n;
    for (int c = 0; c < kParsingClasses; ++c) {
      const double delta = c == labels[i] ? 1.0 : 0.0;
      p.plane(c)[i] = w * (p.plane(c)[i] - delta);
    }
  }
  return p;
}

double edge_loss(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "edge_loss");
  return l1_mean(sobel_gradients(a), sobel_gradients(b));
}

double composite_image_loss(const ImageTensor& pred, const ImageTensor& target,
                            const PerceptualExtractor& extractor, const LossWeightsLTF& weights,
                            const PerceptualLevelWeights& level_weights) {
  require_same_shape(pred, target, "composite_image_loss");
  double acc = 0.0;
  if (weights.img != 0.0) acc += weights.img * l1_mean(pred, target);
  if (weights.perceptual != 0.0) {
    acc += weights.perceptual * perceptual_loss(pred, target, extractor, level_weights);
  }
  if (weights.edge != 0.0) acc += weights.edge * edge_loss(pred, target);
  return acc;
}

double ltf_loss(const ImageTensor& coarse, const ImageTensor& fine, const ImageTensor& target,
                const PerceptualExtractor& extractor, const LossWeightsLTF& weights,
                const PerceptualLevelWeights& level_weights) {
  return composite_image_loss(coarse, target, extractor, weights, level_weights) +
         composite_image_loss(fine, target, extractor, weights, level_weights);
}

ImageTensor l1_mean_gradient(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "l1_mean_gradient");
  ImageTensor g(a.channels(), a.height(), a.width());
  auto gv = g.values();
  auto av = a.values();
  auto bv = b.values();
  const double n = static_cast<double>(gv.size());
  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = sign(av[i] - bv[i]) / n;
  return g;
}

ImageTensor perceptual_loss_gradient(const ImageTensor& a, const ImageTensor& b,
                                     const PerceptualExtractor& extractor,
                                     const PerceptualLevelWeights& level_weights) {
  require_same_shape(a, b, "perceptual_loss_gradient");
  const auto fa = extractor.features(a);
  const auto fb = extractor.features(b);
  std::vector<ImageTensor> grads;
  for (std::size_t k = 0; k < fa.size(); ++k) {
    ImageTensor g = l1_mean_gradient(fa[k], fb[k]);
    for (double& v : g.values()) v *= level_weights[k];
    grads.push_back(std::move(g));
  }
  return extractor.backward(a, grads);
}

ImageTensor edge_loss_gradient(const ImageTensor& a, const ImageTensor& b) {
  require_same_shape(a, b, "edge_loss_gradient");
  return sobel_gradients_adjoint(l1_mean_gradient(sobel_gradients(a), sobel_gradients(b)),
                                 a.channels());
}

ImageTensor composite_image_loss_gradient(const ImageTensor& pred, const ImageTensor& target,
                                          const PerceptualExtractor& extractor,
                                          const LossWeightsLTF& weights,
                                          const PerceptualLevelWeights& level_weights) {
  ImageTensor g(pred.channels(), pred.height(), pred.width());
  if (weights.img != 0.0) add_scaled(g, l1_mean_gradient(pred, target), weights.img);
  if (weights.perceptual != 0.0) {
    add_scaled(g, perceptual_loss_gradient(pred, target, extractor, level_weights),
               weights.perceptual);
  }
  if (weights.edge != 0.0) add_scaled(g, edge_loss_gradient(pred, target), weights.edge);
  return g;
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "mask") return LossKind::kMask;
  if (name == "cloth") return LossKind::kCloth;
  if (name == "perceptual" || name == "vgg") return LossKind::kPerceptual;
  if (name == "tv") return LossKind::kTotalVariation;
  if (name == "cross_entropy" || name == "ce") return LossKind::kCrossEntropy;
  if (name == "edge") return LossKind::kEdge;
  if (name == "composite") return LossKind::kComposite;
  throw ParameterError("unknown loss '" + std::string(name) + "'");
}

LossSlot parse_loss_slot(std::string_view name) {
  if (name == "pred") return LossSlot::kPrediction;
  if (name == "target") return LossSlot::kTarget;
  if (name == "probabilities") return LossSlot::kProbabilities;
  if (name == "logits") return LossSlot::kLogits;
  if (name == "flow") return LossSlot::kFlow;
  throw ParameterError("unknown loss slot '" + std::string(name) + "'");
}

std::string_view loss_kind_name(LossKind kind) {
  switch (kind) {
    case LossKind::kMask: return "mask";
    case LossKind::kCloth: return "cloth";
    case LossKind::kPerceptual: return "perceptual";
    case LossKind::kTotalVariation: return "tv";
    case LossKind::kCrossEntropy: return "cross_entropy";
    case LossKind::kEdge: return "edge";
    case LossKind::kComposite: return "composite";
  }
  return "unknown";
}

namespace {

[[noreturn]] void unsupported(LossKind kind) {
  throw ParameterError("unsupported input slot for loss '" + std::string(loss_kind_name(kind)) +
                       "'");
}

bool is_pair_slot(LossSlot s) { return s == LossSlot::kPrediction || s == LossSlot::kTarget; }

}  // namespace

double evaluate_loss(LossKind kind, LossSlot slot, const LossPoint& p) {
  switch (kind) {
    case LossKind::kMask:
    case LossKind::kCloth:
      if (!is_pair_slot(slot)) unsupported(kind);
      return l1_mean(p.first, p.second);
    case LossKind::kPerceptual:
      if (!is_pair_slot(slot)) unsupported(kind);
      return perceptual_loss(p.first, p.second, require_extractor(p), p.level_weights);
    case LossKind::kEdge:
      if (!is_pair_slot(slot)) unsupported(kind);
      return edge_loss(p.first, p.second);
    case LossKind::kComposite:
      if (!is_pair_slot(slot)) unsupported(kind);
      return composite_image_loss(p.first, p.second, require_extractor(p), p.ltf,
                                  p.level_weights);
    case LossKind::kTotalVariation:
      if (slot != LossSlot::kFlow) unsupported(kind);
      return tv_loss(AppearanceFlow(p.first));
    case LossKind::kCrossEntropy: {
      const ParsingMap target = ParsingMap::from_one_hot(p.second);
      if (slot == LossSlot::kProbabilities) {
        check_parsing_shape(p.first, target, "cross_entropy");
        return cross_entropy_unchecked(p.first, target, p.class_weights);
      }
      if (slot == LossSlot::kLogits) {
        return weighted_cross_entropy_logits(p.first, target, p.class_weights);
      }
      unsupported(kind);
    }
  }
  unsupported(kind);
}

ImageTensor loss_gradient(LossKind kind, LossSlot slot, const LossPoint& p) {
  // Every pair loss is symmetric in its arguments, so the target gradient is
  // the prediction gradient with the roles swapped.
  const bool swap = slot == LossSlot::kTarget;
  const ImageTensor& x = swap ? p.second : p.first;
  const ImageTensor& y = swap ? p.first : p.second;
  switch (kind) {
    case LossKind::kMask:
    case LossKind::kCloth:
      if (!is_pair_slot(slot)) unsupported(kind);
      return l1_mean_gradient(x, y);
    case LossKind::kPerceptual:
      if (!is_pair_slot(slot)) unsupported(kind);
      return perceptual_loss_gradient(x, y, require_extractor(p), p.level_weights);
    case LossKind::kEdge:
      if (!is_pair_slot(slot)) unsupported(kind);
      return edge_loss_gradient(x, y);
    case LossKind::kComposite:
      if (!is_pair_slot(slot)) unsupported(kind);
      return composite_image_loss_gradient(x, y, require_extractor(p), p.ltf, p.level_weights);
    case LossKind::kTotalVariation:
      if (slot != LossSlot::kFlow) unsupported(kind);
      return tv_loss_gradient(AppearanceFlow(p.first));
    case LossKind::kCrossEntropy: {
      const ParsingMap target = ParsingMap::from_one_hot(p.second);
      if (slot == LossSlot::kProbabilities) {
        return cross_entropy_gradient(p.first, target, p.class_weights);
      }
      if (slot == LossSlot::kLogits) {
        return cross_entropy_logits_gradient(p.first, target, p.class_weights);
      }
      unsupported(kind);
    }
  }
  unsupported(kind);
}

}  // namespace plvton
