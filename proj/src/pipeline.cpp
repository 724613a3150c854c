#include "plvton/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "plvton/error.hpp"

namespace plvton {

namespace {

using Json = nlohmann::ordered_json;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since)
      .count();
}

ImageTensor sigmoid_all(ImageTensor t) {
  for (double& v : t.values()) v = sigmoid(v);
  return t;
}

ParsingMap mask_parsing(const ParsingMap& source, const BinaryMask& mask) {
  ParsingMap out = source;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      if (mask.at(y, x)) out.set(y, x, 0);
    }
  }
  return out;
}

void require_raster(const ImageTensor& t, int channels, int height, int width, const char* what) {
  if (t.channels() != channels || t.height() != height || t.width() != width) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(channels) + "x" +
                         std::to_string(height) + "x" + std::to_string(width) + ", got " +
                         t.shape_string());
  }
}

int padded(int n) {
  const int a = EncoderDecoder::kAlignment;
  return (n + a - 1) / a * a;
}

}  // namespace

RunMode parse_run_mode(std::string_view name) {
  if (name == "train") return RunMode::kTrain;
  if (name == "eval") return RunMode::kEval;
  throw ParameterError("unknown mode '" + std::string(name) + "', expected train or eval");
}

std::string_view run_mode_name(RunMode mode) { return mode == RunMode::kTrain ? "train" : "eval"; }

PyramidMode parse_pyramid_mode(std::string_view name) {
  if (name == "literal") return PyramidMode::kLiteral;
  if (name == "pow2") return PyramidMode::kPowerOfTwo;
  throw ParameterError("unknown pyramid mode '" + std::string(name) + "', expected literal or pow2");
}

std::string_view pyramid_mode_name(PyramidMode mode) {
  return mode == PyramidMode::kLiteral ? "literal" : "pow2";
}

void PipelineConfig::validate() const {
  if (height < 1 || width < 1) throw ParameterError("config: image size must be positive");
  if (patch_scale < 1 || patch_scale > std::min(height, width)) {
    throw ParameterError("config: patch_scale must lie in [1, min(height, width)]");
  }
  if (!(blur_sigma > 0.0) || !std::isfinite(blur_sigma)) {
    throw ParameterError("config: blur_sigma must be positive");
  }
  if (!(flow_scale >= 0.0) || !std::isfinite(flow_scale)) {
    throw ParameterError("config: flow_scale must be non-negative");
  }
  for (double v : {mcw_weights.mask, mcw_weights.cloth, mcw_weights.vgg, mcw_weights.tv,
                   ltf_weights.img, ltf_weights.perceptual, ltf_weights.edge}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("config: loss weights must be >= 0");
  }
  for (double v : class_weights.w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("config: class weights must be > 0");
  }
}

std::string config_to_json(const PipelineConfig& c) {
  Json j;
  j["height"] = c.height;
  j["width"] = c.width;
  j["patch_scale"] = c.patch_scale;
  j["blur_sigma"] = c.blur_sigma;
  j["pyramid_mode"] = pyramid_mode_name(c.pyramid_mode);
  j["seed"] = c.seed;
  j["flow_scale"] = c.flow_scale;
  j["mode"] = run_mode_name(c.mode);
  j["debug_zero_flow"] = c.debug_zero_flow;
  j["mcw_weights"] = {{"mask", c.mcw_weights.mask},
                      {"cloth", c.mcw_weights.cloth},
                      {"vgg", c.mcw_weights.vgg},
                      {"tv", c.mcw_weights.tv}};
  j["class_weights"] = c.class_weights.w;
  j["ltf_weights"] = {{"img", c.ltf_weights.img},
                      {"perceptual", c.ltf_weights.perceptual},
                      {"edge", c.ltf_weights.edge}};
  const auto& s = c.schedule;
  j["schedule"] = {{"mcw_steps", s.mcw_steps},
                   {"hpe_steps", s.hpe_steps},
                   {"ltf_steps", s.ltf_steps},
                   {"mcw_batch", s.mcw_batch},
                   {"hpe_batch", s.hpe_batch},
                   {"ltf_batch", s.ltf_batch},
                   {"learning_rate", s.learning_rate},
                   {"adam_beta1", s.adam_beta1},
                   {"adam_beta2", s.adam_beta2},
                   {"decay_start_fraction", s.decay_start_fraction}};
  return j.dump(2) + "\n";
}

namespace {

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw FormatError(std::string("config: ") + where + " must be an object");
  std::set<std::string> names(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!names.contains(key)) {
      throw FormatError(std::string("config: unknown key '") + key + "' in " + where);
    }
  }
}

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

PipelineConfig config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  reject_unknown(j,
                 {"height", "width", "patch_scale", "blur_sigma", "pyramid_mode", "seed",
                  "flow_scale", "mode", "debug_zero_flow", "mcw_weights", "class_weights",
                  "ltf_weights", "schedule"},
                 "config");
  PipelineConfig c;
  read_field(j, "height", c.height);
  read_field(j, "width", c.width);
  read_field(j, "patch_scale", c.patch_scale);
  read_field(j, "blur_sigma", c.blur_sigma);
  read_field(j, "seed", c.seed);
  read_field(j, "flow_scale", c.flow_scale);
  read_field(j, "debug_zero_flow", c.debug_zero_flow);
  if (j.contains("pyramid_mode")) {
    std::string m;
    read_field(j, "pyramid_mode", m);
    c.pyramid_mode = parse_pyramid_mode(m);
  }
  if (j.contains("mode")) {
    std::string m;
    read_field(j, "mode", m);
    c.mode = parse_run_mode(m);
  }
  if (j.contains("mcw_weights")) {
    const Json& w = j["mcw_weights"];
    reject_unknown(w, {"mask", "cloth", "vgg", "tv"}, "mcw_weights");
    read_field(w, "mask", c.mcw_weights.mask);
    read_field(w, "cloth", c.mcw_weights.cloth);
    read_field(w, "vgg", c.mcw_weights.vgg);
    read_field(w, "tv", c.mcw_weights.tv);
  }
  read_field(j, "class_weights", c.class_weights.w);
  if (j.contains("ltf_weights")) {
    const Json& w = j["ltf_weights"];
    reject_unknown(w, {"img", "perceptual", "edge"}, "ltf_weights");
    read_field(w, "img", c.ltf_weights.img);
    read_field(w, "perceptual", c.ltf_weights.perceptual);
    read_field(w, "edge", c.ltf_weights.edge);
  }
  if (j.contains("schedule")) {
    const Json& s = j["schedule"];
    reject_unknown(s,
                   {"mcw_steps", "hpe_steps", "ltf_steps", "mcw_batch", "hpe_batch", "ltf_batch",
                    "learning_rate", "adam_beta1", "adam_beta2", "decay_start_fraction"},
                   "schedule");
    auto& t = c.schedule;
    read_field(s, "mcw_steps", t.mcw_steps);
    read_field(s, "hpe_steps", t.hpe_steps);
    read_field(s, "ltf_steps", t.ltf_steps);
    read_field(s, "mcw_batch", t.mcw_batch);
    read_field(s, "hpe_batch", t.hpe_batch);
    read_field(s, "ltf_batch", t.ltf_batch);
    read_field(s, "learning_rate", t.learning_rate);
    read_field(s, "adam_beta1", t.adam_beta1);
    read_field(s, "adam_beta2", t.adam_beta2);
    read_field(s, "decay_start_fraction", t.decay_start_fraction);
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Model

TryOnModel::TryOnModel(const PipelineConfig& config)
    : flow_net_({kFlowInputs, 2, 8, false, config.seed, "mcw.flow"}),
      gru_(ConvGRUCell::seeded(config.seed)),
      parse_net_({kParseInputs, kParsingClasses, 8, true, config.seed, "hpe"}),
      coarse_net_({kCoarseInputs, 3, 8, false, config.seed, "ltf.coarse"}),
      fine_net_({fine_inputs(config.patch_scale), 3, 8, false, config.seed, "ltf.fine"}),
      flow_scale_(config.flow_scale) {
  for (int k = 1; k < EncoderDecoder::kDepth; ++k) {
    const int width = flow_net_.stage_width(EncoderDecoder::kDepth - k);
    flow_heads_.push_back(
        Conv2D::seeded(width, 2, 1, config.seed, "mcw.flow.level" + std::to_string(k)));
  }
}

ImageTensor run_padded(const EncoderDecoder& net, const ImageTensor& x) {
  const int ph = padded(x.height());
  const int pw = padded(x.width());
  if (ph == x.height() && pw == x.width()) return net.forward(x).output;
  return crop_top_left(net.forward(pad_bottom_right(x, ph, pw)).output, x.height(), x.width());
}

FlowPyramid TryOnModel::predict_flows(const ImageTensor& input, int height, int width,
                                      PyramidMode mode) const {
  const int ph = padded(height);
  const int pw = padded(width);
  const ImageTensor x = ph == height && pw == width ? input : pad_bottom_right(input, ph, pw);
  const EncoderDecoderOutput out = flow_net_.forward(x);
  const auto sizes = pyramid_level_sizes(height, width, mode);
  FlowPyramid pyramid;
  for (int k = 1; k <= kPyramidLevels; ++k) {
    const int div = 1 << (kPyramidLevels - k);
    const int lh = (height + div - 1) / div;
    const int lw = (width + div - 1) / div;
    ImageTensor raw = k == kPyramidLevels
                          ? out.output
                          : flow_heads_[static_cast<std::size_t>(k - 1)].forward(
                                out.decoder_maps[static_cast<std::size_t>(k - 1)]);
    raw = crop_top_left(raw, lh, lw);
    for (double& v : raw.plane(0)) v = flow_scale_ * lw * std::tanh(v);
    for (double& v : raw.plane(1)) v = flow_scale_ * lh * std::tanh(v);
    const auto [th, tw] = sizes[static_cast<std::size_t>(k - 1)];
    pyramid.levels.push_back(upsample_flow(AppearanceFlow(std::move(raw)), th, tw));
  }
  return pyramid;
}

ImageTensor parsing_prior(const ImageTensor& input) {
  // Channel layout: C_w (0-2), K (3-20), masked P^s (21-27), I_mask (28-30).
  constexpr int kK = 3;
  constexpr int kP = kK + kKeypointCount;
  ImageTensor prior(kParsingClasses, input.height(), input.width());
  for (int y = 0; y < input.height(); ++y) {
    for (int x = 0; x < input.width(); ++x) {
      for (int c = 1; c < kParsingClasses; ++c) prior(c, y, x) += input(kP + c, y, x);
      if (input(0, y, x) + input(1, y, x) + input(2, y, x) > 0.0) prior(3, y, x) += 1.0;
      // COCO right arm (2, 3, 4) sits on the image left, which is class 4.
      for (int j : {3, 4}) prior(4, y, x) += input(kK + j, y, x);
      for (int j : {6, 7}) prior(5, y, x) += input(kK + j, y, x);
    }
  }
  return prior;
}

ImageTensor TryOnModel::parse_logits(const ImageTensor& input) const {
  if (input.channels() != kParseInputs) {
    throw DimensionError("parse_logits: expected " + std::to_string(kParseInputs) +
                         " channels, got " + input.shape_string());
  }
  ImageTensor logits = run_padded(parse_net_, input);
  const ImageTensor prior = parsing_prior(input);
  auto lv = logits.values();
  auto pv = prior.values();
  for (std::size_t i = 0; i < lv.size(); ++i) lv[i] += kParsingPriorWeight * pv[i];
  return logits;
}

ImageTensor TryOnModel::coarse_image(const ImageTensor& input) const {
  return clamp01(sigmoid_all(run_padded(coarse_net_, input)));
}

ImageTensor TryOnModel::fine_image(const ImageTensor& input) const {
  return clamp01(sigmoid_all(run_padded(fine_net_, input)));
}

std::vector<ParamRef> TryOnModel::parameters() {
  std::vector<ParamRef> out;
  flow_net_.collect("mcw.flow", out);
  for (std::size_t k = 0; k < flow_heads_.size(); ++k) {
    flow_heads_[k].collect("mcw.flow.level" + std::to_string(k + 1), out);
  }
  gru_.collect("mcw.gru", out);
  parse_net_.collect("hpe", out);
  coarse_net_.collect("ltf.coarse", out);
  fine_net_.collect("ltf.fine", out);
  return out;
}

// ---------------------------------------------------------------------------
// Stages

McwResult run_mcw(const TryOnModel& model, const ImageTensor& cloth, const BinaryMask& cloth_mask,
                  const KeypointMap& keypoints, const ParsingMap& source,
                  const PipelineConfig& config) {
  const int h = source.height();
  const int w = source.width();
  require_raster(cloth, 3, h, w, "run_mcw: clothing image");
  require_raster(keypoints.planes, kKeypointCount, h, w, "run_mcw: keypoint map");
  McwResult r;
  r.prealigned = prealign(cloth, cloth_mask, source);
  if (config.debug_zero_flow) {
    for (const auto& [lh, lw] : pyramid_level_sizes(h, w, config.pyramid_mode)) {
      r.pyramid.levels.emplace_back(lh, lw);
    }
  } else {
    const ParsingMap masked = mask_parsing(source, build_agnostic_mask(source));
    const ImageTensor parsing = masked.to_one_hot();
    const ImageTensor input =
        concat_channels({&r.prealigned.scaled, &keypoints.planes, &parsing});
    r.pyramid = model.predict_flows(input, h, w, config.pyramid_mode);
  }
  r.flow = aggregate_flows(r.pyramid, model.gru(), config.pyramid_mode);
  r.warped = warp_with_flow(r.prealigned.scaled, r.flow);
  r.warped_mask = warp_mask(r.prealigned.scaled_mask, r.flow);
  return r;
}

HpeResult run_hpe(const TryOnModel& model, const ImageTensor& warped, const KeypointMap& keypoints,
                  const ParsingMap& masked_source, const ImageTensor& masked_person) {
  const int h = masked_source.height();
  const int w = masked_source.width();
  require_raster(warped, 3, h, w, "run_hpe: warped clothing");
  require_raster(keypoints.planes, kKeypointCount, h, w, "run_hpe: keypoint map");
  require_raster(masked_person, 3, h, w, "run_hpe: masked person");
  const ImageTensor parsing = masked_source.to_one_hot();
  const ImageTensor input =
      concat_channels({&warped, &keypoints.planes, &parsing, &masked_person});
  HpeResult r;
  r.probabilities = softmax_channels(model.parse_logits(input));
  r.parsing = ParsingMap::from_argmax(r.probabilities);
  return r;
}

ImageTensor blur_limb_region(const ImageTensor& image, const ParsingMap& target, double sigma) {
  const BinaryMask limbs = class_mask(target, {4, 5});
  ImageTensor out = image;
  if (limbs.count() == 0) return out;
  const ImageTensor blurred = gaussian_blur(image, sigma);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) {
        if (limbs.at(y, x)) out(c, y, x) = blurred(c, y, x);
      }
    }
  }
  return out;
}

LtfResult run_ltf(const TryOnModel& model, const ImageTensor& warped, const KeypointMap& keypoints,
                  const ParsingMap& target, const ImageTensor& masked_person,
                  const ImageTensor& person, const PipelineConfig& config) {
  const int h = target.height();
  const int w = target.width();
  require_raster(warped, 3, h, w, "run_ltf: warped clothing");
  require_raster(keypoints.planes, kKeypointCount, h, w, "run_ltf: keypoint map");
  require_raster(masked_person, 3, h, w, "run_ltf: masked person");
  require_raster(person, 3, h, w, "run_ltf: person");
  const ImageTensor parsing = target.to_one_hot();

  LtfResult r;
  r.coarse = model.coarse_image(
      concat_channels({&warped, &keypoints.planes, &parsing, &masked_person}));
  r.coarse_fed = config.mode == RunMode::kTrain
                     ? blur_limb_region(r.coarse, target, config.blur_sigma)
                     : r.coarse;
  r.limb = extract_limb_map(target, person);
  r.limb_patches = limb_patches(r.limb, config.patch_scale);
  const ImageTensor patches_full = resize_bilinear(r.limb_patches, h, w);
  r.final_image = model.fine_image(concat_channels(
      {&patches_full, &keypoints.planes, &masked_person, &parsing, &r.coarse_fed}));
  return r;
}

TryOnBundle run_pipeline(const TryOnModel& model, const TryOnInputs& inputs,
                         const PipelineConfig& config) {
  config.validate();
  const int h = config.height;
  const int w = config.width;
  require_raster(inputs.person, 3, h, w, "run_pipeline: person image");
  require_raster(inputs.cloth, 3, h, w, "run_pipeline: clothing image");
  if (inputs.parsing.height() != h || inputs.parsing.width() != w ||
      inputs.cloth_mask.height() != h || inputs.cloth_mask.width() != w) {
    throw DimensionError("run_pipeline: parsing map and clothing mask must be " +
                         std::to_string(h) + "x" + std::to_string(w));
  }

  TryOnBundle b;
  b.cloth = inputs.cloth;
  b.cloth_mask = inputs.cloth_mask;
  b.keypoints = render_keypoints(inputs.keypoints, h, w);
  b.parsing = inputs.parsing;
  b.person = inputs.person;
  b.agnostic_mask = build_agnostic_mask(inputs.parsing);
  MaskedPerson masked = apply_agnostic_mask(inputs.person, inputs.parsing, b.agnostic_mask);
  b.masked_person = std::move(masked.image);
  b.masked_parsing = std::move(masked.parsing);

  auto t0 = std::chrono::steady_clock::now();
  b.mcw = run_mcw(model, b.cloth, b.cloth_mask, b.keypoints, b.parsing, config);
  b.timings.mcw_ms = elapsed_ms(t0);
  t0 = std::chrono::steady_clock::now();
  b.hpe = run_hpe(model, b.mcw.warped, b.keypoints, b.masked_parsing, b.masked_person);
  b.timings.hpe_ms = elapsed_ms(t0);
  t0 = std::chrono::steady_clock::now();
  b.ltf = run_ltf(model, b.mcw.warped, b.keypoints, b.hpe.parsing, b.masked_person, b.person,
                  config);
  b.timings.ltf_ms = elapsed_ms(t0);
  check_bundle(b);
  return b;
}

void check_bundle(const TryOnBundle& b) {
  const int h = b.person.height();
  const int w = b.person.width();
  auto same = [&](int th, int tw, const char* what) {
    if (th != h || tw != w) {
      throw InvariantError(std::string("bundle: ") + what + " is " + std::to_string(th) + "x" +
                           std::to_string(tw) + ", expected " + std::to_string(h) + "x" +
                           std::to_string(w));
    }
  };
  auto same_t = [&](const ImageTensor& t, const char* what) { same(t.height(), t.width(), what); };
  same_t(b.cloth, "C");
  same(b.cloth_mask.height(), b.cloth_mask.width(), "M_c");
  same_t(b.keypoints.planes, "K");
  same(b.parsing.height(), b.parsing.width(), "P_s");
  same(b.agnostic_mask.height(), b.agnostic_mask.width(), "agnostic mask");
  same_t(b.masked_person, "I_mask");
  same_t(b.mcw.prealigned.shifted, "C_l");
  same_t(b.mcw.prealigned.scaled, "C_s");
  same(b.mcw.flow.height(), b.mcw.flow.width(), "f_a");
  same_t(b.mcw.warped, "C_w");
  same(b.mcw.warped_mask.height(), b.mcw.warped_mask.width(), "M_w");
  same_t(b.hpe.probabilities, "parsing probabilities");
  same(b.hpe.parsing.height(), b.hpe.parsing.width(), "P_t");
  same_t(b.ltf.limb.image, "L");
  same_t(b.ltf.coarse, "I_c");
  same_t(b.ltf.final_image, "I_f");
  for (const ImageTensor* t : {&b.ltf.coarse, &b.ltf.coarse_fed, &b.ltf.final_image}) {
    for (double v : t->values()) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvariantError("bundle: image value outside [0,1]");
    }
  }
  if (b.hpe.probabilities.channels() != kParsingClasses) {
    throw InvariantError("bundle: parsing probabilities must have 7 planes");
  }
}

bool bundles_identical(const TryOnBundle& a, const TryOnBundle& b) {
  const auto& pa = a.mcw.prealigned;
  const auto& pb = b.mcw.prealigned;
  return a.cloth == b.cloth && a.cloth_mask == b.cloth_mask &&
         a.keypoints.planes == b.keypoints.planes && a.parsing == b.parsing &&
         a.person == b.person && a.agnostic_mask == b.agnostic_mask &&
         a.masked_person == b.masked_person && a.masked_parsing == b.masked_parsing &&
         pa.shifted == pb.shifted && pa.shifted_mask == pb.shifted_mask &&
         pa.scaled == pb.scaled && pa.scaled_mask == pb.scaled_mask &&
         pa.shift_x == pb.shift_x && pa.shift_y == pb.shift_y && pa.ratio == pb.ratio &&
         a.mcw.pyramid.levels == b.mcw.pyramid.levels && a.mcw.flow == b.mcw.flow &&
         a.mcw.warped == b.mcw.warped && a.mcw.warped_mask == b.mcw.warped_mask &&
         a.hpe.probabilities == b.hpe.probabilities && a.hpe.parsing == b.hpe.parsing &&
         a.ltf.limb.image == b.ltf.limb.image && a.ltf.limb_patches == b.ltf.limb_patches &&
         a.ltf.coarse == b.ltf.coarse && a.ltf.coarse_fed == b.ltf.coarse_fed &&
         a.ltf.final_image == b.ltf.final_image;
}

TrainingSample make_training_sample(const ImageTensor& person, const ParsingMap& source,
                                    std::span<const Keypoint> keypoints, const ImageTensor& cloth,
                                    const BinaryMask& cloth_mask) {
  require_raster(person, 3, source.height(), source.width(), "make_training_sample: person");
  TrainingSample s;
  s.cloth = cloth;
  s.cloth_mask = cloth_mask;
  s.keypoints = render_keypoints(keypoints, source.height(), source.width());
  s.agnostic_mask = build_agnostic_mask(source);
  MaskedPerson masked = apply_agnostic_mask(person, source, s.agnostic_mask);
  s.masked_person = std::move(masked.image);
  s.masked_parsing = std::move(masked.parsing);
  s.cloth_mask_target = class_mask(source, {3});
  s.cloth_target = cloth_ground_truth(person, s.cloth_mask_target);
  s.parsing_target = source;
  s.image_target = person;
  return s;
}

std::map<std::string, double> loss_report(const TryOnBundle& b, const TryOnModel& model,
                                          const PipelineConfig& config) {
  const BinaryMask mask_gt = class_mask(b.parsing, {3});
  const ImageTensor cloth_gt = cloth_ground_truth(b.person, mask_gt);
  const ImageTensor soft_mask =
      warp_with_flow(b.mcw.prealigned.scaled_mask.to_tensor(), b.mcw.flow);
  const auto& fx = model.extractor();
  McwLossParts parts;
  parts.mask = mask_loss(soft_mask, mask_gt);
  parts.cloth = cloth_loss(b.mcw.warped, cloth_gt);
  parts.vgg = perceptual_loss(b.mcw.warped, cloth_gt, fx);
  parts.tv = tv_loss(b.mcw.flow);
  std::map<std::string, double> r;
  r["mask"] = parts.mask;
  r["cloth"] = parts.cloth;
  r["vgg"] = parts.vgg;
  r["tv"] = parts.tv;
  r["mcw"] = mcw_loss(parts, config.mcw_weights);
  r["cross_entropy"] =
      weighted_cross_entropy(b.hpe.probabilities, b.parsing, config.class_weights);
  r["coarse"] = composite_image_loss(b.ltf.coarse, b.person, fx, config.ltf_weights);
  r["fine"] = composite_image_loss(b.ltf.final_image, b.person, fx, config.ltf_weights);
  r["ltf"] = r["coarse"] + r["fine"];
  return r;
}

}  // namespace plvton
