// plvton_cli: file-level front end for the try-on stages.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "plvton/error.hpp"
#include "plvton/fixtures.hpp"
#include "plvton/flow.hpp"
#include "plvton/io.hpp"
#include "plvton/losses.hpp"
#include "plvton/pipeline.hpp"
#include "plvton/prealign.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace plvton;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::string out = "out";
};

struct InputPaths {
  std::string dir;
  std::string person;
  std::string parsing;
  std::string keypoints;
  std::string cloth;
  std::string cloth_mask;

  void resolve() {
    auto pick = [&](std::string& field, const char* name) {
      if (field.empty() && !dir.empty()) field = (fs::path(dir) / name).string();
    };
    pick(person, "I.png");
    pick(parsing, "P_s.png");
    pick(keypoints, "K.json");
    pick(cloth, "C.png");
    pick(cloth_mask, "M_c.png");
  }

  static std::string need(const std::string& path, const char* flag) {
    if (path.empty()) throw ParameterError(std::string("missing input: pass --input or ") + flag);
    return path;
  }
};

void add_input_flags(CLI::App* cmd, InputPaths& in) {
  cmd->add_option("--input", in.dir, "Directory holding I.png, P_s.png, K.json, C.png, M_c.png");
  cmd->add_option("--person", in.person, "Person image I (PNG)");
  cmd->add_option("--parsing", in.parsing, "Source parsing P_s (indexed PNG)");
  cmd->add_option("--keypoints", in.keypoints, "Keypoints JSON");
  cmd->add_option("--cloth", in.cloth, "In-shop clothing C (PNG)");
  cmd->add_option("--cloth-mask", in.cloth_mask, "Clothing mask M_c (PNG)");
}

/// Pending output file; nothing touches disk until every output is computed.
struct Outputs {
  std::vector<std::pair<fs::path, std::vector<std::uint8_t>>> files;

  void add(const fs::path& p, std::vector<std::uint8_t> bytes) {
    files.emplace_back(p, std::move(bytes));
  }
  void add_text(const fs::path& p, const std::string& text) {
    add(p, std::vector<std::uint8_t>(text.begin(), text.end()));
  }
  void commit() const {
    for (const auto& [p, bytes] : files) {
      fs::create_directories(p.parent_path());
      write_file_atomic(p, bytes);
    }
  }
};

Json config_json(const PipelineConfig& c) { return Json::parse(config_to_json(c)); }

/// Loads --config, then applies --seed and --mode. Without explicit size keys
/// the raster size follows the inputs.
PipelineConfig load_config(const GlobalOptions& g, int height, int width) {
  PipelineConfig c;
  bool has_size = false;
  if (!g.config_path.empty()) {
    const auto bytes = read_file_bytes(g.config_path);
    const std::string text(bytes.begin(), bytes.end());
    c = config_from_json(text);
    const Json raw = Json::parse(text);
    has_size = raw.contains("height") || raw.contains("width");
  }
  if (!has_size && height > 0) {
    c.height = height;
    c.width = width;
  }
  if (g.seed) c.seed = *g.seed;
  if (g.mode) c.mode = parse_run_mode(*g.mode);
  c.validate();
  return c;
}

Json inputs_json(const InputPaths& in) {
  Json j = Json::object();
  for (const auto& [k, v] : {std::pair<const char*, const std::string&>{"person", in.person},
                             {"parsing", in.parsing},
                             {"keypoints", in.keypoints},
                             {"cloth", in.cloth},
                             {"cloth_mask", in.cloth_mask}}) {
    if (!v.empty()) j[k] = v;
  }
  return j;
}

void add_manifest(Outputs& out, const fs::path& dir, const std::string& command,
                  const PipelineConfig& config, Json inputs, Json timings, Json losses) {
  Json m;
  m["command"] = command;
  m["config"] = config_json(config);
  m["seed"] = config.seed;
  m["inputs"] = std::move(inputs);
  Json outs = Json::array();
  for (const auto& f : out.files) outs.push_back(f.first.string());
  outs.push_back((dir / "manifest.json").string());
  m["outputs"] = std::move(outs);
  m["timings_ms"] = std::move(timings);
  m["losses"] = std::move(losses);
  out.add_text(dir / "manifest.json", m.dump(2) + "\n");
}

TryOnInputs read_inputs(InputPaths& in) {
  in.resolve();
  TryOnInputs t;
  t.person = read_png(InputPaths::need(in.person, "--person"));
  t.parsing = read_parsing_png(InputPaths::need(in.parsing, "--parsing"));
  t.keypoints = read_keypoints(InputPaths::need(in.keypoints, "--keypoints"));
  t.cloth = read_png(InputPaths::need(in.cloth, "--cloth"));
  t.cloth_mask = read_mask_png(InputPaths::need(in.cloth_mask, "--cloth-mask"));
  return t;
}

Json losses_json(const std::map<std::string, double>& report) {
  Json j = Json::object();
  for (const auto& [k, v] : report) j[k] = v;
  return j;
}

// ---------------------------------------------------------------------------

int cmd_fixtures(const GlobalOptions& g, int count, int height, int width) {
  if (count < 1) throw ParameterError("--count must be >= 1");
  const std::uint64_t seed = g.seed.value_or(42);
  std::vector<std::pair<fs::path, FixturePair>> pairs;
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
    const fs::path dir = count == 1 ? fs::path(g.out) : fs::path(g.out) / ("fixture_" + std::to_string(s));
    pairs.emplace_back(dir, make_fixture(s, height, width));
  }
  for (const auto& [dir, pair] : pairs) write_fixture(dir, pair);
  return 0;
}

int cmd_prealign(const GlobalOptions& g, InputPaths& in) {
  in.resolve();
  const ImageTensor cloth = read_png(InputPaths::need(in.cloth, "--cloth"));
  const BinaryMask mask = read_mask_png(InputPaths::need(in.cloth_mask, "--cloth-mask"));
  const ParsingMap parsing = read_parsing_png(InputPaths::need(in.parsing, "--parsing"));
  const PipelineConfig config = load_config(g, parsing.height(), parsing.width());
  const auto t0 = std::chrono::steady_clock::now();
  const PreAlignResult r = prealign(cloth, mask, parsing);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const fs::path dir = g.out;
  Outputs out;
  out.add(dir / "C_l.png", encode_png(r.shifted));
  out.add(dir / "C_s.png", encode_png(r.scaled));
  out.add(dir / "M_s.png", encode_png(r.scaled_mask.to_tensor()));
  Json info;
  info["shift"] = {r.shift_x, r.shift_y};
  info["ratio"] = r.ratio;
  info["source_height"] = r.source_height;
  info["target_height"] = r.target_height;
  out.add_text(dir / "prealign.json", info.dump(2) + "\n");
  add_manifest(out, dir, "prealign", config, inputs_json(in), Json{{"prealign", ms}},
               Json::object());
  out.commit();
  return 0;
}

int cmd_warp(const GlobalOptions& g, InputPaths& in, bool zero_flow) {
  in.resolve();
  const ImageTensor cloth = read_png(InputPaths::need(in.cloth, "--cloth"));
  const BinaryMask mask = read_mask_png(InputPaths::need(in.cloth_mask, "--cloth-mask"));
  const ParsingMap parsing = read_parsing_png(InputPaths::need(in.parsing, "--parsing"));
  const auto points = read_keypoints(InputPaths::need(in.keypoints, "--keypoints"));
  PipelineConfig config = load_config(g, parsing.height(), parsing.width());
  if (zero_flow) config.debug_zero_flow = true;
  const TryOnModel model(config);
  const KeypointMap k = render_keypoints(points, parsing.height(), parsing.width());
  const auto t0 = std::chrono::steady_clock::now();
  const McwResult r = run_mcw(model, cloth, mask, k, parsing, config);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  const fs::path dir = g.out;
  Outputs out;
  out.add(dir / "flow.plvf", encode_flow(r.flow));
  out.add(dir / "C_s.png", encode_png(r.prealigned.scaled));
  out.add(dir / "C_w.png", encode_png(r.warped));
  out.add(dir / "M_w.png", encode_png(r.warped_mask.to_tensor()));
  add_manifest(out, dir, "warp", config, inputs_json(in), Json{{"mcw", ms}},
               Json{{"tv", tv_loss(r.flow)}});
  out.commit();
  return 0;
}

int cmd_parse(const GlobalOptions& g, InputPaths& in) {
  const TryOnInputs inputs = read_inputs(in);
  const PipelineConfig config = load_config(g, inputs.person.height(), inputs.person.width());
  const TryOnModel model(config);
  const TryOnBundle b = run_pipeline(model, inputs, config);
  const fs::path dir = g.out;
  Outputs out;
  out.add(dir / "P_t.png", encode_parsing_png(b.hpe.parsing));
  out.add(dir / "C_w.png", encode_png(b.mcw.warped));
  const double ce = weighted_cross_entropy(b.hpe.probabilities, b.parsing, config.class_weights);
  add_manifest(out, dir, "parse", config, inputs_json(in),
               Json{{"mcw", b.timings.mcw_ms}, {"hpe", b.timings.hpe_ms}},
               Json{{"cross_entropy", ce}});
  out.commit();
  return 0;
}

void tryon_outputs(Outputs& out, const fs::path& dir, const TryOnBundle& b,
                   const TryOnModel& model, const PipelineConfig& config, const InputPaths& in) {
  out.add(dir / "C_w.png", encode_png(b.mcw.warped));
  out.add(dir / "P_t.png", encode_parsing_png(b.hpe.parsing));
  out.add(dir / "I_c.png", encode_png(b.ltf.coarse));
  out.add(dir / "I_f.png", encode_png(b.ltf.final_image));
  add_manifest(out, dir, "tryon", config, inputs_json(in),
               Json{{"mcw", b.timings.mcw_ms}, {"hpe", b.timings.hpe_ms}, {"ltf", b.timings.ltf_ms}},
               losses_json(loss_report(b, model, config)));
}

int cmd_tryon(const GlobalOptions& g, InputPaths& in, const std::string& pairs_file, int jobs) {
  if (pairs_file.empty()) {
    const TryOnInputs inputs = read_inputs(in);
    const PipelineConfig config = load_config(g, inputs.person.height(), inputs.person.width());
    const TryOnModel model(config);
    const TryOnBundle b = run_pipeline(model, inputs, config);
    Outputs out;
    tryon_outputs(out, g.out, b, model, config, in);
    out.commit();
    return 0;
  }
  if (jobs < 1) throw ParameterError("--jobs must be >= 1");
  std::vector<std::string> dirs;
  {
    std::ifstream f(pairs_file);
    if (!f) throw IoError("cannot open '" + pairs_file + "'");
    for (std::string line; std::getline(f, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line.front() != '#') dirs.push_back(line);
    }
  }
  if (dirs.empty()) throw ParameterError("pairs file lists no input directories");

  // Inputs are read up front so a bad pair fails before any work is written.
  std::vector<InputPaths> paths(dirs.size());
  std::vector<TryOnInputs> inputs(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    paths[i].dir = dirs[i];
    inputs[i] = read_inputs(paths[i]);
  }
  const PipelineConfig config = load_config(g, inputs[0].person.height(), inputs[0].person.width());
  const TryOnModel model(config);
  std::vector<Outputs> outs(dirs.size());
  std::vector<std::exception_ptr> errors(dirs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < dirs.size(); i = next++) {
      try {
        const TryOnBundle b = run_pipeline(model, inputs[i], config);
        tryon_outputs(outs[i], fs::path(g.out) / fs::path(dirs[i]).filename(), b, model, config,
                      paths[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  const int n = std::min<int>(jobs, static_cast<int>(dirs.size()));
  for (int t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& o : outs) o.commit();
  return 0;
}

int cmd_losses(const GlobalOptions& g, const std::string& pred, const std::string& target,
               const std::string& flow_path, const std::string& parsing_pred,
               const std::string& parsing_target) {
  Json report = Json::object();
  std::map<std::string, double> values;
  PipelineConfig config = load_config(g, 0, 0);
  const PerceptualExtractor extractor;
  if (!pred.empty() || !target.empty()) {
    if (pred.empty() || target.empty()) throw ParameterError("--pred and --target go together");
    const ImageTensor a = read_png(pred);
    const ImageTensor b = read_png(target);
    if (!a.same_shape(b)) {
      throw DimensionError("pred " + a.shape_string() + " and target " + b.shape_string() +
                           " differ in shape");
    }
    values["mask"] = mask_loss(read_mask_png(pred).to_tensor(), read_mask_png(target));
    values["cloth"] = cloth_loss(a, b);
    values["vgg"] = perceptual_loss(a, b, extractor);
    values["edge"] = edge_loss(a, b);
    values["composite"] = composite_image_loss(a, b, extractor, config.ltf_weights);
  }
  if (!flow_path.empty()) values["tv"] = tv_loss(read_flow(flow_path));
  if (!parsing_pred.empty() || !parsing_target.empty()) {
    if (parsing_pred.empty() || parsing_target.empty()) {
      throw ParameterError("--parsing-pred and --parsing-target go together");
    }
    const ParsingMap p = read_parsing_png(parsing_pred);
    const ParsingMap t = read_parsing_png(parsing_target);
    values["cross_entropy"] = weighted_cross_entropy(p.to_one_hot(), t, config.class_weights);
  }
  if (values.empty()) throw ParameterError("nothing to compare: pass --pred/--target, --flow or --parsing-pred/--parsing-target");
  for (const auto& [k, v] : values) report[k] = v;
  Outputs out;
  out.add_text(fs::path(g.out) / "losses.json", report.dump(2) + "\n");
  out.commit();
  return 0;
}

void report_error(std::string_view code, const std::string& message) {
  std::cerr << Json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PL-VTON toy pipeline: pre-alignment, flow warping, parsing and texture fusion"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--config", g.config_path, "Pipeline config JSON (default: built-in config)");
  app.add_option("--seed", g.seed, "Seed for network weights and fixtures (default 42)");
  app.add_option("--mode", g.mode, "train or eval (default eval)")
      ->check(CLI::IsMember({"train", "eval"}));
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  InputPaths in;

  int count = 1;
  int height = 96;
  int width = 64;
  auto* fixtures = app.add_subcommand("fixtures", "Write synthetic person/clothing pairs");
  fixtures->add_option("--count", count, "Number of pairs")->capture_default_str();
  fixtures->add_option("--height", height, "Raster height")->capture_default_str();
  fixtures->add_option("--width", width, "Raster width")->capture_default_str();

  auto* pre = app.add_subcommand("prealign", "Shift and scale clothing onto the person (C_l, C_s)");
  add_input_flags(pre, in);

  bool zero_flow = false;
  auto* warp = app.add_subcommand("warp", "Predict and apply the aggregated flow (C_w, M_w, flow)");
  add_input_flags(warp, in);
  warp->add_flag("--zero-flow", zero_flow, "Force zero sub-flows (identity warp)");

  auto* parse = app.add_subcommand("parse", "Predict the target parsing map P_t");
  add_input_flags(parse, in);

  std::string pairs_file;
  int jobs = 1;
  auto* tryon = app.add_subcommand("tryon", "Run the full pipeline (I_c, I_f)");
  add_input_flags(tryon, in);
  tryon->add_option("--pairs", pairs_file, "File listing one input directory per line");
  tryon->add_option("--jobs", jobs, "Parallel workers over --pairs")->capture_default_str();

  std::string pred, target, flow_path, parsing_pred, parsing_target;
  auto* losses = app.add_subcommand("losses", "Loss report between rasters (losses.json)");
  losses->add_option("--pred", pred, "Predicted image (PNG)");
  losses->add_option("--target", target, "Target image (PNG)");
  losses->add_option("--flow", flow_path, "Flow file for total variation (PLVF)");
  losses->add_option("--parsing-pred", parsing_pred, "Predicted parsing (indexed PNG)");
  losses->add_option("--parsing-target", parsing_target, "Target parsing (indexed PNG)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage_error", e.what());
    return 1;
  }

  try {
    if (*fixtures) return cmd_fixtures(g, count, height, width);
    if (*pre) return cmd_prealign(g, in);
    if (*warp) return cmd_warp(g, in, zero_flow);
    if (*parse) return cmd_parse(g, in);
    if (*tryon) return cmd_tryon(g, in, pairs_file, jobs);
    if (*losses) return cmd_losses(g, pred, target, flow_path, parsing_pred, parsing_target);
  } catch (const InvariantError& e) {
    report_error(error_code_name(e.code()), e.what());
    return 2;
  } catch (const Error& e) {
    report_error(error_code_name(e.code()), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    report_error("io_error", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("internal_error", e.what());
    return 2;
  }
  return 1;
}
