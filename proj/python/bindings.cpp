#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "plvton/error.hpp"
#include "plvton/fixtures.hpp"
#include "plvton/flow.hpp"
#include "plvton/losses.hpp"
#include "plvton/pipeline.hpp"
#include "plvton/prealign.hpp"

namespace py = pybind11;
using namespace plvton;

namespace {

using F64 = py::array_t<double, py::array::c_style | py::array::forcecast>;
using U8 = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

ImageTensor to_tensor(const F64& a) {
  if (a.ndim() != 3) throw DimensionError("expected a (C, H, W) array");
  const auto c = static_cast<int>(a.shape(0)), h = static_cast<int>(a.shape(1)),
             w = static_cast<int>(a.shape(2));
  return ImageTensor(c, h, w, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> from_tensor(const ImageTensor& t) {
  py::array_t<double> out({t.channels(), t.height(), t.width()});
  std::memcpy(out.mutable_data(), t.values().data(), t.size() * sizeof(double));
  return out;
}

BinaryMask to_mask(const U8& a) {
  if (a.ndim() != 2) throw DimensionError("expected an (H, W) mask");
  BinaryMask m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  auto r = a.unchecked<2>();
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) m.set(y, x, r(y, x) != 0);
  }
  return m;
}

py::array_t<bool> from_mask(const BinaryMask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  auto w = out.mutable_unchecked<2>();
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) w(y, x) = m.at(y, x);
  }
  return out;
}

ParsingMap to_parsing(const U8& a) {
  if (a.ndim() != 2) throw DimensionError("expected an (H, W) label map");
  return ParsingMap(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
                    std::vector<std::uint8_t>(a.data(), a.data() + a.size()));
}

py::array_t<std::uint8_t> from_parsing(const ParsingMap& p) {
  py::array_t<std::uint8_t> out({p.height(), p.width()});
  std::memcpy(out.mutable_data(), p.labels().data(), p.labels().size());
  return out;
}

py::list from_keypoints(const std::vector<Keypoint>& ks) {
  py::list out;
  for (const Keypoint& k : ks) out.append(py::make_tuple(k.id, k.x, k.y));
  return out;
}

std::vector<Keypoint> to_keypoints(const py::iterable& items) {
  std::vector<Keypoint> out;
  for (const auto& item : items) {
    const auto t = item.cast<py::tuple>();
    Keypoint k;
    k.id = t[0].cast<int>();
    k.x = t[1].cast<decltype(k.x)>();
    k.y = t[2].cast<decltype(k.y)>();
    out.push_back(k);
  }
  return out;
}

py::dict fixture_dict(const FixturePair& f) {
  py::dict d;
  d["person"] = from_tensor(f.person);
  d["parsing"] = from_parsing(f.parsing);
  d["keypoints"] = from_keypoints(f.keypoints);
  d["cloth"] = from_tensor(f.cloth);
  d["cloth_mask"] = from_mask(f.cloth_mask);
  return d;
}

}  // namespace

PYBIND11_MODULE(_plvton, m) {
  m.doc() = "Toy-scale parser-free virtual try-on pipeline";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
  py::register_exception<EmptyRegionError>(m, "EmptyRegionError", base.ptr());
  py::register_exception<StructureError>(m, "StructureError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<IoError>(m, "IoError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());

  m.def("make_fixture", [](std::uint64_t seed, int height, int width) {
    return fixture_dict(make_fixture(seed, height, width));
  }, py::arg("seed"), py::arg("height") = 96, py::arg("width") = 64);

  m.def("prealign", [](const F64& cloth, const U8& mask, const U8& parsing) {
    const PreAlignResult r = prealign(to_tensor(cloth), to_mask(mask), to_parsing(parsing));
    py::dict d;
    d["shifted"] = from_tensor(r.shifted);
    d["shifted_mask"] = from_mask(r.shifted_mask);
    d["scaled"] = from_tensor(r.scaled);
    d["scaled_mask"] = from_mask(r.scaled_mask);
    d["shift"] = py::make_tuple(r.shift_x, r.shift_y);
    d["ratio"] = r.ratio;
    d["source_height"] = r.source_height;
    d["target_height"] = r.target_height;
    return d;
  }, py::arg("cloth"), py::arg("cloth_mask"), py::arg("parsing"));

  m.def("warp", [](const F64& src, const F64& flow) {
    return from_tensor(warp_with_flow(to_tensor(src), AppearanceFlow(to_tensor(flow))));
  }, py::arg("src"), py::arg("flow"), "Backward-warps src (C, H, W) by a (2, H, W) flow.");

  m.def("pyramid_level_sizes", [](int h, int w, const std::string& mode) {
    return pyramid_level_sizes(h, w, parse_pyramid_mode(mode));
  }, py::arg("height"), py::arg("width"), py::arg("mode") = "literal");

  m.def("tv_loss", [](const F64& flow) { return tv_loss(AppearanceFlow(to_tensor(flow))); });
  m.def("tv_loss_gradient", [](const F64& flow) {
    return from_tensor(tv_loss_gradient(AppearanceFlow(to_tensor(flow))));
  });
  m.def("weighted_cross_entropy", [](const F64& probs, const U8& target) {
    return weighted_cross_entropy(to_tensor(probs), to_parsing(target));
  }, py::arg("probabilities"), py::arg("target"));

  m.def("frechet_distance", [](const Eigen::VectorXd& mu1, const Eigen::MatrixXd& s1,
                               const Eigen::VectorXd& mu2, const Eigen::MatrixXd& s2) {
    return frechet_distance({mu1, s1}, {mu2, s2});
  }, py::arg("mu1"), py::arg("sigma1"), py::arg("mu2"), py::arg("sigma2"));

  m.def("tryon", [](const py::dict& inputs, const std::string& config_json) {
    PipelineConfig config = config_from_json(config_json);
    TryOnInputs in{to_tensor(inputs["cloth"].cast<F64>()), to_mask(inputs["cloth_mask"].cast<U8>()),
                   to_keypoints(inputs["keypoints"]), to_parsing(inputs["parsing"].cast<U8>()),
                   to_tensor(inputs["person"].cast<F64>())};
    TryOnBundle b;
    {
      py::gil_scoped_release release;
      b = run_pipeline(TryOnModel(config), in, config);
      check_bundle(b);
    }
    py::dict d;
    d["C_s"] = from_tensor(b.mcw.prealigned.scaled);
    d["flow"] = from_tensor(b.mcw.flow.tensor());
    d["C_w"] = from_tensor(b.mcw.warped);
    d["P_t"] = from_parsing(b.hpe.parsing);
    d["L"] = from_tensor(b.ltf.limb.image);
    d["I_c"] = from_tensor(b.ltf.coarse);
    d["I_f"] = from_tensor(b.ltf.final_image);
    return d;
  }, py::arg("inputs"), py::arg("config_json") = "{}",
     "Runs the full pipeline on a dict shaped like make_fixture's output.");
}
