#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "plvton/error.hpp"
#include "plvton/losses.hpp"

namespace plvton {

namespace {

constexpr double kPsdTolerance = 1e-8;

void check_stats(const GaussianStats& s, const char* which) {
  const auto d = s.mean.size();
  if (d == 0 || s.cov.rows() != d || s.cov.cols() != d) {
    throw DimensionError(std::string("frechet_distance: malformed statistics ") + which);
  }
  const double scale = std::max(1.0, s.cov.cwiseAbs().maxCoeff());
  if ((s.cov - s.cov.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValidationError(std::string("frechet_distance: covariance is not symmetric in ") + which);
  }
}

// Symmetric square root; throws when an eigenvalue is negative beyond tolerance.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* which) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw ValidationError(std::string("frechet_distance: eigendecomposition failed for ") + which);
  }
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -kPsdTolerance * scale) {
      throw ValidationError(std::string("frechet_distance: covariance ") + which +
                            " is not positive semi-definite (eigenvalue " +
                            std::to_string(ev(i)) + ")");
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  check_stats(a, "a");
  check_stats(b, "b");
  if (a.mean.size() != b.mean.size()) {
    throw DimensionError("frechet_distance: dimension mismatch " +
                         std::to_string(a.mean.size()) + " vs " + std::to_string(b.mean.size()));
  }
  const Eigen::MatrixXd root_a = psd_sqrt(a.cov, "a");
  psd_sqrt(b.cov, "b");  // validates b
  Eigen::MatrixXd inner = root_a * b.cov * root_a;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner, Eigen::EigenvaluesOnly);
  double trace_root = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    trace_root += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  }
  const double d = (a.mean - b.mean).squaredNorm() + a.cov.trace() + b.cov.trace() -
                   2.0 * trace_root;
  return std::max(d, 0.0);
}

GaussianStats gaussian_stats(const Eigen::MatrixXd& samples) {
  if (samples.rows() < 2 || samples.cols() < 1) {
    throw ParameterError("gaussian_stats: need at least two samples");
  }
  GaussianStats s;
  s.mean = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - s.mean.transpose();
  s.cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  return s;
}

Eigen::VectorXd perceptual_embedding(const PerceptualExtractor& extractor,
                                     const ImageTensor& image) {
  const auto levels = extractor.features(image);
  Eigen::Index dim = 0;
  for (const auto& l : levels) dim += l.channels();
  Eigen::VectorXd e(dim);
  Eigen::Index i = 0;
  for (const auto& l : levels) {
    for (int c = 0; c < l.channels(); ++c) {
      double s = 0.0;
      for (double v : l.plane(c)) s += v;
      e(i++) = s / static_cast<double>(l.plane_size());
    }
  }
  return e;
}

GaussianStats feature_statistics(const PerceptualExtractor& extractor,
                                 std::span<const ImageTensor> images) {
  if (images.size() < 2) throw ParameterError("feature_statistics: need at least two images");
  Eigen::MatrixXd rows;
  for (std::size_t n = 0; n < images.size(); ++n) {
    const Eigen::VectorXd e = perceptual_embedding(extractor, images[n]);
    if (n == 0) rows.resize(static_cast<Eigen::Index>(images.size()), e.size());
    rows.row(static_cast<Eigen::Index>(n)) = e.transpose();
  }
  return gaussian_stats(rows);
}

}  // namespace plvton
