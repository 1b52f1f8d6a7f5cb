#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/kmeans.hpp"

namespace vseg {

using Color = Eigen::Vector3d;

/// One full-covariance Gaussian with its mixture weight.
struct GaussianComponent {
  double weight = 0.0;
  Color mean = Color::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d inverse = Eigen::Matrix3d::Identity();
  double log_det = 0.0;

  /// -log(weight * N(x | mean, covariance)).
  double neg_log(const Color& x) const {
    const Color d = x - mean;
    return -std::log(weight) + 0.5 * (3.0 * std::log(2.0 * std::numbers::pi) + log_det + d.dot(inverse * d));
  }

  double density(const Color& x) const {
    const Color d = x - mean;
    return std::exp(-0.5 * d.dot(inverse * d)) / std::sqrt(std::pow(2.0 * std::numbers::pi, 3) * std::exp(log_det));
  }
};

struct GmmModel {
  std::vector<GaussianComponent> components;

  int size() const { return static_cast<int>(components.size()); }

  /// Component maximizing weight * density; ties go to the lowest index.
  int best_component(const Color& x) const {
    int best = 0;
    double cost = std::numeric_limits<double>::infinity();
    for (int k = 0; k < size(); ++k) {
      const double c = components[k].neg_log(x);
      if (c < cost) {
        cost = c;
        best = k;
      }
    }
    return best;
  }

  /// min_k -log(weight_k * N_k(x)).
  double neg_log_component(const Color& x) const { return components[best_component(x)].neg_log(x); }

  /// -log(sum_k weight_k * N_k(x)), computed stably from the per-component costs.
  double neg_log_mixture(const Color& x) const {
    double lo = std::numeric_limits<double>::infinity();
    std::vector<double> c(components.size());
    for (std::size_t k = 0; k < components.size(); ++k) {
      c[k] = components[k].neg_log(x);
      lo = std::min(lo, c[k]);
    }
    double s = 0.0;
    for (double v : c) s += std::exp(lo - v);
    return lo - std::log(s);
  }
};

inline constexpr double kCovarianceFloor = 1e-5;

/// Sample covariance with eigenvalues clipped from below at `floor`; this is the maximum-
/// likelihood covariance under the constraint covariance >= floor * I.
inline Eigen::Matrix3d floored_covariance(const Eigen::Matrix3d& sample, double floor = kCovarianceFloor) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(sample);
  const Color values = eig.eigenvalues().cwiseMax(floor);
  return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
}

/// Deterministic k-means on colors (farthest-point seeding, Lloyd to a 1e-6 shift or 50
/// iterations). Fewer distinct colors than K reduce K.
inline KMeansResult kmeans_init(std::span<const Color> pixels, int k) {
  if (pixels.empty()) throw insufficient_data_error("no pixels to cluster");
  if (k < 1) throw config_error("GMM needs at least one component");
  std::vector<double> flat;
  flat.reserve(pixels.size() * 3);
  for (const Color& p : pixels) flat.insert(flat.end(), {p[0], p[1], p[2]});
  KMeansOptions opt;
  opt.max_iterations = 50;
  opt.tolerance = 1e-6;
  return kmeans(flat, 3, std::min<int>(k, static_cast<int>(pixels.size())), opt);
}

/// Mean, floored covariance and weight n_k / N for each non-empty cluster in `labels`;
/// empty clusters are left out.
inline GmmModel gmm_from_clusters(std::span<const Color> pixels, std::span<const int> labels, int k,
                                  double floor = kCovarianceFloor) {
  if (pixels.size() != labels.size()) throw dimension_error("one cluster label per pixel expected");
  if (pixels.empty()) throw insufficient_data_error("no pixels to fit a GMM");
  std::vector<long long> count(k, 0);
  std::vector<Color> sum(k, Color::Zero());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= k) throw config_error("cluster label out of range");
    ++count[labels[i]];
    sum[labels[i]] += pixels[i];
  }
  std::vector<Eigen::Matrix3d> scatter(k, Eigen::Matrix3d::Zero());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const Color d = pixels[i] - sum[labels[i]] / static_cast<double>(count[labels[i]]);
    scatter[labels[i]] += d * d.transpose();
  }
  GmmModel model;
  const double n = static_cast<double>(pixels.size());
  for (int c = 0; c < k; ++c) {
    if (count[c] == 0) continue;
    GaussianComponent g;
    g.weight = count[c] / n;
    g.mean = sum[c] / static_cast<double>(count[c]);
    g.covariance = floored_covariance(scatter[c] / static_cast<double>(count[c]), floor);
    g.inverse = g.covariance.inverse();
    g.log_det = std::log(g.covariance.determinant());
    model.components.push_back(g);
  }
  return model;
}

/// k-means clustering followed by the per-cluster fit.
inline GmmModel fit_gmm(std::span<const Color> pixels, int k, double floor = kCovarianceFloor) {
  const KMeansResult km = kmeans_init(pixels, k);
  return gmm_from_clusters(pixels, km.labels, km.k, floor);
}

}  // namespace vseg
