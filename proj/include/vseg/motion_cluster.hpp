#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "vseg/error.hpp"
#include "vseg/kmeans.hpp"
#include "vseg/parallel.hpp"
#include "vseg/tracker.hpp"

namespace vseg {

/// Column j stacks (x_1, y_1, ..., x_F, y_F) of trajectory ids[j], with each column's x
/// entries and y entries centered on their own means.
struct TrajectoryMatrix {
  Eigen::MatrixXd data;       // 2F x N
  std::vector<int> ids;       // column -> index into the source trajectory list
  std::vector<int> excluded;  // trajectories not alive for the whole window
  int frames = 0;

  int columns() const { return static_cast<int>(data.cols()); }
};

struct SscParams {
  double lambda_rel = 20.0;  // residual weight relative to the column's largest correlation
  int iterations = 200;      // ADMM iteration cap per column
  double rho = 10.0;         // ADMM penalty
  double tolerance = 1e-6;   // primal feasibility at convergence
  // Restrict codes to affine combinations (sum of coefficients = 1). Keeps columns of one
  // rigid motion self-expressive when a static background centers to (near) zero.
  bool affine = true;
};

struct SparseCodes {
  Eigen::MatrixXd coefficients;    // N x N, zero diagonal
  std::vector<double> residuals;   // ||y_i - Y c_i||^2 per column
  bool converged = true;           // false: some column hit the iteration cap
  int unconverged_columns = 0;
};

/// Per-trajectory cluster ids plus a foreground flag per cluster; exactly one cluster is
/// background.
struct MotionLabels {
  int k = 0;
  std::vector<int> cluster;                  // per matrix column
  std::vector<std::uint8_t> foreground;      // per cluster
  std::vector<double> cluster_residual;      // translation-fit residual per cluster

  bool is_foreground(int column) const { return foreground.at(cluster.at(column)) != 0; }
};

/// Collects trajectories alive for the whole window into a centered 2F x N matrix. Needs at
/// least k+1 of them.
inline TrajectoryMatrix build_trajectory_matrix(const std::vector<Trajectory>& trajectories, int k = 2) {
  TrajectoryMatrix m;
  int frames = -1;
  for (std::size_t i = 0; i < trajectories.size(); ++i) {
    const Trajectory& t = trajectories[i];
    if (!t.alive_throughout()) {
      m.excluded.push_back(static_cast<int>(i));
      continue;
    }
    if (frames < 0) frames = t.length();
    if (t.length() != frames) throw dimension_error("trajectories of one window must share a length");
    m.ids.push_back(static_cast<int>(i));
  }
  if (static_cast<int>(m.ids.size()) < k + 1) {
    throw insufficient_data_error("only " + std::to_string(m.ids.size()) + " trajectories survive the window, need " +
                                  std::to_string(k + 1));
  }
  m.frames = frames;
  m.data.resize(2 * frames, static_cast<Eigen::Index>(m.ids.size()));
  for (std::size_t j = 0; j < m.ids.size(); ++j) {
    const Trajectory& t = trajectories[m.ids[j]];
    double mx = 0.0, my = 0.0;
    for (const Point2& p : t.positions) {
      mx += p.x;
      my += p.y;
    }
    mx /= frames;
    my /= frames;
    for (int f = 0; f < frames; ++f) {
      m.data(2 * f, static_cast<Eigen::Index>(j)) = t.positions[f].x - mx;
      m.data(2 * f + 1, static_cast<Eigen::Index>(j)) = t.positions[f].y - my;
    }
  }
  return m;
}

/// Sparse self-representation: for every column y_i minimize
///   lambda_i * ||y_i - Y c||^2 + ||c||_1,  c_i = 0  (and 1'c = 1 when affine)
/// with lambda_i = lambda_rel / max_{j != i} |y_i' y_j|, by ADMM. The c-update uses the
/// Woodbury identity, so each iteration costs O(rows * N).
inline SparseCodes ssc_sparse_codes(const Eigen::MatrixXd& Y, const SscParams& params = {}, int threads = 1) {
  const Eigen::Index n = Y.cols();
  const Eigen::Index d = Y.rows();
  if (n < 2) throw insufficient_data_error("sparse coding needs at least 2 columns");
  if (params.lambda_rel <= 0 || params.rho <= 0) throw config_error("SSC weights must be positive");

  const Eigen::MatrixXd gram = Y.transpose() * Y;
  std::vector<double> mu(n, 0.0);
  double mu_max = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) mu[i] = std::max(mu[i], std::abs(gram(i, j)));
    }
    mu_max = std::max(mu_max, mu[i]);
  }

  SparseCodes out;
  out.coefficients = Eigen::MatrixXd::Zero(n, n);
  out.residuals.assign(n, 0.0);
  std::vector<std::uint8_t> converged(n, 1);
  const double rho = params.rho;
  const double shrink = 1.0 / rho;
  const Eigen::Index m = params.affine ? d + 1 : d;

  parallel_for(static_cast<int>(n), threads, [&](int i) {
    const double mu_i = mu[i] > 0 ? mu[i] : (mu_max > 0 ? mu_max : 1.0);
    const double lambda = params.lambda_rel / mu_i;
    Eigen::MatrixXd A(m, n);
    A.topRows(d) = std::sqrt(2.0 * lambda) * Y;
    if (params.affine) A.row(d).setConstant(std::sqrt(rho));
    const Eigen::MatrixXd small = rho * Eigen::MatrixXd::Identity(m, m) + A * A.transpose();
    const Eigen::LDLT<Eigen::MatrixXd> solver(small);
    const Eigen::VectorXd yty = 2.0 * lambda * gram.col(i);

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    double delta = 0.0;
    bool done = false;
    for (int iter = 0; iter < params.iterations; ++iter) {
      Eigen::VectorXd rhs = yty + rho * (z - u);
      if (params.affine) rhs.array() += rho * (1.0 - delta);
      c = (rhs - A.transpose() * solver.solve(A * rhs)) / rho;
      const Eigen::VectorXd z_prev = z;
      const Eigen::VectorXd v = c + u;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double a = std::abs(v[j]) - shrink;
        z[j] = a > 0 ? std::copysign(a, v[j]) : 0.0;
      }
      z[i] = 0.0;
      u += c - z;
      double primal = (c - z).cwiseAbs().maxCoeff();
      if (params.affine) {
        const double gap = c.sum() - 1.0;
        delta += gap;
        primal = std::max(primal, std::abs(gap));
      }
      const double dual = (z - z_prev).cwiseAbs().maxCoeff();
      if (primal < params.tolerance && dual < params.tolerance) {
        done = true;
        break;
      }
    }
    converged[i] = done;
    out.coefficients.col(i) = z;
    out.residuals[i] = (Y.col(i) - Y * z).squaredNorm();
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!converged[i]) ++out.unconverged_columns;
  }
  out.converged = out.unconverged_columns == 0;
  return out;
}

/// W = |C| + |C|' after scaling each column of |C| to a maximum of 1.
inline Eigen::MatrixXd build_affinity(const Eigen::MatrixXd& coefficients) {
  Eigen::MatrixXd a = coefficients.cwiseAbs();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double mx = a.col(j).maxCoeff();
    if (mx > 0) a.col(j) /= mx;
  }
  Eigen::MatrixXd w = a + a.transpose();
  return w;
}

/// Normalized spectral clustering: k bottom eigenvectors of I - D^-1/2 W D^-1/2, rows
/// normalized, then deterministic k-means. Labels are renumbered by first appearance.
inline std::vector<int> spectral_cluster(const Eigen::MatrixXd& W, int k) {
  const Eigen::Index n = W.rows();
  if (W.cols() != n) throw dimension_error("affinity must be square");
  if (k < 2) throw config_error("spectral clustering needs k >= 2");
  if (n < k) throw insufficient_data_error("fewer points than clusters");
  if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, W.cwiseAbs().maxCoeff())) {
    throw data_error("affinity must be symmetric");
  }
  if (W.minCoeff() < 0) throw data_error("affinity must be nonnegative");
  if (W.maxCoeff() <= 0) throw degenerate_affinity_error("affinity has no edges");

  Eigen::VectorXd inv_sqrt_deg(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double deg = W.row(i).sum();
    inv_sqrt_deg[i] = deg > 0 ? 1.0 / std::sqrt(deg) : 0.0;
  }
  Eigen::MatrixXd lap = -(inv_sqrt_deg.asDiagonal() * W * inv_sqrt_deg.asDiagonal());
  lap.diagonal().array() += 1.0;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
  if (eig.info() != Eigen::Success) throw error("eigen-decomposition failed");
  Eigen::MatrixXd embed = eig.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0) embed.row(i) /= norm;
  }
  std::vector<double> pts(static_cast<std::size_t>(n) * k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int c = 0; c < k; ++c) pts[static_cast<std::size_t>(i) * k + c] = embed(i, c);
  }
  KMeansOptions opt;
  opt.force_k = true;
  opt.max_iterations = 100;
  const KMeansResult km = kmeans(pts, k, k, opt);
  std::vector<int> remap(k, -1);
  int next = 0;
  std::vector<int> labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int& r = remap[km.labels[i]];
    if (r < 0) r = next++;
    labels[i] = r;
  }
  return labels;
}

struct ForegroundParams {
  // Residuals (px^2 per frame step) count as tied, and population decides, when they differ by
  // at most tie_tolerance or by at most tie_relative times the larger one. Tracking noise alone
  // gives every rigid group about the same residual.
  double tie_tolerance = 0.01;
  double tie_relative = 0.5;
};

/// Marks the cluster best explained by a single translation as background (largest population
/// on ties, then lowest id); every other cluster is foreground.
inline MotionLabels select_foreground(const std::vector<int>& labels, const TrajectoryMatrix& matrix,
                                      const std::vector<Trajectory>& trajectories,
                                      const ForegroundParams& params = {}) {
  if (labels.size() != matrix.ids.size()) throw dimension_error("labels do not match the trajectory matrix");
  MotionLabels out;
  out.cluster = labels;
  out.k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (out.k < 2) throw data_error("foreground selection needs at least 2 clusters");
  const int steps = matrix.frames - 1;
  std::vector<int> population(out.k, 0);
  std::vector<double> mean(static_cast<std::size_t>(out.k) * std::max(steps, 0) * 2, 0.0);
  auto disp = [&](int column, int t, int axis) {
    const Trajectory& tr = trajectories[matrix.ids[column]];
    return axis == 0 ? tr.positions[t + 1].x - tr.positions[t].x : tr.positions[t + 1].y - tr.positions[t].y;
  };
  for (std::size_t j = 0; j < labels.size(); ++j) {
    ++population[labels[j]];
    for (int t = 0; t < steps; ++t) {
      for (int a = 0; a < 2; ++a) mean[(static_cast<std::size_t>(labels[j]) * steps + t) * 2 + a] += disp(static_cast<int>(j), t, a);
    }
  }
  for (int c = 0; c < out.k; ++c) {
    if (population[c] == 0) continue;
    for (int i = 0; i < steps * 2; ++i) mean[static_cast<std::size_t>(c) * steps * 2 + i] /= population[c];
  }
  out.cluster_residual.assign(out.k, 0.0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    for (int t = 0; t < steps; ++t) {
      for (int a = 0; a < 2; ++a) {
        const double e = disp(static_cast<int>(j), t, a) - mean[(static_cast<std::size_t>(labels[j]) * steps + t) * 2 + a];
        out.cluster_residual[labels[j]] += e * e;
      }
    }
  }
  for (int c = 0; c < out.k; ++c) {
    if (population[c] > 0 && steps > 0) out.cluster_residual[c] /= static_cast<double>(population[c]) * steps;
  }
  int background = -1;
  for (int c = 0; c < out.k; ++c) {
    if (population[c] == 0) continue;
    if (background < 0) {
      background = c;
      continue;
    }
    const double diff = out.cluster_residual[c] - out.cluster_residual[background];
    const double tol = std::max(params.tie_tolerance,
                                params.tie_relative * std::max(out.cluster_residual[c], out.cluster_residual[background]));
    if (diff < -tol || (std::abs(diff) <= tol && population[c] > population[background])) {
      background = c;
    }
  }
  out.foreground.assign(out.k, 1);
  out.foreground[background] = 0;
  return out;
}

struct MotionClusterParams {
  int k = 2;
  SscParams ssc;
  ForegroundParams foreground;
};

/// Result of clustering one tracking window.
struct WindowMotion {
  TrajectoryMatrix matrix;
  SparseCodes codes;
  MotionLabels labels;
};

/// build_trajectory_matrix -> ssc_sparse_codes -> build_affinity -> spectral_cluster ->
/// select_foreground.
inline WindowMotion cluster_motion(const std::vector<Trajectory>& trajectories, const MotionClusterParams& params,
                                   int threads = 1) {
  WindowMotion out;
  out.matrix = build_trajectory_matrix(trajectories, params.k);
  out.codes = ssc_sparse_codes(out.matrix.data, params.ssc, threads);
  const auto labels = spectral_cluster(build_affinity(out.codes.coefficients), params.k);
  out.labels = select_foreground(labels, out.matrix, trajectories, params.foreground);
  return out;
}

}  // namespace vseg
