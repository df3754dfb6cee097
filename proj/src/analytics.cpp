#include "kpirl/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "kpirl/text_io.hpp"

namespace kpirl {

Eigen::MatrixXd distance_matrix(const std::vector<RkhsVector>& vectors, const KernelSpec& spec) {
  const Eigen::Index n = static_cast<Eigen::Index>(vectors.size());
  if (n == 0) throw std::invalid_argument("distance_matrix: empty set");
  Eigen::MatrixXd g = gram_vectors(vectors, spec);
  return gram_to_distances(g);
}

Eigen::MatrixXd distance_matrix(const LabeledSet& set) {
  return distance_matrix(set.vectors, set.spec);
}

Eigen::MatrixXd gram_to_distances(const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double sq = gram(i, i) - 2.0 * gram(i, j) + gram(j, j);
      double v = std::sqrt(std::max(0.0, sq));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

Eigen::MatrixXd svm_gram(const LabeledSet& set, SvmKernelMode mode) {
  Eigen::MatrixXd g = gram_vectors(set.vectors, set.spec);
  if (mode == SvmKernelMode::linear_in_h) return g;

  // Gaussian of the RKHS distance with the median pairwise distance as
  // bandwidth.
  Eigen::MatrixXd d = gram_to_distances(g);
  std::vector<double> off;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.cols(); ++j) off.push_back(d(i, j));
  double bw = 1.0;
  if (!off.empty()) {
    std::sort(off.begin(), off.end());
    std::size_t m = off.size();
    bw = m % 2 == 1 ? off[m / 2] : 0.5 * (off[m / 2 - 1] + off[m / 2]);
    if (bw <= 0.0) bw = 1.0;
  }
  return (-(d.array().square()) / (2.0 * bw * bw)).exp();
}

LooResult loo_evaluate(const LabeledSet& set, double C, SvmKernelMode mode,
                       const SmoParams& smo) {
  const int n = static_cast<int>(set.size());
  const int classes = 3;
  if (n < classes + 1)
    throw std::invalid_argument("loo_evaluate: need at least classes+1 items");

  Eigen::MatrixXd full = svm_gram(set, mode);
  LooResult out;
  out.confusion = Eigen::MatrixXi::Zero(classes, classes);
  out.predictions.resize(static_cast<std::size_t>(n));

  int correct = 0;
  for (int held = 0; held < n; ++held) {
    std::vector<int> keep;
    for (int i = 0; i < n; ++i)
      if (i != held) keep.push_back(i);
    const int m = static_cast<int>(keep.size());
    Eigen::MatrixXd sub(m, m);
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (int r = 0; r < m; ++r) {
      labels[static_cast<std::size_t>(r)] =
          static_cast<int>(set.labels[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])]);
      for (int c = 0; c < m; ++c)
        sub(r, c) = full(keep[static_cast<std::size_t>(r)], keep[static_cast<std::size_t>(c)]);
    }
    OvoSvm model = svm_train_ovo(sub, labels, C, smo);
    Eigen::VectorXd row(m);
    for (int r = 0; r < m; ++r) row[r] = full(held, keep[static_cast<std::size_t>(r)]);
    int predicted = ovo_predict(model, row);
    int truth = static_cast<int>(set.labels[static_cast<std::size_t>(held)]);
    out.predictions[static_cast<std::size_t>(held)] = predicted;
    out.confusion(truth, predicted) += 1;
    if (predicted == truth) ++correct;
  }
  out.accuracy = static_cast<double>(correct) / n;
  return out;
}

ClusterReport cluster_report(const Dendrogram& dendrogram, const std::vector<Strategy>& labels,
                             int k) {
  if (static_cast<int>(labels.size()) != dendrogram.leaf_count)
    throw std::invalid_argument("cluster_report: label count mismatch");
  ClusterReport report;
  report.cluster_count = k;
  report.assignment = cut_clusters(dendrogram, k);
  report.composition = Eigen::MatrixXi::Zero(k, 3);
  for (std::size_t i = 0; i < labels.size(); ++i)
    report.composition(report.assignment[i], static_cast<int>(labels[i])) += 1;

  report.concentration = Eigen::MatrixXd::Zero(k, 3);
  for (int l = 0; l < 3; ++l) {
    int total = report.composition.col(l).sum();
    if (total == 0) continue;
    for (int c = 0; c < k; ++c)
      report.concentration(c, l) =
          100.0 * static_cast<double>(report.composition(c, l)) / total;
  }
  return report;
}

std::string format_cluster_report(const ClusterReport& report) {
  const char* names[3] = {"assault", "flank", "fallback"};
  std::string out = "cluster";
  for (const char* n : names) out += std::string(" ") + n;
  out += '\n';
  for (int c = 0; c < report.cluster_count; ++c) {
    out += std::to_string(c + 1);
    for (int l = 0; l < 3; ++l) out += ' ' + std::to_string(report.composition(c, l));
    out += '\n';
  }
  out += "label concentration (% of each label per cluster)\n";
  for (int c = 0; c < report.cluster_count; ++c) {
    out += std::to_string(c + 1);
    for (int l = 0; l < 3; ++l) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %.1f", report.concentration(c, l));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string format_confusion(const LooResult& result) {
  const char* names[3] = {"assault", "flank", "fallback"};
  std::string out = "true\\pred";
  for (const char* n : names) out += std::string(" ") + n;
  out += '\n';
  for (int t = 0; t < 3; ++t) {
    out += names[t];
    for (int p = 0; p < 3; ++p) out += ' ' + std::to_string(result.confusion(t, p));
    out += '\n';
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "overall accuracy %.4f\n", result.accuracy);
  out += buf;
  return out;
}

}  // namespace kpirl
