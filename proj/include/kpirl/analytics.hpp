#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "kpirl/hac.hpp"
#include "kpirl/rkhs.hpp"
#include "kpirl/svm.hpp"
#include "kpirl/trajectory.hpp"

namespace kpirl {

// A per-match collection of RKHS vectors under one shared kernel spec,
// either behavior descriptors (empirical expectations) or learned rewards.
struct LabeledSet {
  enum class Role { behavior, reward };
  Role role = Role::behavior;
  KernelSpec spec;
  std::vector<std::string> match_ids;
  std::vector<Strategy> labels;
  std::vector<RkhsVector> vectors;

  std::size_t size() const { return vectors.size(); }
};

// Pairwise ||v_i - v_j|| under the norm induced by the kernel. Exactly
// symmetric with an exactly zero diagonal.
Eigen::MatrixXd distance_matrix(const LabeledSet& set);
Eigen::MatrixXd distance_matrix(const std::vector<RkhsVector>& vectors, const KernelSpec& spec);

// Turns an RKHS inner-product Gram into the same distance matrix.
Eigen::MatrixXd gram_to_distances(const Eigen::MatrixXd& gram);

// Optional SVM kernel composition over the RKHS vectors: the default is the
// inner product in H itself (a linear kernel over H); the alternative wraps
// the RKHS distance in a Gaussian with a median-heuristic bandwidth.
enum class SvmKernelMode { linear_in_h, gaussian_of_distance };

Eigen::MatrixXd svm_gram(const LabeledSet& set, SvmKernelMode mode);

struct LooResult {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // (true label, predicted label), 3x3
  std::vector<int> predictions;
};

// Leave-one-out over every item: train on the other n-1 items, predict the
// held-out one, accumulate the confusion matrix.
LooResult loo_evaluate(const LabeledSet& set, double C,
                       SvmKernelMode mode = SvmKernelMode::linear_in_h,
                       const SmoParams& smo = {});

struct ClusterReport {
  int cluster_count = 0;
  std::vector<int> assignment;                 // per item cluster id
  Eigen::MatrixXi composition;                 // (cluster, label) counts
  // concentration(c, l) = share of label l's items that sit in cluster c
  Eigen::MatrixXd concentration;
};

ClusterReport cluster_report(const Dendrogram& dendrogram, const std::vector<Strategy>& labels,
                             int k = 3);

std::string format_cluster_report(const ClusterReport& report);
std::string format_confusion(const LooResult& result);

}  // namespace kpirl
