#pragma once

#include <Eigen/Core>
#include <vector>

namespace kpirl {

struct SmoParams {
  double tolerance = 1e-3;
  int max_sweeps = 100;
};

// Binary soft-margin SVM trained by sequential minimal optimization on a
// precomputed Gram matrix. Labels are +/-1. Deterministic: the first KKT
// violator in index order pairs with the partner of maximal |E_i - E_j|.
struct BinarySvm {
  Eigen::VectorXd alpha;
  Eigen::VectorXd labels;
  double bias = 0.0;

  // gram_row[t] = k(x, training_t) for the training set this model was fit on.
  double decision(const Eigen::VectorXd& gram_row) const {
    return (alpha.array() * labels.array() * gram_row.array()).sum() + bias;
  }
};

BinarySvm smo_train(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, double C,
                    const SmoParams& params = {});

// One-vs-one multi-class wrapper: one binary SVM per class pair, majority
// vote at prediction, ties broken by the summed magnitude of the winning
// decision values, then by the smallest class index.
struct OvoSvm {
  int class_count = 0;
  struct Pair {
    int class_a = 0;
    int class_b = 0;
    std::vector<int> train_indices;  // into the training set the Gram was built on
    BinarySvm svm;
  };
  std::vector<Pair> pairs;
};

OvoSvm svm_train_ovo(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double C,
                     const SmoParams& params = {});

// gram_row[t] = inner product between the query and training item t.
int ovo_predict(const OvoSvm& model, const Eigen::VectorXd& gram_row);

// Largest KKT complementarity violation of a trained binary machine over its
// training Gram; converged SMO keeps this below its tolerance.
double kkt_residual(const BinarySvm& svm, const Eigen::MatrixXd& gram, double C);

}  // namespace kpirl
