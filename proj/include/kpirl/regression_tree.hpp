#pragma once

#include <Eigen/Core>
#include <vector>

namespace kpirl {

struct TreeParams {
  int max_depth = 12;  // <= 0 means unbounded
  int min_leaf = 2;
};

// CART regressor: axis-aligned splits chosen by variance reduction, leaf
// means as predictions. Fitting and prediction are pure and deterministic;
// ties between equally good splits go to the lowest feature index, then the
// smallest threshold.
class RegressionTree {
 public:
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const TreeParams& params = {});
  double predict(const Eigen::VectorXd& x) const;
  bool fitted() const { return !nodes_.empty(); }
  int node_count() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::vector<int>& idx, int begin,
            int end, int depth, const TreeParams& params);

  std::vector<Node> nodes_;
};

}  // namespace kpirl
