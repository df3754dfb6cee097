#include "kpirl/regression_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace kpirl {

void RegressionTree::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const TreeParams& params) {
  if (X.rows() != y.size()) throw std::invalid_argument("RegressionTree: X/y size mismatch");
  if (X.rows() == 0) throw std::invalid_argument("RegressionTree: empty training set");
  nodes_.clear();
  std::vector<int> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  build(X, y, idx, 0, static_cast<int>(idx.size()), 0, params);
}

namespace {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double sse = std::numeric_limits<double>::infinity();
};

}  // namespace

int RegressionTree::build(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          std::vector<int>& idx, int begin, int end, int depth,
                          const TreeParams& params) {
  const int n = end - begin;
  double sum = 0.0, sumsq = 0.0;
  for (int i = begin; i < end; ++i) {
    double v = y[idx[static_cast<std::size_t>(i)]];
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / n;
  const double node_sse = sumsq - sum * sum / n;

  int node_id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{});
  nodes_[static_cast<std::size_t>(node_id)].value = mean;

  const bool depth_ok = params.max_depth <= 0 || depth < params.max_depth;
  if (!depth_ok || n < 2 * params.min_leaf || node_sse <= 1e-12) return node_id;

  SplitChoice best;
  std::vector<int> order(idx.begin() + begin, idx.begin() + end);
  for (int f = 0; f < X.cols(); ++f) {
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double xa = X(a, f), xb = X(b, f);
      if (xa != xb) return xa < xb;
      return a < b;
    });
    double lsum = 0.0, lsq = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      double v = y[order[static_cast<std::size_t>(i)]];
      lsum += v;
      lsq += v * v;
      double xl = X(order[static_cast<std::size_t>(i)], f);
      double xr = X(order[static_cast<std::size_t>(i + 1)], f);
      if (xl == xr) continue;
      int nl = i + 1, nr = n - nl;
      if (nl < params.min_leaf || nr < params.min_leaf) continue;
      double rsum = sum - lsum, rsq = sumsq - lsq;
      double sse = (lsq - lsum * lsum / nl) + (rsq - rsum * rsum / nr);
      if (sse + 1e-15 < best.sse) {
        double thr = 0.5 * (xl + xr);
        if (!(thr < xr)) thr = xl;  // midpoint rounding must stay left of xr
        best = SplitChoice{f, thr, sse};
      }
    }
  }

  if (best.feature < 0 || best.sse >= node_sse - 1e-12) return node_id;

  // Partition by the chosen predicate so fit and predict agree exactly.
  auto mid_it = std::stable_partition(idx.begin() + begin, idx.begin() + end, [&](int i) {
    return X(i, best.feature) <= best.threshold;
  });
  int mid = static_cast<int>(mid_it - idx.begin());
  if (mid == begin || mid == end) return node_id;  // degenerate, keep as leaf

  nodes_[static_cast<std::size_t>(node_id)].feature = best.feature;
  nodes_[static_cast<std::size_t>(node_id)].threshold = best.threshold;
  int left = build(X, y, idx, begin, mid, depth + 1, params);
  nodes_[static_cast<std::size_t>(node_id)].left = left;
  int right = build(X, y, idx, mid, end, depth + 1, params);
  nodes_[static_cast<std::size_t>(node_id)].right = right;
  return node_id;
}

double RegressionTree::predict(const Eigen::VectorXd& x) const {
  if (nodes_.empty()) throw std::logic_error("RegressionTree: predict before fit");
  int cur = 0;
  while (nodes_[static_cast<std::size_t>(cur)].feature >= 0) {
    const Node& nd = nodes_[static_cast<std::size_t>(cur)];
    cur = (x[nd.feature] <= nd.threshold) ? nd.left : nd.right;
  }
  return nodes_[static_cast<std::size_t>(cur)].value;
}

}  // namespace kpirl
