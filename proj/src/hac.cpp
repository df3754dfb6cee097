#include "kpirl/hac.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace kpirl {

Dendrogram hac_complete(const Eigen::MatrixXd& distances) {
  const int n = static_cast<int>(distances.rows());
  if (n < 1 || distances.cols() != n) throw std::invalid_argument("hac_complete: square matrix required");

  Dendrogram out;
  out.leaf_count = n;
  if (n == 1) return out;

  // Active clusters carry their public id; the working matrix is indexed by
  // active position and updated with the complete-linkage max rule.
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  Eigen::MatrixXd d = distances;

  for (int step = 0; step < n - 1; ++step) {
    const int m = static_cast<int>(ids.size());
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        double v = d(i, j);
        int lo = std::min(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
        int hi = std::max(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
        bool better = v < best;
        if (!better && v == best && bi >= 0) {
          int blo = std::min(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
          int bhi = std::max(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
          better = lo < blo || (lo == blo && hi < bhi);
        }
        if (better) {
          best = v;
          bi = i;
          bj = j;
        }
      }

    Merge merge;
    merge.cluster_a = std::min(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
    merge.cluster_b = std::max(ids[static_cast<std::size_t>(bi)], ids[static_cast<std::size_t>(bj)]);
    merge.height = best;
    out.merges.push_back(merge);

    // Fold bj into bi with max linkage, then drop bj.
    for (int t = 0; t < m; ++t) {
      if (t == bi || t == bj) continue;
      double v = std::max(d(bi, t), d(bj, t));
      d(bi, t) = v;
      d(t, bi) = v;
    }
    ids[static_cast<std::size_t>(bi)] = n + step;
    int last = m - 1;
    if (bj != last) {
      ids[static_cast<std::size_t>(bj)] = ids[static_cast<std::size_t>(last)];
      d.row(bj) = d.row(last);
      d.col(bj) = d.col(last);
    }
    ids.pop_back();
    d.conservativeResize(last, last);
  }
  return out;
}

std::vector<int> cut_clusters(const Dendrogram& dendrogram, int k) {
  const int n = dendrogram.leaf_count;
  if (k < 1 || k > n) throw std::invalid_argument("cut_clusters: need 1 <= k <= n");

  // Union-find over leaf and merge ids; apply the first n-k merges.
  std::vector<int> parent(static_cast<std::size_t>(2 * n - 1));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  for (int step = 0; step < n - k; ++step) {
    const Merge& mg = dendrogram.merges[static_cast<std::size_t>(step)];
    int id = n + step;
    parent[static_cast<std::size_t>(find(mg.cluster_a))] = id;
    parent[static_cast<std::size_t>(find(mg.cluster_b))] = id;
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> root_label(static_cast<std::size_t>(2 * n - 1), -1);
  int next = 0;
  for (int i = 0; i < n; ++i) {
    int r = find(i);
    if (root_label[static_cast<std::size_t>(r)] < 0) root_label[static_cast<std::size_t>(r)] = next++;
    labels[static_cast<std::size_t>(i)] = root_label[static_cast<std::size_t>(r)];
  }
  return labels;
}

}  // namespace kpirl
