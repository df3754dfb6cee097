#pragma once

#include <Eigen/Core>
#include <vector>

namespace kpirl {

// Agglomerative clustering with complete (max pairwise distance) linkage.
// Merge ids follow the usual convention: leaves are 0..n-1 and the cluster
// created by merge step m gets id n+m. Equal-distance ties merge the pair
// with the lexicographically smallest (id_a, id_b).
struct Merge {
  int cluster_a = 0;
  int cluster_b = 0;
  double height = 0.0;
};

struct Dendrogram {
  int leaf_count = 0;
  std::vector<Merge> merges;  // exactly leaf_count - 1 entries
};

Dendrogram hac_complete(const Eigen::MatrixXd& distances);

// Assignment for a cut with exactly k clusters. Labels are 0..k-1, numbered
// by first appearance over the leaf order.
std::vector<int> cut_clusters(const Dendrogram& dendrogram, int k);

}  // namespace kpirl
