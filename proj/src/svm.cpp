#include "kpirl/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kpirl {

namespace {

double decision_of(const Eigen::MatrixXd& gram, const Eigen::VectorXd& alpha,
                   const Eigen::VectorXd& labels, double bias, int i) {
  return (alpha.array() * labels.array() * gram.col(i).array()).sum() + bias;
}

}  // namespace

BinarySvm smo_train(const Eigen::MatrixXd& gram, const Eigen::VectorXd& labels, double C,
                    const SmoParams& params) {
  const int n = static_cast<int>(labels.size());
  if (gram.rows() != n || gram.cols() != n)
    throw std::invalid_argument("smo_train: gram/label size mismatch");
  for (int i = 0; i < n; ++i)
    if (labels[i] != 1.0 && labels[i] != -1.0)
      throw std::invalid_argument("smo_train: labels must be +/-1");

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  double b = 0.0;
  const double tol = params.tolerance;

  // Dual objective, used only on the degenerate-curvature fallback path.
  auto dual_value = [&](const Eigen::VectorXd& a) {
    double w = a.sum();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w -= 0.5 * a[i] * a[j] * labels[i] * labels[j] * gram(i, j);
    return w;
  };

  // One pair update; false when the pair cannot make progress.
  auto take_step = [&](int i, int j, double Ei) {
    const double Ej = decision_of(gram, alpha, labels, b, j) - labels[j];
    double L, H;
    if (labels[i] != labels[j]) {
      L = std::max(0.0, alpha[j] - alpha[i]);
      H = std::min(C, C + alpha[j] - alpha[i]);
    } else {
      L = std::max(0.0, alpha[i] + alpha[j] - C);
      H = std::min(C, alpha[i] + alpha[j]);
    }
    if (L >= H) return false;
    const double eta = 2.0 * gram(i, j) - gram(i, i) - gram(j, j);

    double aj;
    if (eta < 0.0) {
      aj = std::clamp(alpha[j] - labels[j] * (Ei - Ej) / eta, L, H);
    } else {
      // Flat or convex along the pair line (duplicate points): the dual is
      // maximized at one of the endpoints.
      const double s = labels[i] * labels[j];
      auto with_aj = [&](double v) {
        Eigen::VectorXd a = alpha;
        a[i] = alpha[i] + s * (alpha[j] - v);
        a[j] = v;
        return dual_value(a);
      };
      const double here = dual_value(alpha);
      const double at_l = with_aj(L), at_h = with_aj(H);
      if (at_l <= here + 1e-12 && at_h <= here + 1e-12) return false;
      aj = at_l > at_h ? L : H;
    }
    if (std::abs(aj - alpha[j]) < 1e-9) return false;
    const double ai = alpha[i] + labels[i] * labels[j] * (alpha[j] - aj);

    const double b1 = b - Ei - labels[i] * (ai - alpha[i]) * gram(i, i) -
                      labels[j] * (aj - alpha[j]) * gram(i, j);
    const double b2 = b - Ej - labels[i] * (ai - alpha[i]) * gram(i, j) -
                      labels[j] * (aj - alpha[j]) * gram(j, j);
    alpha[i] = ai;
    alpha[j] = aj;
    if (ai > 0.0 && ai < C)
      b = b1;
    else if (aj > 0.0 && aj < C)
      b = b2;
    else
      b = (b1 + b2) / 2.0;
    return true;
  };

  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    int changed = 0;
    for (int i = 0; i < n; ++i) {
      const double Ei = decision_of(gram, alpha, labels, b, i) - labels[i];
      const double yEi = labels[i] * Ei;
      if (!((yEi < -tol && alpha[i] < C) || (yEi > tol && alpha[i] > 0.0))) continue;

      // Partners ordered by |Ei - Ej| descending, ties to the smallest j;
      // fall through the list until some pair moves.
      std::vector<int> order;
      order.reserve(static_cast<std::size_t>(n - 1));
      for (int cand = 0; cand < n; ++cand)
        if (cand != i) order.push_back(cand);
      std::vector<double> gap(static_cast<std::size_t>(n), 0.0);
      for (int cand : order)
        gap[static_cast<std::size_t>(cand)] =
            std::abs(Ei - (decision_of(gram, alpha, labels, b, cand) - labels[cand]));
      std::sort(order.begin(), order.end(), [&](int a, int c) {
        double ga = gap[static_cast<std::size_t>(a)], gc = gap[static_cast<std::size_t>(c)];
        if (ga != gc) return ga > gc;
        return a < c;
      });
      for (int j : order)
        if (take_step(i, j, Ei)) {
          ++changed;
          break;
        }
    }
    if (changed == 0) break;
  }

  // Final bias straight from the KKT conditions: average over free support
  // vectors when any exist, else the midpoint of the feasible interval left
  // by the bound points.
  {
    const double bound_eps = 1e-9 * std::max(1.0, C);
    double free_sum = 0.0;
    int free_count = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      double raw = (alpha.array() * labels.array() * gram.col(i).array()).sum();
      if (alpha[i] > bound_eps && alpha[i] < C - bound_eps) {
        free_sum += labels[i] - raw;
        ++free_count;
      } else if (alpha[i] <= bound_eps) {
        if (labels[i] > 0.0)
          lo = std::max(lo, 1.0 - raw);
        else
          hi = std::min(hi, -1.0 - raw);
      } else {  // alpha at C
        if (labels[i] > 0.0)
          hi = std::min(hi, 1.0 - raw);
        else
          lo = std::max(lo, -1.0 - raw);
      }
    }
    if (free_count > 0)
      b = free_sum / free_count;
    else if (std::isfinite(lo) && std::isfinite(hi))
      b = (lo + hi) / 2.0;
    else if (std::isfinite(lo))
      b = lo;
    else if (std::isfinite(hi))
      b = hi;
  }

  BinarySvm svm;
  svm.alpha = std::move(alpha);
  svm.labels = labels;
  svm.bias = b;
  return svm;
}

OvoSvm svm_train_ovo(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double C,
                     const SmoParams& params) {
  const int n = static_cast<int>(labels.size());
  if (gram.rows() != n || gram.cols() != n)
    throw std::invalid_argument("svm_train_ovo: gram/label size mismatch");
  int classes = 0;
  for (int l : labels) {
    if (l < 0) throw std::invalid_argument("svm_train_ovo: labels must be nonnegative");
    classes = std::max(classes, l + 1);
  }
  int present = 0;
  for (int c = 0; c < classes; ++c)
    if (std::count(labels.begin(), labels.end(), c) > 0) ++present;
  if (present < 2) throw std::invalid_argument("svm_train_ovo: need at least two classes");

  OvoSvm model;
  model.class_count = classes;
  for (int a = 0; a < classes; ++a)
    for (int bcls = a + 1; bcls < classes; ++bcls) {
      OvoSvm::Pair pair;
      pair.class_a = a;
      pair.class_b = bcls;
      for (int i = 0; i < n; ++i)
        if (labels[static_cast<std::size_t>(i)] == a || labels[static_cast<std::size_t>(i)] == bcls)
          pair.train_indices.push_back(i);
      const int m = static_cast<int>(pair.train_indices.size());
      if (m == 0) continue;
      Eigen::MatrixXd sub(m, m);
      Eigen::VectorXd y(m);
      for (int r = 0; r < m; ++r) {
        y[r] = labels[static_cast<std::size_t>(pair.train_indices[static_cast<std::size_t>(r)])] == a
                   ? 1.0
                   : -1.0;
        for (int c = 0; c < m; ++c)
          sub(r, c) = gram(pair.train_indices[static_cast<std::size_t>(r)],
                           pair.train_indices[static_cast<std::size_t>(c)]);
      }
      bool has_pos = (y.array() > 0).any(), has_neg = (y.array() < 0).any();
      if (!has_pos || !has_neg) continue;  // pair missing a class entirely
      pair.svm = smo_train(sub, y, C, params);
      model.pairs.push_back(std::move(pair));
    }
  return model;
}

int ovo_predict(const OvoSvm& model, const Eigen::VectorXd& gram_row) {
  std::vector<int> votes(static_cast<std::size_t>(model.class_count), 0);
  std::vector<double> strength(static_cast<std::size_t>(model.class_count), 0.0);
  for (const auto& pair : model.pairs) {
    const int m = static_cast<int>(pair.train_indices.size());
    Eigen::VectorXd row(m);
    for (int r = 0; r < m; ++r)
      row[r] = gram_row[pair.train_indices[static_cast<std::size_t>(r)]];
    double f = pair.svm.decision(row);
    int winner = f >= 0.0 ? pair.class_a : pair.class_b;
    votes[static_cast<std::size_t>(winner)] += 1;
    strength[static_cast<std::size_t>(winner)] += std::abs(f);
  }
  int best = 0;
  for (int c = 1; c < model.class_count; ++c) {
    bool better = votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)];
    if (!better && votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(best)])
      better = strength[static_cast<std::size_t>(c)] > strength[static_cast<std::size_t>(best)];
    if (better) best = c;
  }
  return best;
}

double kkt_residual(const BinarySvm& svm, const Eigen::MatrixXd& gram, double C) {
  const int n = static_cast<int>(svm.alpha.size());
  double worst = 0.0;
  const double bound_eps = 1e-8 * std::max(1.0, C);
  for (int i = 0; i < n; ++i) {
    double margin = svm.labels[i] * decision_of(gram, svm.alpha, svm.labels, svm.bias, i);
    double a = svm.alpha[i];
    double violation;
    if (a <= bound_eps)
      violation = std::max(0.0, 1.0 - margin);
    else if (a >= C - bound_eps)
      violation = std::max(0.0, margin - 1.0);
    else
      violation = std::abs(margin - 1.0);
    worst = std::max(worst, violation);
  }
  return worst;
}

}  // namespace kpirl
