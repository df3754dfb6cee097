#include "kpirl/rkhs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "kpirl/text_io.hpp"

namespace kpirl {

namespace {

constexpr Eigen::Index kBlock = 512;

// sum_ij wa_i wb_j exp(-||A_i - B_j||^2 / (2 sigma^2)), in row blocks.
double cross_quadratic(const Eigen::MatrixXd& A, const Eigen::VectorXd& wa,
                       const Eigen::MatrixXd& B, const Eigen::VectorXd& wb, double sigma) {
  if (A.rows() == 0 || B.rows() == 0) return 0.0;
  const double inv = -1.0 / (2.0 * sigma * sigma);
  const Eigen::VectorXd b_sq = B.rowwise().squaredNorm();
  double acc = 0.0;
  for (Eigen::Index r0 = 0; r0 < A.rows(); r0 += kBlock) {
    const Eigen::Index nr = std::min(kBlock, A.rows() - r0);
    const auto Ab = A.middleRows(r0, nr);
    Eigen::MatrixXd d2 = (-2.0 * Ab * B.transpose());
    d2.colwise() += Ab.rowwise().squaredNorm();
    d2.rowwise() += b_sq.transpose();
    acc += wa.segment(r0, nr).dot((d2 * inv).array().exp().matrix() * wb);
  }
  return acc;
}

}  // namespace

RkhsVector unit_expansion(const Eigen::VectorXd& features) {
  Eigen::MatrixXd a(1, features.size());
  a.row(0) = features;
  Eigen::VectorXd w(1);
  w[0] = 1.0;
  return RkhsVector(std::move(a), std::move(w));
}

double dot(const RkhsVector& u, const RkhsVector& v, const KernelSpec& spec) {
  if (u.empty() || v.empty()) return 0.0;
  if (u.dim() != v.dim()) throw std::invalid_argument("dot: feature dimension mismatch");
  return cross_quadratic(u.anchors, u.weights, v.anchors, v.weights, spec.sigma);
}

double norm(const RkhsVector& v, const KernelSpec& spec) {
  double s = dot(v, v, spec);
  if (s < -1e-9) throw std::runtime_error("norm: negative self inner product");
  return std::sqrt(std::max(0.0, s));
}

double rkhs_distance(const RkhsVector& u, const RkhsVector& v, const KernelSpec& spec) {
  double s = dot(u, u, spec) - 2.0 * dot(u, v, spec) + dot(v, v, spec);
  if (s < -1e-9) throw std::runtime_error("rkhs_distance: negative squared distance");
  return std::sqrt(std::max(0.0, s));
}

double evaluate(const RkhsVector& v, const Eigen::VectorXd& features, const KernelSpec& spec) {
  if (v.empty()) return 0.0;
  if (v.dim() != features.size())
    throw std::invalid_argument("evaluate: feature dimension mismatch");
  const double inv = -1.0 / (2.0 * spec.sigma * spec.sigma);
  Eigen::VectorXd d2 = (v.anchors.rowwise() - features.transpose()).rowwise().squaredNorm();
  return ((d2 * inv).array().exp().matrix()).dot(v.weights);
}

RkhsVector lin_comb(double a, const RkhsVector& u, double b, const RkhsVector& v) {
  if (u.empty() && v.empty()) return RkhsVector();
  if (!u.empty() && !v.empty() && u.dim() != v.dim())
    throw std::invalid_argument("lin_comb: feature dimension mismatch");
  const Eigen::Index dim = u.empty() ? v.dim() : u.dim();
  RkhsVector out;
  out.anchors.resize(u.size() + v.size(), dim);
  out.weights.resize(u.size() + v.size());
  if (!u.empty()) {
    out.anchors.topRows(u.size()) = u.anchors;
    out.weights.head(u.size()) = a * u.weights;
  }
  if (!v.empty()) {
    out.anchors.bottomRows(v.size()) = v.anchors;
    out.weights.tail(v.size()) = b * v.weights;
  }
  return compact(out);
}

RkhsVector compact(const RkhsVector& v, double tol) {
  if (v.size() <= 1) return v;
  const Eigen::Index n = v.size(), d = v.dim();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    for (Eigen::Index c = 0; c < d; ++c) {
      if (v.anchors(i, c) < v.anchors(j, c)) return true;
      if (v.anchors(i, c) > v.anchors(j, c)) return false;
    }
    return false;
  });

  auto same = [&](Eigen::Index i, Eigen::Index j) {
    for (Eigen::Index c = 0; c < d; ++c)
      if (std::abs(v.anchors(i, c) - v.anchors(j, c)) > tol) return false;
    return true;
  };

  std::vector<Eigen::Index> keep;
  std::vector<double> weight;
  for (Eigen::Index idx : order) {
    if (!keep.empty() && same(keep.back(), idx)) {
      weight.back() += v.weights[idx];
    } else {
      keep.push_back(idx);
      weight.push_back(v.weights[idx]);
    }
  }

  RkhsVector out;
  out.anchors.resize(static_cast<Eigen::Index>(keep.size()), d);
  out.weights.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.anchors.row(static_cast<Eigen::Index>(i)) = v.anchors.row(keep[i]);
    out.weights[static_cast<Eigen::Index>(i)] = weight[i];
  }
  return out;
}

RkhsVector empirical_expectation(const std::vector<Eigen::MatrixXd>& episode_features,
                                 double horizon_weight) {
  if (episode_features.empty())
    throw std::invalid_argument("empirical_expectation: no episodes");
  if (horizon_weight < 1.0)
    throw std::invalid_argument("empirical_expectation: horizon weight must be >= 1");
  Eigen::Index total = 0;
  const Eigen::Index dim = episode_features.front().cols();
  for (const auto& ep : episode_features) {
    if (ep.cols() != dim)
      throw std::invalid_argument("empirical_expectation: feature dimension mismatch");
    total += ep.rows();
  }
  if (total == 0) throw std::invalid_argument("empirical_expectation: empty episodes");

  const double w = horizon_weight / static_cast<double>(total);
  RkhsVector out;
  out.anchors.resize(total, dim);
  out.weights = Eigen::VectorXd::Constant(total, w);
  Eigen::Index row = 0;
  for (const auto& ep : episode_features) {
    out.anchors.middleRows(row, ep.rows()) = ep;
    row += ep.rows();
  }
  return compact(out);
}

Eigen::MatrixXd gram_states(const Eigen::MatrixXd& features, const KernelSpec& spec) {
  const Eigen::Index n = features.rows();
  if (n == 0) throw std::invalid_argument("gram_states: empty state list");
  const double inv = -1.0 / (2.0 * spec.sigma * spec.sigma);
  Eigen::VectorXd sq = features.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * features * features.transpose();
  d2.colwise() += sq;
  d2.rowwise() += sq.transpose();
  Eigen::MatrixXd K = (d2 * inv).array().exp();
  // Exact symmetry and unit diagonal, independent of round-off order.
  K = ((K + K.transpose()) / 2.0).eval();
  K.diagonal().setOnes();
  return K;
}

Eigen::MatrixXd gram_vectors(const std::vector<RkhsVector>& vectors, const KernelSpec& spec) {
  const Eigen::Index n = static_cast<Eigen::Index>(vectors.size());
  if (n == 0) throw std::invalid_argument("gram_vectors: empty vector list");
  Eigen::MatrixXd G(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double g = dot(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(j)],
                     spec);
      G(i, j) = g;
      G(j, i) = g;
    }
  return G;
}

void save_rkhs(const std::filesystem::path& path, const RkhsFile& file) {
  std::string out = "rkhs " + file.role + ' ' + fmt_double(file.spec.sigma) + ' ' +
                    fmt_double(file.spec.arena_width) + ' ' + fmt_double(file.spec.arena_height) +
                    ' ' + fmt_double(file.spec.step_length) + ' ' +
                    std::to_string(file.vector.dim()) + ' ' + std::to_string(file.vector.size()) +
                    '\n';
  for (Eigen::Index i = 0; i < file.vector.size(); ++i) {
    out += fmt_double(file.vector.weights[i]);
    for (Eigen::Index c = 0; c < file.vector.dim(); ++c) {
      out += ' ';
      out += fmt_double(file.vector.anchors(i, c));
    }
    out += '\n';
  }
  atomic_write_file(path, out);
}

RkhsFile load_rkhs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  auto tok = split_ws(line);
  if (tok.size() != 8 || tok[0] != "rkhs")
    throw std::runtime_error(path.string() + ": bad rkhs header");
  RkhsFile file;
  file.role = std::string(tok[1]);
  long long dim = 0, count = 0;
  if (!try_parse_double(tok[2], file.spec.sigma) ||
      !try_parse_double(tok[3], file.spec.arena_width) ||
      !try_parse_double(tok[4], file.spec.arena_height) ||
      !try_parse_double(tok[5], file.spec.step_length) || !try_parse_int(tok[6], dim) ||
      !try_parse_int(tok[7], count))
    throw std::runtime_error(path.string() + ": bad rkhs header fields");

  file.vector.anchors.resize(count, dim);
  file.vector.weights.resize(count);
  for (long long i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error(path.string() + ": truncated anchor rows");
    auto row = split_ws(line);
    if (static_cast<long long>(row.size()) != dim + 1)
      throw std::runtime_error(path.string() + ": anchor row " + std::to_string(i + 2) +
                               " has wrong field count");
    double w = 0.0;
    if (!try_parse_double(row[0], w))
      throw std::runtime_error(path.string() + ": bad weight on row " + std::to_string(i + 2));
    file.vector.weights[i] = w;
    for (long long c = 0; c < dim; ++c) {
      double f = 0.0;
      if (!try_parse_double(row[static_cast<std::size_t>(c + 1)], f))
        throw std::runtime_error(path.string() + ": bad feature on row " + std::to_string(i + 2));
      file.vector.anchors(i, c) = f;
    }
  }
  return file;
}

}  // namespace kpirl
