// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail. Criteria 6-8 drive the full CLI pipeline on the default synthetic
// dataset; criterion 9 reruns criteria 4-8 with the same seeds and demands
// byte-identical artifacts.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "kpirl/analytics.hpp"
#include "kpirl/bench.hpp"
#include "kpirl/cli.hpp"
#include "kpirl/features.hpp"
#include "kpirl/projection_irl.hpp"
#include "kpirl/replay_mdp.hpp"
#include "kpirl/rkhs.hpp"
#include "kpirl/text_io.hpp"
#include "kpirl/trajectory.hpp"

using namespace kpirl;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string description)
      : number_(number), description_(std::move(description)),
        start_(std::chrono::steady_clock::now()) {}

  void finish(bool pass, const std::string& detail = "") {
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_);
    std::printf("%s  criterion %d: %s (%.1fs)%s%s\n", pass ? "PASS" : "FAIL", number_,
                description_.c_str(), elapsed.count(), detail.empty() ? "" : " -- ",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
  }

 private:
  int number_;
  std::string description_;
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Small enumerable replay MDP: 40x40 arena, step 10, 7 ticks. The replaced
// agent's recorded path stays on the step lattice, so the reachable set is
// compact enough for exact value iteration.

Match small_fixture_match() {
  Match m;
  m.meta.match_id = "fixture";
  m.meta.arena_width = 40.0;
  m.meta.arena_height = 40.0;
  m.meta.tick_interval = 3.0;
  m.meta.strategy_label = Strategy::assault;

  const double bx[7] = {20, 30, 40, 40, 30, 20, 20};
  const double by[7] = {20, 20, 20, 30, 30, 30, 20};
  const double r0x[7] = {35, 30, 25, 20, 15, 10, 5};
  const double b1x[7] = {10, 12, 14, 16, 18, 20, 22};
  for (int t = 0; t < 7; ++t) {
    Tick tick;
    tick.time = 3.0 * t;
    tick.agents.push_back(AgentRecord{"blue_0", Side::blue, bx[t], by[t], 1.0});
    tick.agents.push_back(AgentRecord{"red_0", Side::red, r0x[t], 5.0, 1.0});
    tick.agents.push_back(AgentRecord{"red_1", Side::red, 5.0, 35.0, 1.0});
    tick.agents.push_back(AgentRecord{"blue_1", Side::blue, b1x[t], 10.0, 1.0});
    m.ticks.push_back(std::move(tick));
  }
  return m;
}

ReplayMdp small_fixture_mdp() { return ReplayMdp(small_fixture_match(), "blue_0", 10.0, 0.9); }

KernelSpec small_fixture_spec() { return KernelSpec{0.25, 40.0, 40.0, 10.0}; }

DeiParams small_fixture_dei(std::uint64_t seed) {
  // Six recorded moves: full-horizon windows make the Monte Carlo targets
  // exact policy returns, and an unbounded tree resolves every visited key.
  DeiParams p;
  p.iterations = 16;
  p.episodes_per_iter = 400;
  p.steps_per_episode = 6;
  p.window = 6;
  p.discount = 0.9;
  p.tree.min_leaf = 1;
  p.tree.max_depth = 0;
  p.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------

void criterion_1_kernel_algebra() {
  Criterion c(1, "kernel algebra: PSD Gram, Cauchy-Schwarz, norm expansion identity");
  bool pass = true;
  std::string detail;
  try {
    Rng rng(101);
    const int n = 200;
    Eigen::MatrixXd feats(n, 6);
    for (int i = 0; i < n; ++i) {
      std::vector<AgentRecord> others;
      int crowd = 1 + static_cast<int>(rng.uniform_index(6));
      for (int a = 0; a < crowd; ++a)
        others.push_back(AgentRecord{"a" + std::to_string(a),
                                     rng.uniform() < 0.5 ? Side::red : Side::blue,
                                     rng.uniform(0.0, 340.0), rng.uniform(0.0, 340.0),
                                     rng.uniform() < 0.25 ? 0.0 : 1.0});
      feats.row(i) =
          featurize_scene(rng.uniform(0.0, 340.0), rng.uniform(0.0, 340.0), others, 340.0, 340.0)
              .transpose();
    }
    KernelSpec spec;
    Eigen::MatrixXd gram = gram_states(feats, spec);
    pass = pass && gram == gram.transpose();
    pass = pass && (gram.diagonal().array() == 1.0).all();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    double min_eig = eig.eigenvalues().minCoeff();
    pass = pass && min_eig >= -1e-8;

    // Cauchy-Schwarz on random expansions over these states.
    for (int trial = 0; trial < 200 && pass; ++trial) {
      auto draw = [&](int count) {
        Eigen::MatrixXd a(count, 6);
        Eigen::VectorXd w(count);
        for (int i = 0; i < count; ++i) {
          a.row(i) = feats.row(static_cast<int>(rng.uniform_index(n)));
          w[i] = rng.uniform(-2.0, 2.0);
        }
        return RkhsVector(std::move(a), std::move(w));
      };
      RkhsVector u = draw(3 + static_cast<int>(rng.uniform_index(5)));
      RkhsVector v = draw(3 + static_cast<int>(rng.uniform_index(5)));
      pass = pass && std::abs(dot(u, v, spec)) <= norm(u, spec) * norm(v, spec) + 1e-9;
    }

    // ||a - b||^2 for a = k(s1,.) + 2 k(s2,.), b = k(s2,.) equals
    // k(s1,s1) + k(s2,s2) + 2 k(s1,s2).
    for (int trial = 0; trial < 200 && pass; ++trial) {
      Eigen::VectorXd s1 = feats.row(static_cast<int>(rng.uniform_index(n)));
      Eigen::VectorXd s2 = feats.row(static_cast<int>(rng.uniform_index(n)));
      RkhsVector a = lin_comb(1.0, unit_expansion(s1), 2.0, unit_expansion(s2));
      RkhsVector b = unit_expansion(s2);
      double lhs = rkhs_distance(a, b, spec);
      double rhs = gaussian_kernel(s1, s1, spec) + gaussian_kernel(s2, s2, spec) +
                   2.0 * gaussian_kernel(s1, s2, spec);
      pass = pass && std::abs(lhs * lhs - rhs) <= 1e-9;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "min eigenvalue %.2e", min_eig);
    detail = buf;
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

void criterion_2_projection_oracle() {
  Criterion c(2, "projection step matches a 1e-3 beta grid search on 500 instances");
  bool pass = true;
  std::string detail;
  try {
    KernelSpec spec;
    Rng rng(202);
    auto draw = [&](int count, int dim) {
      Eigen::MatrixXd a(count, dim);
      Eigen::VectorXd w(count);
      for (int i = 0; i < count; ++i) {
        w[i] = rng.uniform(-1.5, 1.5);
        for (int j = 0; j < dim; ++j) a(i, j) = rng.uniform(0.0, 1.0);
      }
      return RkhsVector(std::move(a), std::move(w));
    };
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
      int dim = 2 + static_cast<int>(rng.uniform_index(4));
      RkhsVector mu_e = draw(3 + static_cast<int>(rng.uniform_index(4)), dim);
      RkhsVector mu_bar = draw(2 + static_cast<int>(rng.uniform_index(4)), dim);
      RkhsVector mu_i = draw(3 + static_cast<int>(rng.uniform_index(4)), dim);

      double beta;
      RkhsVector mu_next;
      try {
        std::tie(beta, mu_next) = projection_step(mu_bar, mu_i, mu_e, spec);
      } catch (const DegenerateStepError&) {
        continue;
      }
      ++checked;

      double best_beta = 0.0;
      double best_res = rkhs_distance(mu_e, mu_bar, spec);
      for (int g = 1; g <= 1000; ++g) {
        double b = g / 1000.0;
        double r = rkhs_distance(mu_e, lin_comb(1.0 - b, mu_bar, b, mu_i), spec);
        if (r < best_res) {
          best_res = r;
          best_beta = b;
        }
      }
      double res = rkhs_distance(mu_e, mu_next, spec);
      double prev = rkhs_distance(mu_e, mu_bar, spec);
      if (std::abs(beta - best_beta) > 1e-3 + 1e-9 || res > best_res + 1e-9 ||
          res > prev + 1e-12) {
        pass = false;
        break;
      }
    }
    detail = std::to_string(checked) + " non-degenerate instances";
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

void criterion_3_rl_oracle() {
  Criterion c(3, "direct estimate iteration within 5% of value iteration on >= 8/10 rewards");
  bool pass = true;
  std::string detail;
  try {
    ReplayMdp mdp = small_fixture_mdp();
    KernelSpec spec = small_fixture_spec();
    auto enumerated = enumerate_reachable(mdp, 500000);
    const auto starts_vec = mdp.start_states();
    std::span<const MdpState> starts(starts_vec);

    int good = 0;
    double worst_gap = 0.0;
    bool never_exceeds = true;
    for (int k = 0; k < 10; ++k) {
      // Nonnegative unit-norm rewards keep the optimum bounded away from
      // zero, so a 5% relative bar measures solver quality rather than the
      // sign structure of the reward draw.
      Rng rng(derive_seed(303, "acc3-reward-" + std::to_string(k)));
      RkhsVector rv = random_reward(mdp, 30, spec, rng, false);
      rv.weights = rv.weights.cwiseAbs();
      rv.weights /= norm(rv, spec);
      auto reward = [&](const Eigen::VectorXd& f) { return evaluate(rv, f, spec); };

      auto vi = value_iteration(mdp, enumerated, reward, 0.9, 1e-10);
      double vi_ret =
          evaluate_policy_from(mdp, *vi.policy, reward, starts, 100, 0.9, 42);

      auto dei = direct_estimate_iteration(
          mdp, reward, small_fixture_dei(derive_seed(303, "acc3-dei-" + std::to_string(k))));
      double dei_ret =
          evaluate_policy_from(mdp, *dei.policy, reward, starts, 100, 0.9, 42);

      never_exceeds = never_exceeds && dei_ret <= vi_ret + 1e-6;
      double gap = vi_ret - dei_ret;
      double rel = std::abs(vi_ret) > 1e-12 ? gap / std::abs(vi_ret) : gap;
      worst_gap = std::max(worst_gap, rel);
      if (rel <= 0.05) ++good;
    }
    pass = good >= 8 && never_exceeds;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d/10 within 5%%, worst relative gap %.3f, %zu states", good,
                  worst_gap, enumerated.states.size());
    detail = buf;
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

fs::path workspace() { return fs::temp_directory_path() / "kpirl_acceptance"; }

int run(const std::vector<std::string>& args) { return run_cli(args); }

void criterion_4_bench(const fs::path& ws) {
  Criterion c(4, "bench-rl: 30 rewards, 10k budget; VI >= direct >= random in mean");
  bool pass = true;
  std::string detail;
  try {
    fs::path out = ws / "bench_rl.csv";
    pass = run({"bench-rl", "--out", out.string(), "--rewards", "30", "--budget", "10000",
                "--seed", "7"}) == 0;
    if (pass) {
      std::string csv = read_file(out);
      std::istringstream in(csv);
      std::string line;
      double vi_sum = 0, dei_sum = 0, rnd_sum = 0, ql_sum = 0;
      int vi_n = 0, dei_n = 0, rnd_n = 0, ql_n = 0;
      while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("reward_id", 0) == 0) continue;
        std::istringstream row(line);
        std::string id, solver, ret, used;
        std::getline(row, id, ',');
        std::getline(row, solver, ',');
        std::getline(row, ret, ',');
        std::getline(row, used, ',');
        double r = std::stod(ret);
        if (solver == "value_iteration") vi_sum += r, ++vi_n;
        if (solver == "direct_iteration") dei_sum += r, ++dei_n;
        if (solver == "random") rnd_sum += r, ++rnd_n;
        if (solver == "q_learning") ql_sum += r, ++ql_n;
      }
      pass = pass && vi_n == 30 && dei_n == 30 && rnd_n == 30 && ql_n == 30;
      double vi_mean = vi_sum / vi_n, dei_mean = dei_sum / dei_n, rnd_mean = rnd_sum / rnd_n,
             ql_mean = ql_sum / ql_n;
      pass = pass && vi_mean >= dei_mean - 1e-9 && dei_mean >= rnd_mean;
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "means: value_iteration %.3f, direct %.3f, q_learning %.3f, random %.3f",
                    vi_mean, dei_mean, ql_mean, rnd_mean);
      detail = buf;
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

void criterion_5_kpirl_recovery() {
  Criterion c(5, "KPIRL reaches epsilon within 50 iterations and recovers the expert");
  bool pass = true;
  std::string detail;
  try {
    ReplayMdp mdp = small_fixture_mdp();
    KernelSpec spec = small_fixture_spec();

    Rng rng(derive_seed(505, "acc5-reward"));
    RkhsVector true_reward = random_reward(mdp, 30, spec, rng, true);
    auto reward = [&](const Eigen::VectorXd& f) { return evaluate(true_reward, f, spec); };
    auto vi = value_iteration(mdp, reward, 0.9, 1e-10, 500000);
    auto expert = [&](const MdpState& s, Rng& r) { return vi.policy->act(mdp, s, r); };
    RkhsVector mu_e = policy_expectation(mdp, expert, 600, 6, spec, derive_seed(505, "acc5-mu"));

    KpirlParams params;
    params.epsilon = 0.1 * norm(mu_e, spec);
    params.max_iterations = 50;
    params.rl = small_fixture_dei(0);
    params.expectation_episodes = 600;
    params.expectation_horizon = 6;
    params.seed = derive_seed(505, "acc5-kpirl");
    auto result = run_kpirl(mdp, mu_e, spec, params);

    bool monotone = true;
    for (std::size_t i = 1; i < result.trace.size(); ++i)
      monotone = monotone && result.trace[i].residual <= result.trace[i - 1].residual + 1e-12;

    double selected_dist =
        result.trace[static_cast<std::size_t>(result.selected_index)].mu_distance;
    double bound = 0.15 * norm(mu_e, spec);
    pass = result.reached_epsilon && static_cast<int>(result.trace.size()) <= 50 && monotone &&
           selected_dist <= bound;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu iterations, residual %.4f (eps %.4f), selected mu distance %.4f <= %.4f",
                  result.trace.size(), result.trace.back().residual, params.epsilon,
                  selected_dist, bound);
    detail = buf;
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

struct PipelineOutcome {
  bool ok = false;
  double behavior_accuracy = 0.0;
  double reward_accuracy = 0.0;
  double fallback_concentration = 0.0;
};

PipelineOutcome run_pipeline(const fs::path& ws, const std::string& tag) {
  PipelineOutcome out;
  fs::path data = ws / ("data_" + tag);
  fs::path learned = ws / ("learned_" + tag);
  fs::path analysis = ws / ("analysis_" + tag);

  if (run({"generate", "--out", data.string(), "--seed", "7"}) != 0) return out;
  if (run({"learn", "--data", data.string(), "--out", learned.string(), "--seed", "7"}) != 0)
    return out;
  if (run({"analyze", "--data", data.string(), "--learned", learned.string(), "--out",
           analysis.string(), "--seed", "7"}) != 0)
    return out;

  std::string summary = read_file(analysis / "summary.txt");
  auto grab = [&](const std::string& key) {
    auto pos = summary.find(key);
    if (pos == std::string::npos) return -1.0;
    return std::stod(summary.substr(pos + key.size()));
  };
  out.behavior_accuracy = grab("behavior LOO accuracy ");
  out.reward_accuracy = grab("reward LOO accuracy ");

  // Peak fallback concentration over the k=3 reward clusters.
  std::string clusters = read_file(analysis / "reward_clusters.txt");
  std::istringstream in(clusters);
  std::string line;
  bool in_conc = false;
  double peak = 0.0;
  while (std::getline(in, line)) {
    if (line.rfind("label concentration", 0) == 0) {
      in_conc = true;
      continue;
    }
    if (!in_conc || line.empty()) continue;
    std::istringstream row(line);
    double cluster, assault, flank, fallback;
    if (row >> cluster >> assault >> flank >> fallback) peak = std::max(peak, fallback);
  }
  out.fallback_concentration = peak;
  out.ok = out.behavior_accuracy >= 0.0 && out.reward_accuracy >= 0.0;
  return out;
}

void criterion_6_and_7(const fs::path& ws, PipelineOutcome& outcome) {
  Criterion c6(6, "strategy identification: LOO accuracy >= 0.50 for both, reward >= behavior - 0.05");
  outcome = run_pipeline(ws, "run1");
  {
    bool pass = outcome.ok && outcome.behavior_accuracy >= 0.50 && outcome.reward_accuracy >= 0.50 &&
                outcome.reward_accuracy >= outcome.behavior_accuracy - 0.05;
    char buf[128];
    std::snprintf(buf, sizeof buf, "behavior %.3f, reward %.3f", outcome.behavior_accuracy,
                  outcome.reward_accuracy);
    c6.finish(pass, buf);
  }

  Criterion c7(7, "k=3 reward clustering concentrates >= 70% of fallback matches");
  {
    bool pass = outcome.ok && outcome.fallback_concentration >= 70.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "peak fallback concentration %.1f%%",
                  outcome.fallback_concentration);
    c7.finish(pass, buf);
  }
}

void criterion_8_replay(const fs::path& ws) {
  Criterion c(8, "replay overlay: first-half mean displacement under 25% of the arena diagonal");
  bool pass = true;
  std::string detail;
  try {
    fs::path data = ws / "data_run1";
    fs::path learned = ws / "learned_run1";
    fs::path replay = ws / "replay_run1";
    auto manifest = read_manifest(data);
    std::string assault_file;
    for (const auto& e : manifest)
      if (e.label == Strategy::assault) {
        assault_file = e.file_name;
        break;
      }
    std::string stem = fs::path(assault_file).stem().string();
    pass = run({"replay", "--match", (data / assault_file).string(), "--reward",
                (learned / (stem + ".reward.rkhs")).string(), "--out", replay.string(), "--seed",
                "7"}) == 0;
    if (pass) {
      std::string summary = read_file(replay / "overlay_summary.txt");
      const std::string key = "first_half_mean_displacement_m ";
      auto pos = summary.find(key);
      double first_half = pos == std::string::npos ? 1e18
                                                   : std::stod(summary.substr(pos + key.size()));
      const double diag = std::sqrt(340.0 * 340.0 + 340.0 * 340.0);
      pass = first_half < 0.25 * diag;
      char buf[96];
      std::snprintf(buf, sizeof buf, "first-half mean displacement %.1f m (bound %.1f m)",
                    first_half, 0.25 * diag);
      detail = buf;
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

bool dirs_identical(const fs::path& a, const fs::path& b, std::string& first_diff) {
  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(a)) names.push_back(entry.path().filename());
  std::sort(names.begin(), names.end());
  for (const auto& name : names) {
    if (!fs::exists(b / name)) {
      first_diff = (b / name).string() + " missing";
      return false;
    }
    if (read_file(a / name) != read_file(b / name)) {
      first_diff = name.string();
      return false;
    }
  }
  return true;
}

void criterion_9_determinism(const fs::path& ws) {
  Criterion c(9, "criteria 4-8 rerun with the same seeds produce byte-identical outputs");
  bool pass = true;
  std::string detail;
  try {
    // Bench rerun.
    fs::path bench2 = ws / "bench_rl_rerun.csv";
    pass = run({"bench-rl", "--out", bench2.string(), "--rewards", "30", "--budget", "10000",
                "--seed", "7"}) == 0;
    pass = pass && read_file(ws / "bench_rl.csv") == read_file(bench2);
    if (!pass) detail = "bench CSV differs";

    // Pipeline rerun into fresh directories.
    if (pass) {
      PipelineOutcome rerun = run_pipeline(ws, "run2");
      pass = rerun.ok;
      std::string diff;
      pass = pass && dirs_identical(ws / "data_run1", ws / "data_run2", diff) &&
             dirs_identical(ws / "learned_run1", ws / "learned_run2", diff) &&
             dirs_identical(ws / "analysis_run1", ws / "analysis_run2", diff);
      if (!pass) detail = "pipeline artifact differs: " + diff;
    }

    // Replay rerun.
    if (pass) {
      fs::path data = ws / "data_run1";
      fs::path learned = ws / "learned_run1";
      fs::path replay2 = ws / "replay_run2";
      auto manifest = read_manifest(data);
      std::string assault_file;
      for (const auto& e : manifest)
        if (e.label == Strategy::assault) {
          assault_file = e.file_name;
          break;
        }
      std::string stem = fs::path(assault_file).stem().string();
      pass = run({"replay", "--match", (data / assault_file).string(), "--reward",
                  (learned / (stem + ".reward.rkhs")).string(), "--out", replay2.string(),
                  "--seed", "7"}) == 0;
      std::string diff;
      pass = pass && dirs_identical(ws / "replay_run1", ws / "replay_run2", diff);
      if (!pass) detail = "replay artifact differs: " + diff;
    }
  } catch (const std::exception& e) {
    pass = false;
    detail = e.what();
  }
  c.finish(pass, detail);
}

}  // namespace

int main() {
  fs::path ws = workspace();
  fs::remove_all(ws);
  fs::create_directories(ws);

  criterion_1_kernel_algebra();
  criterion_2_projection_oracle();
  criterion_3_rl_oracle();
  criterion_4_bench(ws);
  criterion_5_kpirl_recovery();
  PipelineOutcome outcome;
  criterion_6_and_7(ws, outcome);
  criterion_8_replay(ws);
  criterion_9_determinism(ws);

  if (g_failures == 0) {
    std::printf("all 9 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
