#include "kpirl/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include "kpirl/analytics.hpp"
#include "kpirl/bench.hpp"
#include "kpirl/projection_irl.hpp"
#include "kpirl/replay_mdp.hpp"
#include "kpirl/rkhs.hpp"
#include "kpirl/skirmish.hpp"
#include "kpirl/svg.hpp"
#include "kpirl/text_io.hpp"
#include "kpirl/tsne.hpp"

namespace kpirl {

namespace fs = std::filesystem;

std::string choose_controlled_agent(const Match& match) {
  if (match.meta.controlled_agent_id) return *match.meta.controlled_agent_id;
  std::string best;
  int best_life = -1;
  for (const AgentRecord& a : match.ticks.front().agents) {
    if (a.side != Side::blue) continue;
    int life = 0;
    for (std::size_t t = 0; t < match.ticks.size(); ++t) {
      const AgentRecord* rec = match.find_agent(t, a.agent_id);
      if (rec && rec->health > 0.0)
        ++life;
      else
        break;
    }
    if (life > best_life || (life == best_life && a.agent_id < best)) {
      best_life = life;
      best = a.agent_id;
    }
  }
  if (best.empty()) throw std::runtime_error("match has no blue agents");
  return best;
}

namespace {

// ---------------------------------------------------------------------------
// Shared option bundles

struct LearnOptions {
  double sigma = 0.25;
  double discount = 0.9;
  double epsilon_fraction = 0.1;  // epsilon = fraction * ||mu_E||
  int max_iterations = 12;
  int dei_iterations = 6;
  int dei_episodes = 30;
  int dei_steps = 20;
  int dei_window = 5;
  int expect_episodes = 40;
  int expect_horizon = 20;
  int jobs = 0;
  bool force = false;
};

KpirlParams kpirl_params_from(const LearnOptions& opt, double epsilon, std::uint64_t seed) {
  KpirlParams p;
  p.epsilon = epsilon;
  p.max_iterations = opt.max_iterations;
  p.rl.iterations = opt.dei_iterations;
  p.rl.episodes_per_iter = opt.dei_episodes;
  p.rl.steps_per_episode = opt.dei_steps;
  p.rl.window = opt.dei_window;
  p.rl.discount = opt.discount;
  p.expectation_episodes = opt.expect_episodes;
  p.expectation_horizon = opt.expect_horizon;
  p.seed = seed;
  return p;
}

std::string csv_escape(const std::string& s) { return s; }  // ids carry no commas by format

void write_distance_csv(const fs::path& path, const std::vector<std::string>& ids,
                        const Eigen::MatrixXd& d) {
  std::string out = "id";
  for (const auto& id : ids) out += ',' + csv_escape(id);
  out += '\n';
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    out += ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d.cols(); ++j) out += ',' + fmt_double(d(i, j));
    out += '\n';
  }
  atomic_write_file(path, out);
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::string out_dir;
  std::uint64_t seed = 7;
  std::vector<int> counts;  // assault, flank, fallback
};

int cmd_generate(const GenerateArgs& args) {
  DatasetCounts counts;
  if (!args.counts.empty()) {
    if (args.counts.size() != 3) {
      std::cerr << "error: --counts needs exactly three values (assault,flank,fallback)\n";
      return 2;
    }
    counts.assault = args.counts[0];
    counts.flank = args.counts[1];
    counts.fallback = args.counts[2];
  }
  try {
    auto manifest = generate_dataset(args.out_dir, counts, args.seed);
    std::cout << "wrote " << manifest.size() << " matches to " << args.out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// learn

struct LearnArgs {
  std::string data_dir;
  std::string out_dir;
  std::uint64_t seed = 7;
  LearnOptions opt;
};

struct LearnOutcome {
  bool skipped = false;
  bool failed = false;
  std::string message;
};

LearnOutcome learn_one(const LearnArgs& args, const ManifestEntry& entry) {
  LearnOutcome outcome;
  const std::string stem = fs::path(entry.file_name).stem().string();
  const fs::path behavior_path = fs::path(args.out_dir) / (stem + ".behavior.rkhs");
  const fs::path reward_path = fs::path(args.out_dir) / (stem + ".reward.rkhs");
  const fs::path trace_path = fs::path(args.out_dir) / (stem + ".trace.csv");

  if (!args.opt.force && fs::exists(behavior_path) && fs::exists(reward_path) &&
      fs::exists(trace_path)) {
    outcome.skipped = true;
    return outcome;
  }

  try {
    Match match = parse_match_file(fs::path(args.data_dir) / entry.file_name);
    const std::string agent = choose_controlled_agent(match);
    ReplayMdp mdp(std::move(match), agent, 0.0, args.opt.discount);

    KernelSpec spec;
    spec.sigma = args.opt.sigma;
    spec.arena_width = mdp.match().meta.arena_width;
    spec.arena_height = mdp.match().meta.arena_height;
    spec.step_length = mdp.step_length();

    auto rollouts = expert_rollouts(mdp.match(), agent, mdp.step_length());
    std::vector<Eigen::MatrixXd> episodes;
    for (const Rollout& r : rollouts) {
      Eigen::MatrixXd ep(static_cast<Eigen::Index>(r.states.size()), 6);
      for (std::size_t i = 0; i < r.states.size(); ++i)
        ep.row(static_cast<Eigen::Index>(i)) = mdp.features(r.states[i]).transpose();
      episodes.push_back(std::move(ep));
    }
    RkhsVector mu_e =
        empirical_expectation(episodes, static_cast<double>(args.opt.expect_horizon));
    save_rkhs(behavior_path, RkhsFile{"expectation", spec, mu_e});

    const double epsilon = args.opt.epsilon_fraction * norm(mu_e, spec);
    KpirlParams params =
        kpirl_params_from(args.opt, epsilon, derive_seed(args.seed, "learn-" + stem));
    auto result = run_kpirl(mdp, mu_e, spec, params);

    save_rkhs(reward_path, RkhsFile{"reward", spec, result.selected_reward()});

    std::string trace = "iteration,residual,beta,mu_distance\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
      const auto& it = result.trace[i];
      trace += std::to_string(i + 1) + ',' + fmt_double(it.residual) + ',' +
               fmt_double(it.beta) + ',' + fmt_double(it.mu_distance) + '\n';
    }
    atomic_write_file(trace_path, trace);
  } catch (const std::exception& e) {
    outcome.failed = true;
    outcome.message = e.what();
  }
  return outcome;
}

int cmd_learn(const LearnArgs& args) {
  std::vector<ManifestEntry> manifest;
  try {
    manifest = read_manifest(args.data_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (manifest.empty()) {
    std::cerr << "error: empty manifest\n";
    return 1;
  }
  fs::create_directories(args.out_dir);

  int jobs = args.opt.jobs;
  if (jobs <= 0)
    jobs = std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  jobs = std::min<int>(jobs, static_cast<int>(manifest.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= manifest.size()) break;
      LearnOutcome outcome = learn_one(args, manifest[i]);
      std::lock_guard<std::mutex> lock(log_mutex);
      if (outcome.failed) {
        failures.fetch_add(1);
        std::cerr << manifest[i].file_name << ": FAILED: " << outcome.message << "\n";
      } else if (outcome.skipped) {
        std::cout << manifest[i].file_name << ": outputs exist, skipped\n";
      } else {
        std::cout << manifest[i].file_name << ": done\n";
      }
    }
  };

  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  return failures.load() > 0 ? 3 : 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
  std::string data_dir;
  std::string learned_dir;
  std::string out_dir;
  std::uint64_t seed = 7;
  int k = 3;
  double C = 1.0;
  double perplexity = 5.0;
  int tsne_iterations = 1000;
  bool gaussian_svm_kernel = false;
};

LabeledSet load_labeled_set(const AnalyzeArgs& args, LabeledSet::Role role) {
  auto manifest = read_manifest(args.data_dir);
  LabeledSet set;
  set.role = role;
  const char* suffix =
      role == LabeledSet::Role::behavior ? ".behavior.rkhs" : ".reward.rkhs";
  bool first = true;
  for (const ManifestEntry& entry : manifest) {
    if (!entry.label) throw std::runtime_error(entry.file_name + ": manifest entry lacks a label");
    const std::string stem = fs::path(entry.file_name).stem().string();
    RkhsFile file = load_rkhs(fs::path(args.learned_dir) / (stem + suffix));
    if (first) {
      set.spec = file.spec;
      first = false;
    } else if (!set.spec.compatible(file.spec)) {
      throw std::runtime_error(stem + ": kernel spec differs from the rest of the set");
    }
    set.match_ids.push_back(stem);
    set.labels.push_back(*entry.label);
    set.vectors.push_back(std::move(file.vector));
  }
  return set;
}

struct RoleOutputs {
  double accuracy = 0.0;
  ClusterReport clusters;
};

RoleOutputs analyze_role(const AnalyzeArgs& args, const LabeledSet& set, const std::string& role) {
  const fs::path out(args.out_dir);
  RoleOutputs outputs;

  Eigen::MatrixXd d = distance_matrix(set);
  write_distance_csv(out / (role + "_distance.csv"), set.match_ids, d);

  TsneParams tp;
  // Perplexity must stay below the item count; small sets clamp it down.
  tp.perplexity = std::min(args.perplexity, (static_cast<double>(set.size()) - 1.0) / 2.0);
  tp.iterations = args.tsne_iterations;
  tp.seed = derive_seed(args.seed, "tsne-" + role);
  TsneResult embedded = tsne(d, tp);
  std::string tsne_csv = "match_id,label,x,y\n";
  for (std::size_t i = 0; i < set.size(); ++i)
    tsne_csv += set.match_ids[i] + ',' + to_string(set.labels[i]) + ',' +
                fmt_double(embedded.coords(static_cast<Eigen::Index>(i), 0)) + ',' +
                fmt_double(embedded.coords(static_cast<Eigen::Index>(i), 1)) + '\n';
  atomic_write_file(out / (role + "_tsne.csv"), tsne_csv);

  Dendrogram dendrogram = hac_complete(d);
  std::string merges = "step,cluster_a,cluster_b,height\n";
  for (std::size_t s = 0; s < dendrogram.merges.size(); ++s)
    merges += std::to_string(s) + ',' + std::to_string(dendrogram.merges[s].cluster_a) + ',' +
              std::to_string(dendrogram.merges[s].cluster_b) + ',' +
              fmt_double(dendrogram.merges[s].height) + '\n';
  atomic_write_file(out / (role + "_dendrogram.csv"), merges);

  outputs.clusters = cluster_report(dendrogram, set.labels, args.k);
  atomic_write_file(out / (role + "_clusters.txt"), format_cluster_report(outputs.clusters));
  atomic_write_file(out / (role + "_dendrogram.svg"),
                    svg_dendrogram(dendrogram, set.match_ids, outputs.clusters.assignment));

  LooResult loo = loo_evaluate(set, args.C,
                               args.gaussian_svm_kernel ? SvmKernelMode::gaussian_of_distance
                                                        : SvmKernelMode::linear_in_h);
  outputs.accuracy = loo.accuracy;
  std::string confusion_csv = "true\\pred,assault,flank,fallback\n";
  const char* names[3] = {"assault", "flank", "fallback"};
  for (int t = 0; t < 3; ++t) {
    confusion_csv += names[t];
    for (int p = 0; p < 3; ++p) confusion_csv += ',' + std::to_string(loo.confusion(t, p));
    confusion_csv += '\n';
  }
  atomic_write_file(out / (role + "_confusion.csv"), confusion_csv);
  atomic_write_file(out / (role + "_confusion.txt"), format_confusion(loo));
  return outputs;
}

int cmd_analyze(const AnalyzeArgs& args) {
  try {
    LabeledSet behavior = load_labeled_set(args, LabeledSet::Role::behavior);
    LabeledSet reward = load_labeled_set(args, LabeledSet::Role::reward);
    if (behavior.size() < 4) {
      std::cerr << "error: need at least 4 labeled items, got " << behavior.size() << "\n";
      return 1;
    }
    fs::create_directories(args.out_dir);

    RoleOutputs b = analyze_role(args, behavior, "behavior");
    RoleOutputs r = analyze_role(args, reward, "reward");

    char buf[256];
    std::string summary;
    std::snprintf(buf, sizeof buf, "behavior LOO accuracy %.4f\n", b.accuracy);
    summary += buf;
    std::snprintf(buf, sizeof buf, "reward LOO accuracy %.4f\n", r.accuracy);
    summary += buf;
    std::snprintf(buf, sizeof buf, "reward - behavior accuracy delta %.4f\n",
                  r.accuracy - b.accuracy);
    summary += buf;
    summary += "\nbehavior clusters (k=" + std::to_string(args.k) + ")\n";
    summary += format_cluster_report(b.clusters);
    summary += "\nreward clusters (k=" + std::to_string(args.k) + ")\n";
    summary += format_cluster_report(r.clusters);
    atomic_write_file(fs::path(args.out_dir) / "summary.txt", summary);
    std::cout << summary;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench-rl

struct BenchArgs {
  std::string out_file = "bench_rl.csv";
  std::string match_file;  // optional; a built-in short engagement otherwise
  int rewards = 30;
  long long budget = 10000;
  std::uint64_t seed = 7;
  double sigma = 0.25;
  double discount = 0.9;
};

Match bench_fixture_match(std::uint64_t seed) {
  GenConfig cfg;
  cfg.match_id = "bench_fixture";
  cfg.blue_strategy = Strategy::assault;
  cfg.separation = Separation::close;
  cfg.max_duration = 24.0;  // 8 recorded moves: small enough to enumerate
  cfg.kill_probability = 0.0;
  cfg.seed = seed;
  return generate_match(cfg);
}

int cmd_bench(const BenchArgs& args) {
  try {
    Match match = args.match_file.empty() ? bench_fixture_match(derive_seed(args.seed, "bench-fixture"))
                                          : parse_match_file(args.match_file);
    const std::string agent = choose_controlled_agent(match);
    ReplayMdp mdp(std::move(match), agent, 0.0, args.discount);
    KernelSpec spec{args.sigma, mdp.match().meta.arena_width, mdp.match().meta.arena_height,
                    mdp.step_length()};

    BenchReport report =
        bench_rl(mdp, spec, args.rewards, args.budget, args.discount, args.seed, 30, 2000000,
                 10000, std::max(1, mdp.tick_count() - 1));

    std::string csv = "# budget=" + std::to_string(report.budget) +
                      " rewards=" + std::to_string(report.reward_count) +
                      " seed=" + std::to_string(args.seed) + "\n";
    csv += "reward_id,solver,mean_return,interactions_used\n";
    for (const BenchRow& row : report.rows)
      csv += std::to_string(row.reward_id) + ',' + row.solver + ',' + fmt_double(row.mean_return) +
             ',' + std::to_string(row.interactions) + '\n';
    atomic_write_file(args.out_file, csv);
    std::cout << "wrote " << args.out_file << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayArgs {
  std::string match_file;
  std::string reward_file;
  std::string out_dir = ".";
  std::string agent;
  std::uint64_t seed = 7;
  int dei_iterations = 8;
  int dei_episodes = 40;
  int dei_steps = 20;
  int dei_window = 5;
  double discount = 0.9;
};

int cmd_replay(const ReplayArgs& args) {
  try {
    Match match = parse_match_file(args.match_file);
    RkhsFile reward_file = load_rkhs(args.reward_file);
    if (reward_file.spec.arena_width != match.meta.arena_width ||
        reward_file.spec.arena_height != match.meta.arena_height) {
      std::cerr << "error: reward kernel spec does not match the match arena\n";
      return 1;
    }

    const std::string agent = args.agent.empty() ? choose_controlled_agent(match) : args.agent;
    const double step = reward_file.spec.step_length;
    ReplayMdp mdp(match, agent, step > 0.0 ? step : 0.0, args.discount);
    const KernelSpec& spec = reward_file.spec;
    const RkhsVector& reward_vec = reward_file.vector;
    auto reward = [&](const Eigen::VectorXd& f) { return evaluate(reward_vec, f, spec); };

    DeiParams dei;
    dei.iterations = args.dei_iterations;
    dei.episodes_per_iter = args.dei_episodes;
    dei.steps_per_episode = args.dei_steps;
    dei.window = args.dei_window;
    dei.discount = args.discount;
    dei.seed = derive_seed(args.seed, "replay-dei");
    auto trained = direct_estimate_iteration(mdp, reward, dei);

    // Expert track straight from the recording; policy track rolled from the
    // expert's start.
    std::vector<std::pair<double, double>> expert_track, policy_track;
    for (int t = 0; t < mdp.tick_count(); ++t) {
      const AgentRecord& rec = mdp.replaced_at(t);
      expert_track.emplace_back(rec.x, rec.y);
    }
    Rng rng(derive_seed(args.seed, "replay-rollout"));
    MdpState s = mdp.initial_state();
    policy_track.emplace_back(s.x, s.y);
    while (!mdp.terminal(s)) {
      int a = trained.policy->act(mdp, s, rng);
      s = mdp.step(s, a);
      policy_track.emplace_back(s.x, s.y);
    }

    fs::create_directories(args.out_dir);
    std::string csv = "time,expert_x,expert_y,policy_x,policy_y\n";
    double total = 0.0, first_half = 0.0;
    const std::size_t n = expert_track.size();
    for (std::size_t t = 0; t < n; ++t) {
      double dx = expert_track[t].first - policy_track[t].first;
      double dy = expert_track[t].second - policy_track[t].second;
      double displacement = std::hypot(dx, dy);
      total += displacement;
      if (t < (n + 1) / 2) first_half += displacement;
      csv += fmt_double(match.ticks[t].time) + ',' + fmt_double(expert_track[t].first) + ',' +
             fmt_double(expert_track[t].second) + ',' + fmt_double(policy_track[t].first) + ',' +
             fmt_double(policy_track[t].second) + '\n';
    }
    atomic_write_file(fs::path(args.out_dir) / "overlay.csv", csv);

    const double mean_disp = total / static_cast<double>(n);
    const double first_half_mean = first_half / static_cast<double>((n + 1) / 2);
    std::string summary = "mean_displacement_m " + fmt_double(mean_disp) + "\n" +
                          "first_half_mean_displacement_m " + fmt_double(first_half_mean) + "\n";
    atomic_write_file(fs::path(args.out_dir) / "overlay_summary.txt", summary);
    atomic_write_file(fs::path(args.out_dir) / "overlay.svg",
                      svg_overlay(expert_track, policy_track, match.meta.arena_width,
                                  match.meta.arena_height));
    std::cout << summary;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"reward learning and strategy identification for recorded engagements"};
  app.require_subcommand(1);
  app.set_config("--config");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "generate a synthetic labeled dataset");
  generate->add_option("--out", gen.out_dir, "output dataset directory")->required();
  generate->add_option("--seed", gen.seed, "master seed");
  generate->add_option("--counts", gen.counts,
                       "matches per strategy: assault,flank,fallback (default 12,13,11)")
      ->delimiter(',');

  LearnArgs learn;
  auto* learn_cmd = app.add_subcommand("learn", "learn behavior expectations and rewards");
  learn_cmd->add_option("--data", learn.data_dir, "dataset directory")->required();
  learn_cmd->add_option("--out", learn.out_dir, "output directory")->required();
  learn_cmd->add_option("--seed", learn.seed, "master seed");
  learn_cmd->add_option("--sigma", learn.opt.sigma, "kernel bandwidth");
  learn_cmd->add_option("--discount", learn.opt.discount, "discount factor");
  learn_cmd->add_option("--epsilon-fraction", learn.opt.epsilon_fraction,
                        "stop threshold as a fraction of ||mu_E||");
  learn_cmd->add_option("--max-iterations", learn.opt.max_iterations, "IRL iteration cap");
  learn_cmd->add_option("--dei-iterations", learn.opt.dei_iterations, "RL iterations (I)");
  learn_cmd->add_option("--dei-episodes", learn.opt.dei_episodes, "RL episodes per iteration (M)");
  learn_cmd->add_option("--dei-steps", learn.opt.dei_steps, "RL steps per episode (T)");
  learn_cmd->add_option("--dei-window", learn.opt.dei_window, "RL observation window (W)");
  learn_cmd->add_option("--expect-episodes", learn.opt.expect_episodes,
                        "episodes per expectation estimate");
  learn_cmd->add_option("--expect-horizon", learn.opt.expect_horizon,
                        "expectation horizon (T in the estimator)");
  learn_cmd->add_option("--jobs", learn.opt.jobs, "parallel matches (0 = auto)");
  learn_cmd->add_flag("--force", learn.opt.force, "rebuild outputs that already exist");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "distance/t-SNE/cluster/classify outputs");
  analyze_cmd->add_option("--data", analyze.data_dir, "dataset directory (for the manifest)")
      ->required();
  analyze_cmd->add_option("--learned", analyze.learned_dir, "directory with learn outputs")
      ->required();
  analyze_cmd->add_option("--out", analyze.out_dir, "output directory")->required();
  analyze_cmd->add_option("--seed", analyze.seed, "master seed");
  analyze_cmd->add_option("--k", analyze.k, "cluster count for the dendrogram cut");
  analyze_cmd->add_option("--C", analyze.C, "SVM soft-margin C");
  analyze_cmd->add_option("--perplexity", analyze.perplexity, "t-SNE perplexity");
  analyze_cmd->add_option("--tsne-iterations", analyze.tsne_iterations, "t-SNE iterations");
  analyze_cmd->add_flag("--gaussian-svm-kernel", analyze.gaussian_svm_kernel,
                        "use a Gaussian of the RKHS distance instead of the inner product");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench-rl", "compare RL solvers on random kernel rewards");
  bench_cmd->add_option("--out", bench.out_file, "output CSV path");
  bench_cmd->add_option("--match", bench.match_file,
                        "match file for the replay MDP (default: built-in short engagement)");
  bench_cmd->add_option("--rewards", bench.rewards, "number of random rewards");
  bench_cmd->add_option("--budget", bench.budget, "interaction budget per solver");
  bench_cmd->add_option("--seed", bench.seed, "master seed");
  bench_cmd->add_option("--sigma", bench.sigma, "kernel bandwidth");
  bench_cmd->add_option("--discount", bench.discount, "discount factor");

  ReplayArgs replay;
  auto* replay_cmd = app.add_subcommand("replay", "overlay a reward-trained policy on its expert");
  replay_cmd->add_option("--match", replay.match_file, "match file")->required();
  replay_cmd->add_option("--reward", replay.reward_file, "learned reward file")->required();
  replay_cmd->add_option("--out", replay.out_dir, "output directory");
  replay_cmd->add_option("--agent", replay.agent, "controlled agent id (default: auto)");
  replay_cmd->add_option("--seed", replay.seed, "master seed");
  replay_cmd->add_option("--dei-iterations", replay.dei_iterations, "RL iterations (I)");
  replay_cmd->add_option("--dei-episodes", replay.dei_episodes, "RL episodes per iteration (M)");
  replay_cmd->add_option("--dei-steps", replay.dei_steps, "RL steps per episode (T)");
  replay_cmd->add_option("--dei-window", replay.dei_window, "RL observation window (W)");
  replay_cmd->add_option("--discount", replay.discount, "discount factor");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  if (generate->parsed()) return cmd_generate(gen);
  if (learn_cmd->parsed()) return cmd_learn(learn);
  if (analyze_cmd->parsed()) return cmd_analyze(analyze);
  if (bench_cmd->parsed()) return cmd_bench(bench);
  if (replay_cmd->parsed()) return cmd_replay(replay);
  std::cerr << app.help();
  return 2;
}

}  // namespace kpirl
