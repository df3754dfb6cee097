#include <doctest.h>

#include <cmath>

#include "kpirl/bench.hpp"
#include "kpirl/rl.hpp"
#include "test_util.hpp"

using namespace kpirl;
using testutil::ChainEnv;
using testutil::chain_reward;

TEST_CASE("n-step return") {
  std::vector<double> ones{1.0, 1.0, 1.0};
  CHECK(n_step_return(ones, 0.5, 3) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(n_step_return(ones, 0.5, 1) == 1.0);
  std::vector<double> zeros{0.0, 0.0};
  CHECK(n_step_return(zeros, 0.9, 2) == 0.0);
  CHECK_THROWS_AS(n_step_return(std::span<const double>(zeros), 0.9, 3), std::invalid_argument);
}

TEST_CASE("observation halving average") {
  QObservations store;
  Eigen::VectorXd f(2);
  f << 0.25, 0.75;
  ObsKey key = store.make_key(f, 3);

  store.update(key, 3.0);
  CHECK(store.at(key) == 3.0);  // absent key stores the value directly

  QObservations store2;
  store2.update(key, 5.0);
  store2.update(key, 3.0);
  CHECK(store2.at(key) == 4.0);

  store2.update(key, 4.0);
  CHECK(store2.at(key) == 4.0);  // fixed point

  // Ordered pair property: absent -> v then v' gives (v + v')/2.
  QObservations store3;
  store3.update(key, -2.0);
  store3.update(key, 7.0);
  CHECK(store3.at(key) == 2.5);
}

TEST_CASE("observation keys quantize at 1e-3") {
  QObservations store;
  Eigen::VectorXd a(1), b(1), c(1);
  a << 0.1234;
  b << 0.12341;  // rounds to the same cell
  c << 0.1244;
  CHECK(store.make_key(a, 0) == store.make_key(b, 0));
  CHECK(!(store.make_key(a, 0) == store.make_key(c, 0)));
  CHECK(!(store.make_key(a, 0) == store.make_key(a, 1)));
}

TEST_CASE("start selection heuristics") {
  SUBCASE("single candidate is always chosen") {
    Rng rng(1);
    for (int i = 0; i < 10; ++i)
      CHECK(select_start_index({2.5}, StartHeuristic::softmax, 1.0, 0.1, rng) == 0);
  }
  SUBCASE("equal q splits evenly") {
    Rng rng(2);
    int first = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
      if (select_softmax({1.0, 1.0}, 1.0, rng) == 0) ++first;
    CHECK(std::abs(first / static_cast<double>(draws) - 0.5) < 0.05);
  }
  SUBCASE("softmax with q=(1,0), temperature 1 picks e:1") {
    Rng rng(3);
    int first = 0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i)
      if (select_softmax({1.0, 0.0}, 1.0, rng) == 0) ++first;
    const double expected = std::exp(1.0) / (std::exp(1.0) + 1.0);  // 0.731...
    CHECK(std::abs(first / static_cast<double>(draws) - expected) < 0.02);
  }
  SUBCASE("greedy picks the max, epsilon-greedy mostly does") {
    Rng rng(4);
    CHECK(select_start_index({0.0, 3.0, 1.0}, StartHeuristic::greedy, 1.0, 0.1, rng) == 1);
    int greedy_picks = 0;
    for (int i = 0; i < 10000; ++i)
      if (select_start_index({0.0, 3.0, 1.0}, StartHeuristic::epsilon_greedy, 1.0, 0.3, rng) == 1)
        ++greedy_picks;
    CHECK(greedy_picks > 7000);  // 0.7 + 0.3/3 = 0.8 expected
  }
}

TEST_CASE("softmax start over a fitted regressor") {
  ChainEnv env;
  std::vector<std::pair<int, int>> candidates{{0, 0}, {0, 1}};

  SUBCASE("unfitted regressor draws uniformly") {
    RegressionTree blank;
    Rng rng(8);
    int second = 0;
    for (int i = 0; i < 10000; ++i)
      if (softmax_start(env, blank, candidates, 1.0, rng).second == 1) ++second;
    CHECK(std::abs(second / 10000.0 - 0.5) < 0.05);
  }

  SUBCASE("fitted regressor weights candidates by exp(q)") {
    // Q(s=0, a=0) = 1, Q(s=0, a=1) = 0: expect e : 1 selection odds.
    Eigen::MatrixXd X(2, 2);
    Eigen::VectorXd y(2);
    X << 0, 0, 0, 1;
    y << 1.0, 0.0;
    RegressionTree tree;
    tree.fit(X, y, TreeParams{0, 1});
    Rng rng(9);
    int first = 0;
    for (int i = 0; i < 10000; ++i)
      if (softmax_start(env, tree, candidates, 1.0, rng).second == 0) ++first;
    const double expected = std::exp(1.0) / (std::exp(1.0) + 1.0);
    CHECK(std::abs(first / 10000.0 - expected) < 0.02);
  }

  SUBCASE("single candidate is always chosen") {
    RegressionTree blank;
    Rng rng(10);
    std::vector<std::pair<int, int>> one{{1, 3}};
    for (int i = 0; i < 5; ++i) {
      auto pick = softmax_start(env, blank, one, 1.0, rng);
      CHECK(pick.first == 1);
      CHECK(pick.second == 3);
    }
  }
}

TEST_CASE("greedy policies break ties toward the lowest action") {
  ChainEnv env;
  // Constant predictions: every action ties, so the first one wins.
  Eigen::MatrixXd X(2, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(2, 1.0);
  X << 0, 0, 1, 1;
  GreedyTreePolicy<ChainEnv> policy;
  policy.tree.fit(X, y, TreeParams{0, 1});
  Rng rng(0);
  CHECK(policy.act(env, 0, rng) == 0);
  CHECK(policy.act(env, 1, rng) == 0);
}

TEST_CASE("value iteration solves the chain") {
  ChainEnv env;
  auto vi = value_iteration(env, chain_reward, 0.9, 1e-12);
  REQUIRE(vi.values.size() == 2);
  // State ids: discovery order from start_states {0, 1}.
  CHECK(vi.values[0] == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(vi.values[1] == doctest::Approx(10.0).epsilon(1e-6));
  Rng rng(0);
  CHECK(vi.policy->act(env, 0, rng) == 1);  // go

  SUBCASE("gamma zero collapses V to r") {
    auto vi0 = value_iteration(env, chain_reward, 0.0, 1e-12);
    CHECK(vi0.values[0] == 0.0);
    CHECK(vi0.values[1] == 1.0);
  }
  SUBCASE("zero reward gives zero values") {
    auto viz = value_iteration(
        env, [](const Eigen::VectorXd&) { return 0.0; }, 0.9, 1e-12);
    CHECK(viz.values[0] == 0.0);
    CHECK(viz.values[1] == 0.0);
  }
}

TEST_CASE("enumeration respects its budget") {
  ChainEnv env;
  CHECK_THROWS_AS(enumerate_reachable(env, 1), CapacityError);
  auto mdp = enumerate_reachable(env, 10);
  CHECK(mdp.states.size() == 2);
}

TEST_CASE("direct estimate iteration learns the chain") {
  ChainEnv env;
  DeiParams p;
  p.iterations = 4;
  p.episodes_per_iter = 16;
  p.steps_per_episode = 8;
  p.window = 4;
  p.tree.min_leaf = 1;  // four observation keys in total: let the tree isolate them
  p.seed = 5;
  auto result = direct_estimate_iteration(env, chain_reward, p);
  Rng rng(0);
  CHECK(result.policy->act(env, 0, rng) == 1);  // matches the VI optimum

  SUBCASE("interaction count is bounded by I*M*T") {
    CHECK(result.interactions <= 4LL * 16 * 8);
    CHECK(result.interactions == 4LL * 16 * 8);  // chain never truncates
  }
  SUBCASE("same seed reproduces the same policy") {
    auto again = direct_estimate_iteration(env, chain_reward, p);
    Rng r2(0);
    for (int s = 0; s <= 1; ++s)
      CHECK(result.policy->act(env, s, r2) == again.policy->act(env, s, r2));
  }
}

TEST_CASE("target variations still solve the chain and stay off by default") {
  ChainEnv env;
  DeiParams base;
  base.iterations = 4;
  base.episodes_per_iter = 16;
  base.steps_per_episode = 8;
  base.window = 4;
  base.tree.min_leaf = 1;
  base.seed = 5;
  CHECK(base.bootstrap_targets == false);
  CHECK(base.every_visit_mc == false);

  Rng rng(0);
  DeiParams boot = base;
  boot.bootstrap_targets = true;
  auto with_boot = direct_estimate_iteration(env, chain_reward, boot);
  CHECK(with_boot.policy->act(env, 0, rng) == 1);

  DeiParams mc = base;
  mc.every_visit_mc = true;
  auto with_mc = direct_estimate_iteration(env, chain_reward, mc);
  CHECK(with_mc.policy->act(env, 0, rng) == 1);

  // The variations actually change the fitted values.
  auto plain = direct_estimate_iteration(env, chain_reward, base);
  Eigen::VectorXd probe(2);
  probe << 0.0, 1.0;
  CHECK(plain.tree.predict(probe) != with_mc.tree.predict(probe));
}

TEST_CASE("one episode with T = W gives exactly one observation") {
  ChainEnv env;
  DeiParams p;
  p.iterations = 1;
  p.episodes_per_iter = 1;
  p.steps_per_episode = 4;
  p.window = 4;
  p.seed = 11;
  auto result = direct_estimate_iteration(env, chain_reward, p);
  CHECK(result.observation_count == 1);
}

TEST_CASE("q-learning matches the oracle on the chain") {
  ChainEnv env;
  QlParams qp;
  qp.seed = 21;
  qp.episode_cap = 20;
  auto policy = q_learning_baseline(env, chain_reward, 10000, 0.9, qp);
  Rng rng(0);
  CHECK(policy->act(env, 0, rng) == 1);

  SUBCASE("budget zero returns an untrained policy") {
    auto blank = q_learning_baseline(env, chain_reward, 0, 0.9, qp);
    Rng r(0);
    int a = blank->act(env, 0, r);
    CHECK(a >= 0);
    CHECK(a < 2);
  }
  SUBCASE("fixed seed reproduces") {
    auto again = q_learning_baseline(env, chain_reward, 10000, 0.9, qp);
    Rng r(0);
    for (int s = 0; s <= 1; ++s) CHECK(policy->act(env, s, r) == again->act(env, s, r));
  }
}

TEST_CASE("policy evaluation matches the Bellman value") {
  ChainEnv env;
  auto vi = value_iteration(env, chain_reward, 0.9, 1e-13);
  std::vector<int> starts{0};
  double v = evaluate_policy_from(env, *vi.policy, chain_reward,
                                  std::span<const int>(starts), 400, 0.9, 7);
  CHECK(v == doctest::Approx(9.0).epsilon(1e-9));

  SUBCASE("zero reward evaluates to zero") {
    double z = evaluate_policy_from(
        env, *vi.policy, [](const Eigen::VectorXd&) { return 0.0; },
        std::span<const int>(starts), 400, 0.9, 7);
    CHECK(z == 0.0);
  }
  SUBCASE("table and greedy-regressor policies with equal actions evaluate equally") {
    // Fit a tree that reproduces the optimal Q ordering.
    Eigen::MatrixXd X(4, 2);
    Eigen::VectorXd y(4);
    X << 0, 0, 0, 1, 1, 0, 1, 1;
    y << 0.0, 1.0, 1.0, 1.0;  // prefer "go" at s0, indifferent at s1 -> ties to 0? no: equal
    GreedyTreePolicy<ChainEnv> greedy;
    greedy.tree.fit(X, y, TreeParams{0, 1});
    double vg = evaluate_policy_from(env, greedy, chain_reward, std::span<const int>(starts), 400,
                                     0.9, 7);
    CHECK(vg == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("sampled-start evaluation is deterministic and mixes start values") {
  ChainEnv env;
  auto vi = value_iteration(env, chain_reward, 0.9, 1e-13);
  double a = evaluate_policy(env, *vi.policy, chain_reward, 64, 400, 0.9, 5);
  double b = evaluate_policy(env, *vi.policy, chain_reward, 64, 400, 0.9, 5);
  CHECK(a == b);
  // Starts mix s0 (value 9) and s1 (value 10).
  CHECK(a >= 9.0 - 1e-9);
  CHECK(a <= 10.0 + 1e-9);
}

TEST_CASE("value iteration dominates other solvers on the chain") {
  ChainEnv env;
  KernelSpec spec;
  spec.sigma = 0.5;
  BenchReport report = bench_rl(env, spec, 3, 2000, 0.9, 99, 6, 1000, 400);
  REQUIRE(!report.rows.empty());
  for (int k = 0; k < 3; ++k) {
    double vi = 0.0;
    bool have_vi = false;
    for (const BenchRow& row : report.rows)
      if (row.reward_id == k && row.solver == "value_iteration") {
        vi = row.mean_return;
        have_vi = true;
      }
    REQUIRE(have_vi);
    for (const BenchRow& row : report.rows)
      if (row.reward_id == k) CHECK(row.mean_return <= vi + 1e-6);
  }
}

TEST_CASE("dei budget shaping never exceeds the budget") {
  for (long long budget : {1LL, 10LL, 100LL, 1000LL, 10000LL, 12345LL}) {
    DeiParams p = dei_params_for_budget(budget, 0.9, 0);
    CHECK(static_cast<long long>(p.iterations) * p.episodes_per_iter * p.steps_per_episode <=
          budget);
    CHECK(p.window <= p.steps_per_episode);
    CHECK(p.window >= 1);
  }
  DeiParams p = dei_params_for_budget(10000, 0.9, 0);
  CHECK(p.iterations == 10);
  CHECK(p.episodes_per_iter == 50);
  CHECK(p.steps_per_episode == 20);
}
