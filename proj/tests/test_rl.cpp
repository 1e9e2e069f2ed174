#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "selfish/ddpg.hpp"
#include "selfish/dqn.hpp"
#include "selfish/replay.hpp"
#include "selfish/training.hpp"

using namespace selfish;

namespace {

Transition make_transition(std::vector<double> obs, double action, double reward,
                           std::vector<double> next_obs, bool terminal) {
  Transition t;
  t.obs = std::move(obs);
  t.action = action;
  t.reward = reward;
  t.next_obs = std::move(next_obs);
  t.terminal = terminal;
  return t;
}

}  // namespace

TEST_CASE("q_target") {
  const std::vector<double> next_q = {3.0, 10.0, 2.0};
  CHECK(q_target(-1000.0, true, next_q, 0.9) == -1000.0);
  CHECK(q_target(1.0, false, next_q, 1.0) == doctest::Approx(11.0));
  CHECK(q_target(1.0, false, next_q, 0.0) == doctest::Approx(1.0));
  CHECK(q_target(2.0, false, next_q, 0.5) == doctest::Approx(7.0));
  CHECK_THROWS_AS(q_target(1.0, false, std::vector<double>{}, 0.9),
                  std::invalid_argument);
}

TEST_CASE("epsilon_greedy") {
  const std::vector<double> q = {0.1, 0.7, 0.3, 0.2, 0.05};

  SUBCASE("epsilon 0 is pure argmax") {
    SplitMix64 rng(51);
    for (int i = 0; i < 200; ++i) CHECK(epsilon_greedy(q, 0.0, rng) == 1);
  }

  SUBCASE("epsilon 1 explores uniformly") {
    SplitMix64 rng(52);
    std::vector<int> counts(5, 0);
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[epsilon_greedy(q, 1.0, rng)];
    for (int c : counts)
      CHECK(std::fabs(static_cast<double>(c) / n - 0.2) < 0.02);
  }

  SUBCASE("epsilon 0.1 picks the argmax 92% of the time") {
    // 0.9 greedy + 0.1 * (1/5) exploration landing on the argmax
    SplitMix64 rng(53);
    int greedy = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
      if (epsilon_greedy(q, 0.1, rng) == 1) ++greedy;
    CHECK(std::fabs(static_cast<double>(greedy) / n - 0.92) < 0.01);
  }
}

TEST_CASE("replay buffer is a strict FIFO ring") {
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);

  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    buf.push(make_transition({static_cast<double>(i)}, i, 0.0, {0.0}, false));
    CHECK(buf.size() <= 3);
  }
  REQUIRE(buf.size() == 3);
  // pushes 0..4 with capacity 3 leave 2,3,4; index 0 is the oldest
  CHECK(buf[0].obs[0] == 2.0);
  CHECK(buf[1].obs[0] == 3.0);
  CHECK(buf[2].obs[0] == 4.0);
  CHECK(buf.capacity() == 3);
}

TEST_CASE("ornstein-uhlenbeck noise") {
  SUBCASE("zero sigma decays geometrically toward mu") {
    OuNoise n{0.15, 0.0, 0.0, 1.0};
    SplitMix64 rng(54);
    CHECK(n.step(rng) == doctest::Approx(0.85));
    CHECK(n.step(rng) == doctest::Approx(0.7225));
    n.reset();
    CHECK(n.x == 0.0);
    CHECK(n.step(rng) == 0.0);  // mu is a fixed point
  }

  SUBCASE("stationary variance matches sigma^2 / (1 - (1-theta)^2)") {
    OuNoise n{0.15, 0.0, 0.3, 0.0};
    SplitMix64 rng(55);
    // discard burn-in, then accumulate
    for (int i = 0; i < 1000; ++i) n.step(rng);
    double sum = 0.0, sum2 = 0.0;
    const int steps = 1000000;
    for (int i = 0; i < steps; ++i) {
      const double x = n.step(rng);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / steps;
    const double var = sum2 / steps - mean * mean;
    const double expected = 0.3 * 0.3 / (1.0 - 0.85 * 0.85);
    CHECK(var == doctest::Approx(expected).epsilon(0.10));
    CHECK(std::fabs(mean) < 0.05);
  }
}

TEST_CASE("dqn_train_step") {
  DqnConfig cfg;
  cfg.gamma = 0.0;
  cfg.learning_rate = 0.01;
  cfg.batch_size = 64;  // >= buffer: deterministic full-batch mode

  SUBCASE("skips until the buffer can fill a batch") {
    ReplayBuffer buf(100);
    for (int i = 0; i < 63; ++i)
      buf.push(make_transition({0.1, 0.2}, 0, 1.0, {0.1, 0.2}, false));
    SplitMix64 rng(56);
    MlpParams q = init_params(MlpSpec::make(2, 1, 4, 5), rng);
    const MlpParams before = q;
    AdamState adam = AdamState::make(q, cfg.learning_rate);
    const TrainStepResult r = dqn_train_step(q, q, buf, adam, cfg, rng);
    CHECK_FALSE(r.applied);
    CHECK(q == before);
  }

  SUBCASE("full-batch regression drives the loss down and to the rewards") {
    // four one-hot states, gamma 0: Q(s, a_s) must converge to the reward.
    // Fill the buffer to exactly the batch size: that is the deterministic
    // full-batch regime (an in-order pass, no sampling).
    const std::vector<double> rewards = {7.0, -2.0, 3.5, 0.25};
    const std::vector<int> actions = {0, 2, 4, 1};
    ReplayBuffer buf(64);
    for (int copy = 0; copy < 16; ++copy)
      for (int s = 0; s < 4; ++s) {
        std::vector<double> obs(4, 0.0);
        obs[s] = 1.0;
        buf.push(make_transition(obs, actions[s], rewards[s], obs, false));
      }

    SplitMix64 rng(57);
    MlpParams q = init_params(MlpSpec::make(4, 2, 16, 5), rng);
    AdamState adam = AdamState::make(q, cfg.learning_rate);

    const double loss0 = dqn_loss(q, q, buf, cfg.gamma);
    const std::uint64_t rng_state = rng.state();
    double loss100 = 0.0;
    for (int step = 0; step < 3000; ++step) {
      const TrainStepResult r = dqn_train_step(q, q, buf, adam, cfg, rng);
      REQUIRE(r.applied);
      if (step == 99) loss100 = r.loss;
    }
    CHECK(loss100 < loss0);  // strict improvement within 100 steps
    CHECK(rng.state() == rng_state);  // full-batch mode draws nothing

    ForwardCache cache;
    for (int s = 0; s < 4; ++s) {
      std::vector<double> obs(4, 0.0);
      obs[s] = 1.0;
      const std::vector<double>& qv = mlp_forward(q, obs, cache);
      CHECK(qv[actions[s]] == doctest::Approx(rewards[s]).epsilon(0.02));
    }
  }

  SUBCASE("sampled mode consumes the rng and still applies") {
    ReplayBuffer buf(256);
    SplitMix64 rng(58);
    for (int i = 0; i < 200; ++i)
      buf.push(make_transition({rng.uniform(0, 1), rng.uniform(0, 1)},
                               rng.uniform_int(5), rng.uniform(-1, 1),
                               {rng.uniform(0, 1), rng.uniform(0, 1)}, false));
    MlpParams q = init_params(MlpSpec::make(2, 1, 8, 5), rng);
    AdamState adam = AdamState::make(q, 0.001);
    const std::uint64_t before = rng.state();
    const TrainStepResult r = dqn_train_step(q, q, buf, adam, DqnConfig{}, rng);
    CHECK(r.applied);
    CHECK(rng.state() != before);
  }
}

TEST_CASE("ddpg components") {
  SUBCASE("make_ddpg_nets shapes and target equality") {
    DdpgConfig cfg;
    SplitMix64 rng(59);
    const DdpgNets nets = make_ddpg_nets(9, cfg, rng);
    CHECK(nets.actor.spec.input_width() == 9);
    CHECK(nets.actor.spec.output_width() == 1);
    CHECK(nets.actor.spec.num_layers() == 6);
    CHECK(nets.critic.spec.input_width() == 10);  // obs + scaled action
    CHECK(nets.critic.spec.num_layers() == 6);
    CHECK(nets.target_actor == nets.actor);
    CHECK(nets.target_critic == nets.critic);
  }

  SUBCASE("actor update with zero action gradient changes nothing") {
    SplitMix64 rng(60);
    MlpParams actor = init_params(MlpSpec::make(3, 2, 8, 1), rng);
    const MlpParams before = actor;
    AdamState adam = AdamState::make(actor, 0.01);
    const std::vector<double> obs = {0.1, 0.5, 0.9};
    const std::vector<double>* batch[] = {&obs, &obs};
    ddpg_actor_update(actor, adam, batch, [](std::span<const double>, double) {
      return 0.0;
    });
    CHECK(actor == before);
  }

  SUBCASE("a frozen quadratic critic pulls the actor output to its peak") {
    // climbing -(a - 3)^2 must park the policy at a = 3
    SplitMix64 rng(61);
    MlpParams actor = init_params(MlpSpec::make(4, 2, 8, 1), rng);
    AdamState adam = AdamState::make(actor, 0.01);
    const std::vector<double> obs = {0.2, 0.4, 0.6, 0.8};
    const std::vector<double>* batch[] = {&obs};
    ForwardCache cache;
    for (int step = 0; step < 2000; ++step)
      ddpg_actor_update(actor, adam, batch,
                        [](std::span<const double>, double a) { return -2.0 * (a - 3.0); });
    CHECK(std::fabs(mlp_forward(actor, obs, cache)[0] - 3.0) < 0.05);
  }

  SUBCASE("tau = 1 turns the soft update into a hard copy") {
    DdpgConfig cfg;
    cfg.tau = 1.0;
    cfg.batch_size = 8;
    cfg.gamma = 0.9;
    SplitMix64 rng(62);
    DdpgNets nets = make_ddpg_nets(3, cfg, rng);
    ReplayBuffer buf(16);
    for (int i = 0; i < 8; ++i)
      buf.push(make_transition({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)},
                               rng.uniform(-90, 90), rng.uniform(-1, 1),
                               {rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)},
                               false));
    const DdpgStepResult r = ddpg_train_step(nets, buf, cfg, rng);
    CHECK(r.applied);
    CHECK(std::isfinite(r.critic_loss));
    CHECK(nets.target_actor == nets.actor);
    CHECK(nets.target_critic == nets.critic);
  }

  SUBCASE("small tau moves the target a proportional fraction") {
    DdpgConfig cfg;
    cfg.tau = 0.001;
    cfg.batch_size = 4;
    SplitMix64 rng(63);
    DdpgNets nets = make_ddpg_nets(2, cfg, rng);
    ReplayBuffer buf(8);
    for (int i = 0; i < 4; ++i)
      buf.push(make_transition({0.3, 0.6}, 10.0, 0.5, {0.3, 0.6}, true));
    const MlpParams target_before = nets.target_critic;
    ddpg_train_step(nets, buf, cfg, rng);
    // target moved, but only by tau of the live-target gap
    bool any_moved = false;
    for (std::size_t l = 0; l < nets.target_critic.weights.size(); ++l)
      for (std::size_t k = 0; k < nets.target_critic.weights[l].size(); ++k) {
        const double moved =
            nets.target_critic.weights[l][k] - target_before.weights[l][k];
        const double gap = nets.critic.weights[l][k] - target_before.weights[l][k];
        if (gap != 0.0) {
          any_moved = true;
          CHECK(moved == doctest::Approx(0.001 * gap).epsilon(1e-9));
        }
      }
    CHECK(any_moved);
  }
}

TEST_CASE("dqn training loop") {
  WorldConfig world;
  world.num_agents = 4;
  DqnConfig cfg;
  cfg.training_steps = 2500;
  cfg.warmup_steps = 100;
  cfg.observable_neighbors = 2;
  cfg.hidden_layers = 2;
  cfg.hidden_width = 8;
  cfg.checkpoint_interval_episodes = 0;

  SUBCASE("episode accounting and the copy protocol") {
    const TrainRun run = run_training_dqn(world, cfg, 71, {});
    REQUIRE(!run.episodes.empty());
    CHECK(run.algo == "dqn");
    CHECK(run.seed == 71);
    CHECK(run.observable_neighbors == 2);

    long total = 0;
    for (std::size_t i = 0; i < run.episodes.size(); ++i) {
      const EpisodeRecord& e = run.episodes[i];
      CHECK(e.episode == static_cast<long>(i));
      CHECK(e.length >= 1);
      CHECK(e.length <= world.max_episode_steps);
      total += e.length;
      // +1 per survived step, -1000 on the terminal one
      const bool caught_return = (e.ret == doctest::Approx(e.length - 1001.0));
      const bool survived_return = (e.ret == doctest::Approx(e.length));
      CHECK((caught_return || survived_return));
      if (i + 1 < run.episodes.size())
        if (e.length < world.max_episode_steps) CHECK(caught_return);
      CHECK(e.explore_param == cfg.epsilon);
    }
    CHECK(total == cfg.training_steps);

    // the final boundary copies the learner into the shared policy
    CHECK(run.copied_policy == run.policy);
    CHECK(run.policy.all_finite());
    CHECK(run.policy.spec.input_width() == 3 * (2 + 2));
    CHECK(run.policy.spec.output_width() == 5);
  }

  SUBCASE("deterministic in the seed") {
    const TrainRun a = run_training_dqn(world, cfg, 72, {});
    const TrainRun b = run_training_dqn(world, cfg, 72, {});
    const TrainRun c = run_training_dqn(world, cfg, 73, {});
    CHECK(a.policy == b.policy);
    CHECK(a.episodes.size() == b.episodes.size());
    CHECK(a.policy != c.policy);
  }

  SUBCASE("checkpoint callback cadence") {
    DqnConfig ck = cfg;
    ck.checkpoint_interval_episodes = 2;
    std::vector<long> seen;
    bool final_seen = false;
    const TrainRun run = run_training_dqn(world, ck, 74, [&](long ep, const MlpParams& p) {
      CHECK(p.all_finite());
      if (ep < 0)
        final_seen = true;
      else
        seen.push_back(ep);
    });
    CHECK(final_seen);
    CHECK(seen == run.checkpoint_episodes);
    for (long ep : seen) CHECK((ep + 1) % 2 == 0);
  }

  SUBCASE("population must cover the observation") {
    WorldConfig tiny = world;
    tiny.num_agents = 2;  // needs observable_neighbors + 1 = 3
    CHECK_THROWS_AS(run_training_dqn(tiny, cfg, 75, {}), std::invalid_argument);
  }

  SUBCASE("divergence raises after checkpointing the last good net") {
    DqnConfig bad = cfg;
    bad.learning_rate = 1e150;
    bad.warmup_steps = 0;
    bad.batch_size = 2;
    bad.training_steps = 500;
    int checkpoints = 0;
    CHECK_THROWS_AS(run_training_dqn(world, bad, 76,
                                     [&](long, const MlpParams& p) {
                                       CHECK(p.all_finite());
                                       ++checkpoints;
                                     }),
                    TrainingDiverged);
    CHECK(checkpoints >= 1);
  }
}

TEST_CASE("ddpg training loop") {
  WorldConfig world;
  world.num_agents = 3;
  DdpgConfig cfg;
  cfg.training_steps = 1200;
  cfg.warmup_steps = 100;
  cfg.batch_size = 32;
  cfg.buffer_size = 4096;
  cfg.observable_neighbors = 1;
  cfg.actor_hidden_layers = 2;
  cfg.actor_hidden_width = 8;
  cfg.critic_hidden_layers = 2;
  cfg.critic_hidden_width = 8;
  cfg.checkpoint_interval_episodes = 0;

  const TrainRun run = run_training_ddpg(world, cfg, 81, {});
  CHECK(run.algo == "ddpg");
  REQUIRE(!run.episodes.empty());
  long total = 0;
  for (const EpisodeRecord& e : run.episodes) {
    CHECK(e.length >= 1);
    total += e.length;
    CHECK(e.explore_param == cfg.ou_sigma);
  }
  CHECK(total == cfg.training_steps);
  CHECK(run.policy.all_finite());
  CHECK(run.policy.spec.input_width() == 9);
  CHECK(run.policy.spec.output_width() == 1);
  CHECK(run.copied_policy == run.policy);

  SUBCASE("deterministic in the seed") {
    const TrainRun again = run_training_ddpg(world, cfg, 81, {});
    CHECK(again.policy == run.policy);
  }
}
