#include "tnqec/agent.h"

#include <cmath>
#include <numeric>
#include <sstream>

#include "gtest/gtest.h"

using namespace tnqec;

namespace {

std::vector<std::size_t> all_actions(std::size_t n) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

}  // namespace

TEST(agent, config_validation) {
    ASSERT_THROW(ProjectiveSimulationAgent(AgentConfig{0.0, 0.1, 0.0}, 3), config_error);
    ASSERT_THROW(ProjectiveSimulationAgent(AgentConfig{1.0, 1.5, 0.0}, 3), config_error);
    ASSERT_THROW(ProjectiveSimulationAgent(AgentConfig{1.0, 0.1, -0.1}, 3), config_error);
    ASSERT_THROW(ProjectiveSimulationAgent(AgentConfig{}, 0), config_error);
}

TEST(agent, fresh_row_is_uniform) {
    ProjectiveSimulationAgent agent({}, 10);
    auto p = agent.probabilities("s", all_actions(10));
    for (double v : p) {
        ASSERT_NEAR(v, 0.1, 1e-15);
    }
    ASSERT_EQ(agent.row_count(), 1);
    for (double h : agent.h(0)) {
        ASSERT_EQ(h, 1.0);
    }
    for (double g : agent.g(0)) {
        ASSERT_EQ(g, 0.0);
    }
}

TEST(agent, softmax_examples) {
    ProjectiveSimulationAgent agent({1.0, 0.05, 0.0}, 3);
    auto row = agent.ensure_row("s");
    agent.h_mut(row)[0] = 2.0;
    auto p = agent.probabilities(row, all_actions(3));
    const double e = std::exp(1.0), e2 = std::exp(2.0);
    ASSERT_NEAR(p[0], e2 / (e2 + 2 * e), 1e-12);
    ASSERT_NEAR(p[1], e / (e2 + 2 * e), 1e-12);
    ASSERT_NEAR(p[2], e / (e2 + 2 * e), 1e-12);

    ProjectiveSimulationAgent two({1.0, 0.05, 0.0}, 2);
    auto r2 = two.ensure_row("t");
    two.h_mut(r2)[0] = 5.0;
    std::vector<std::size_t> only_first = {0};
    auto q = two.probabilities(r2, only_first);
    ASSERT_EQ(q[0], 1.0);
    ASSERT_EQ(q[1], 0.0);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        ASSERT_EQ(two.select_action("t", only_first, rng), 0);
    }
    ASSERT_THROW(two.probabilities(r2, std::vector<std::size_t>{}), precondition_error);
}

TEST(agent, glow_examples) {
    ProjectiveSimulationAgent agent({1.0, 0.05, 0.0}, 4);
    agent.record_step("a", 2);
    std::size_t ones = 0;
    for (double g : agent.g(0)) {
        ones += g == 1.0;
        ASSERT_TRUE(g == 0.0 || g == 1.0);
    }
    ASSERT_EQ(ones, 1);

    agent.update(0.0);
    agent.record_step("b", 1);
    ASSERT_NEAR(agent.g(0)[2], 0.95, 1e-12);
    ASSERT_EQ(agent.g(1)[1], 1.0);

    ProjectiveSimulationAgent direct({1.0, 1.0, 0.0}, 4);
    direct.record_step("a", 0);
    direct.update(0.0);
    direct.record_step("b", 3);
    direct.update(0.0);
    direct.record_step("c", 1);
    ASSERT_EQ(direct.g(0)[0], 0.0);
    ASSERT_EQ(direct.g(1)[3], 0.0);
    ASSERT_EQ(direct.g(2)[1], 1.0);
}

TEST(agent, update_examples) {
    ProjectiveSimulationAgent reward({1.0, 0.0, 0.0}, 2);
    reward.record_step("s", 0);
    reward.update(2.0);
    ASSERT_NEAR(reward.h(0)[0], 3.0, 1e-12);
    ASSERT_EQ(reward.h(0)[1], 1.0);

    ProjectiveSimulationAgent damped({1.0, 0.0, 0.1}, 2);
    auto row = damped.ensure_row("s");
    damped.h_mut(row)[0] = 2.0;
    damped.update(0.0);
    ASSERT_NEAR(damped.h(0)[0], 1.9, 1e-12);
    ASSERT_EQ(damped.h(0)[1], 1.0);

    ProjectiveSimulationAgent decay({1.0, 0.05, 0.0}, 2);
    decay.record_step("s", 1);
    decay.update(0.0);
    ASSERT_NEAR(decay.g(0)[1], 0.95, 1e-12);
}

TEST(agent, end_trial_resets_glow_only) {
    ProjectiveSimulationAgent agent({1.0, 0.05, 0.0}, 3);
    agent.record_step("s", 1);
    agent.update(4.0);
    agent.record_step("t", 2);
    agent.end_trial();
    for (std::size_t r = 0; r < agent.row_count(); ++r) {
        for (double g : agent.g(r)) {
            ASSERT_EQ(g, 0.0);
        }
    }
    ASSERT_NEAR(agent.h(0)[1], 5.0, 1e-12);
    ASSERT_EQ(agent.row_count(), 2);

    ProjectiveSimulationAgent fresh({1.0, 0.05, 0.0}, 3), reset({1.0, 0.05, 0.0}, 3);
    reset.end_trial();
    std::mt19937_64 r1(9), r2(9);
    for (int i = 0; i < 50; ++i) {
        ASSERT_EQ(fresh.select_action("x", all_actions(3), r1), reset.select_action("x", all_actions(3), r2));
    }
}

TEST(agent, zero_reward_fixed_point) {
    ProjectiveSimulationAgent agent({1.0, 0.3, 0.0}, 5);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        std::string key = "s" + std::to_string(rng() % 7);
        auto a = agent.select_action(key, all_actions(5), rng);
        agent.record_step(key, a);
        agent.update(0.0);
        if (i % 9 == 8) {
            agent.end_trial();
        }
    }
    for (std::size_t r = 0; r < agent.row_count(); ++r) {
        for (double h : agent.h(r)) {
            ASSERT_EQ(h, 1.0);
        }
    }
}

TEST(agent, probabilities_normalised_and_shift_invariant) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 1 + rng() % 21;
        double beta = 0.05 + uniform_unit(rng) * 3;
        ProjectiveSimulationAgent agent({beta, 0.05, 0.0}, n), shifted({beta, 0.05, 0.0}, n);
        auto row = agent.ensure_row("s");
        auto srow = shifted.ensure_row("s");
        double c = uniform_unit(rng) * 20 - 10;
        for (std::size_t a = 0; a < n; ++a) {
            double h = uniform_unit(rng) * 30 - 5;
            agent.h_mut(row)[a] = h;
            shifted.h_mut(srow)[a] = h + c;
        }
        std::vector<std::size_t> allowed;
        for (std::size_t a = 0; a < n; ++a) {
            if (rng() % 3 || allowed.empty() && a + 1 == n) {
                allowed.push_back(a);
            }
        }
        auto p = agent.probabilities(row, allowed);
        auto q = shifted.probabilities(srow, allowed);
        double total = 0;
        for (std::size_t a = 0; a < n; ++a) {
            total += p[a];
            ASSERT_NEAR(p[a], q[a], 1e-12);
            if (std::find(allowed.begin(), allowed.end(), a) == allowed.end()) {
                ASSERT_EQ(p[a], 0.0);
            }
        }
        ASSERT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(agent, sampling_follows_probabilities) {
    ProjectiveSimulationAgent agent({1.0, 0.05, 0.0}, 3);
    auto row = agent.ensure_row("s");
    agent.h_mut(row)[0] = 2.0;
    auto p = agent.probabilities(row, all_actions(3));
    std::mt19937_64 rng(17);
    std::vector<double> counts(3, 0);
    const int draws = 60000;
    for (int i = 0; i < draws; ++i) {
        ++counts[agent.select_action("s", all_actions(3), rng)];
    }
    for (std::size_t a = 0; a < 3; ++a) {
        double sd = std::sqrt(p[a] * (1 - p[a]) / draws);
        ASSERT_NEAR(counts[a] / draws, p[a], 5 * sd);
    }
}

TEST(agent, replay_is_bit_identical) {
    auto play = [](std::uint64_t seed) {
        ProjectiveSimulationAgent agent({0.7, 0.2, 0.01}, 6);
        std::mt19937_64 rng(seed), env(99);
        std::vector<std::size_t> choices;
        for (int trial = 0; trial < 30; ++trial) {
            for (int step = 0; step < 4; ++step) {
                std::string key = "p" + std::to_string(env() % 5);
                auto a = agent.select_action(key, all_actions(6), rng);
                choices.push_back(a);
                agent.record_step(key, a);
                agent.update(double(int(env() % 5)) - 2.0);
            }
            agent.end_trial();
        }
        std::ostringstream snap;
        agent.write_snapshot(snap);
        return std::pair{choices, snap.str()};
    };
    auto a = play(4), b = play(4), c = play(5);
    ASSERT_EQ(a.first, b.first);
    ASSERT_EQ(a.second, b.second);
    ASSERT_NE(a.first, c.first);
}

TEST(agent, snapshot_format) {
    ProjectiveSimulationAgent agent({1.0, 0.0, 0.0}, 2);
    agent.record_step("key", 1);
    agent.update(1.5);
    std::ostringstream out;
    agent.write_snapshot(out);
    ASSERT_EQ(out.str(), "key\t1\t2.5\n");
}
