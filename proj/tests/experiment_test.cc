#include "tnqec/experiment.h"

#include <sstream>

#include "gtest/gtest.h"
#include "tnqec/reports.h"

using namespace tnqec;

namespace {

ExperimentConfig small_config() {
    return ExperimentConfig::parse(
        "seeds = five_qubit, six_qubit_state*2\n"
        "steps = 3\n"
        "trials = 40\n"
        "simulations = 4\n"
        "beta = 1\n"
        "eta = 0.05\n"
        "gamma = 0\n"
        "rng_seed = 7\n");
}

std::string step_log(const CampaignResult &c) {
    std::ostringstream out;
    c.write_step_log(out);
    return out.str();
}

}  // namespace

TEST(experiment, config_parse) {
    auto cfg = ExperimentConfig::parse(
        "# campaign\n"
        "seeds = five_qubit, six_qubit_state*3\n"
        "steps = 5   # five fusions\n"
        "beta = 0.5\n"
        "output_dir = runs/a\n");
    ASSERT_EQ(cfg.seeds.size(), 4);
    ASSERT_EQ(cfg.steps, 5);
    ASSERT_EQ(cfg.trials, 1000);
    ASSERT_EQ(cfg.simulations, 20);
    ASSERT_EQ(cfg.beta, 0.5);
    ASSERT_EQ(cfg.eta, 0.05);
    ASSERT_EQ(cfg.gamma, 0.0);
    ASSERT_EQ(cfg.rng_seed, 0);
    ASSERT_EQ(cfg.output_dir, "runs/a");
    ASSERT_EQ(cfg.distance_budget_bits, 30);
    ASSERT_EQ(ExperimentConfig::parse(cfg.to_text()).to_text(), cfg.to_text());
    ASSERT_EQ(cfg.environment(3).rng_seed, 3);
}

TEST(experiment, config_errors) {
    const std::string base = "seeds = five_qubit\nsteps = 1\n";
    ASSERT_THROW(ExperimentConfig::parse(base + "temperature = 3\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "steps = 2\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse("steps = 1\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse("seeds = five_qubit\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "trials = 0\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "trials = -3\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "beta = 0\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "eta = 2\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "beta = fast\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "distance_budget_bits = 99\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse(base + "just words\n"), config_error);
    ASSERT_THROW(ExperimentConfig::parse("seeds = nine_qubit\nsteps = 1\n"), config_error);
    ASSERT_THROW(ExperimentConfig::load("/nonexistent/cfg"), config_error);
}

TEST(experiment, campaign_shape) {
    auto cfg = small_config();
    auto c = run_rl(cfg);
    ASSERT_EQ(c.simulations.size(), 4);
    for (std::size_t i = 0; i < c.simulations.size(); ++i) {
        const auto &s = c.simulations[i];
        ASSERT_EQ(s.simulation, i);
        ASSERT_EQ(s.trial_signatures.size(), cfg.trials);
        for (const auto &r : s.steps) {
            ASSERT_EQ(r.simulation, i);
            ASSERT_LT(r.trial, cfg.trials);
            ASSERT_GE(r.step, 1);
            ASSERT_LE(r.step, cfg.steps);
        }
        ASSERT_FALSE(s.agent_snapshot.empty());
        ASSERT_GE(s.best_signature.d, s.trial_signatures.back().d);
    }
    auto mean = c.mean_final_distance();
    auto freq = c.optimal_frequency();
    ASSERT_EQ(mean.size(), cfg.trials);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        double m = 0, f = 0;
        for (const auto &s : c.simulations) {
            m += double(s.trial_signatures[t].d);
            f += s.trial_optimal[t];
        }
        ASSERT_DOUBLE_EQ(mean[t], m / 4);
        ASSERT_DOUBLE_EQ(freq[t], f / 4);
    }
}

TEST(experiment, replay_is_bit_identical) {
    auto cfg = small_config();
    auto a = run_rl(cfg);
    auto b = run_rl(cfg, 3);
    ASSERT_EQ(step_log(a), step_log(b));
    ASSERT_EQ(campaign_summary_json(a).dump(), campaign_summary_json(b).dump());
    for (std::size_t i = 0; i < a.simulations.size(); ++i) {
        ASSERT_EQ(a.simulations[i].agent_snapshot, b.simulations[i].agent_snapshot);
    }
    cfg.rng_seed = 8;
    ASSERT_NE(step_log(run_rl(cfg)), step_log(a));
}

TEST(experiment, table_miss_aborts_before_work) {
    auto cfg = small_config();
    CodeTables sparse = CodeTables::parse("n\tk\td_best\tsource\n17\t1\t7\tx\n");
    ASSERT_THROW(run_rl(cfg, 1, nullptr, sparse), table_miss_error);
}

TEST(reports, compare_curve_is_exact) {
    std::vector<double> freq = {0.0, 0.05, 0.1};
    auto csv = compare_csv(freq, 5, 3108105);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    ASSERT_EQ(line, "trial,rl_frequency,random_probability");
    std::size_t t = 0;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        ASSERT_EQ(std::stoul(a), t);
        ASSERT_EQ(std::stod(b), freq[t]);
        ASSERT_EQ(std::stod(c), random_search_probability(5, 3108105, t + 1));
        ++t;
    }
    ASSERT_EQ(t, freq.size());
}

TEST(reports, summary_round_trip) {
    auto c = run_rl(small_config());
    auto summary = json::parse(campaign_summary_json(c).dump());
    Signature target = c.simulations[0].trial_signatures.back();
    ASSERT_EQ(signature_frequency_from_summary(summary, target), c.signature_frequency(target));
    ASSERT_EQ(summary["mean_final_distance"].size(), 40);
    ASSERT_EQ(summary["final_signatures"].size(), 4);
    auto code = read_code(summary["codes"][0]["final_code"].get<std::string>());
    ASSERT_EQ(code, c.simulations[0].final_code);
}

TEST(reports, brute_force_report) {
    auto r = brute_force({parse_seed_list("five_qubit,six_qubit_state*3"), 3, 0});
    auto j = brute_force_json(r);
    ASSERT_EQ(j["best_signature"], "[[17,1,5]]");
    ASSERT_EQ(j["total_sequences"], 220);
    ASSERT_EQ(count_from_json(j["optimal_sequence_count"]), r.optimal_sequence_count);
    ASSERT_EQ(j["distinct_best_keys"], r.best_codes.size());
    ASSERT_EQ(j["resume_token"], 10);
    ASSERT_TRUE(j["best_codes"][0]["histogram"]["logical"].contains("5"));
    BigCount huge = sequence_count(30, 40);
    ASSERT_TRUE(count_json(huge).is_string());
    ASSERT_EQ(count_from_json(count_json(huge)), huge);
}

TEST(reports, manifest) {
    auto m = manifest_json("run-rl", small_config().to_text(), 2);
    ASSERT_EQ(m["code_tables_fnv1a64"], hex64(CodeTables::embedded().hash()));
    ASSERT_EQ(m["workers"], 2);
    ASSERT_EQ(ExperimentConfig::parse(m["config"].get<std::string>()).to_text(), small_config().to_text());
}
