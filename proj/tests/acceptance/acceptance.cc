// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any gating one fails.
// Pass --extended to add the long-running [[35,1,3]] and [[28,2,2]] jobs (never gating).

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "../test_util.h"
#include "tnqec/experiment.h"

using namespace tnqec;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    std::string name;
    double limit_seconds;
    std::function<Outcome()> check;
    bool gating = true;
};

std::string join_signatures(const std::vector<Signature> &sigs) {
    std::string out;
    for (const auto &s : sigs) {
        out += (out.empty() ? "" : " ") + s.str();
    }
    return out;
}

Outcome seed_integrity() {
    for (const auto &name : seed_names()) {
        if (!verify(seed(name)).ok()) {
            return {false, name + " fails verification"};
        }
    }
    std::size_t d5 = distance(seed("five_qubit"));
    std::size_t d4 = distance(seed("four_two_two"));
    std::size_t d10 = distance(seed("ten_one_four"));
    std::ostringstream msg;
    msg << "d = " << d5 << ", " << d4 << ", " << d10;
    return {d5 == 3 && d4 == 2 && d10 == 4, msg.str()};
}

Outcome two_five_qubit_fusion() {
    auto tn = combine({seed("five_qubit"), seed("five_qubit")});
    std::size_t hits = 0;
    for (std::size_t qa = 0; qa < 5; ++qa) {
        for (std::size_t qb = 5; qb < 10; ++qb) {
            auto r = fuse(tn, qa, qb);
            if (auto *out = std::get_if<TensorNetworkCode>(&r)) {
                const auto &c = out->code();
                hits += c.n == 8 && c.k == 2 && verify(c).ok() && distance(c) == 3;
            }
        }
    }
    return {hits >= 1, std::to_string(hits) + " of 25 leg pairs give a verified [[8,2,3]]"};
}

std::vector<BruteForceResult> sweep(const std::vector<std::string> &seeds, std::size_t max_s) {
    auto engine = std::make_shared<DistanceEngine>();
    std::vector<BruteForceResult> out;
    for (std::size_t s = 1; s <= max_s; ++s) {
        out.push_back(brute_force({seeds, s, 0}, {}, engine));
    }
    return out;
}

std::vector<BruteForceResult> &table2() {
    static std::vector<BruteForceResult> results = sweep(parse_seed_list("five_qubit,six_qubit_state*3"), 6);
    return results;
}

Outcome table2_reproduction() {
    const auto &r = table2();
    std::vector<Signature> expected = {{21, 1, 3}, {19, 1, 3}, {17, 1, 5}, {15, 1, 5}, {13, 1, 5}, {11, 1, 3}};
    std::vector<Signature> got;
    bool ok = true;
    for (std::size_t i = 0; i < r.size(); ++i) {
        got.push_back(r[i].best_signature.value_or(Signature{}));
        ok = ok && r[i].complete && got.back() == expected[i];
    }
    return {ok, join_signatures(got) + "; s=6 best d = " + std::to_string(*r[5].best_distance)};
}

Outcome inequivalent_optima() {
    const auto &r = table2()[4];
    std::set<std::map<std::size_t, std::uint64_t>> histograms;
    bool minimum_ok = true;
    for (const auto &[key, b] : r.best_codes) {
        histograms.insert(b.histogram->logical_counts);
        minimum_ok = minimum_ok && b.histogram->min_logical_weight() == 5;
    }
    std::ostringstream msg;
    msg << r.best_codes.size() << " distinct best codes, " << histograms.size() << " distinct logical histograms";
    return {r.best_codes.size() >= 2 && histograms.size() >= 2 && minimum_ok, msg.str()};
}

Outcome table3_column() {
    auto r = sweep(parse_seed_list("five_qubit,six_qubit_state*4"), 6);
    std::vector<std::size_t> expected = {3, 3, 5, 7, 5, 5};
    std::vector<Signature> got;
    bool ok = true;
    for (std::size_t i = 0; i < r.size(); ++i) {
        got.push_back(r[i].best_signature.value_or(Signature{}));
        ok = ok && r[i].complete && got.back() == Signature{27 - 2 * i, 1, expected[i]};
    }
    return {ok, join_signatures(got)};
}

Outcome sequence_count_check() {
    auto n = sequence_count(6, 8);
    return {n == 3108105, "sequence_count(6, 8) = " + n.str()};
}

Outcome random_probability_check() {
    double p = random_search_probability(5, 3108105, 1000);
    std::ostringstream msg;
    msg << std::setprecision(9) << "p = " << p;
    return {std::abs(p - 0.001608) <= 1e-6, msg.str()};
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(2024);
    std::vector<std::vector<std::string>> seed_sets = {
        {"five_qubit", "five_qubit"},
        {"five_qubit", "six_qubit_state"},
        {"four_two_two", "six_qubit_state"},
        {"five_qubit", "four_two_two"},
        {"ten_one_four"},
        {"four_two_two", "four_two_two"},
    };
    std::size_t checked = 0, mismatches = 0;
    for (std::size_t t = 0; checked < 120 && t < 2000; ++t) {
        auto tn = testing::random_fused(rng, seed_sets[t % seed_sets.size()], 10);
        const auto &c = tn.code();
        if (c.n > 10 || c.k == 0) {
            continue;
        }
        ++checked;
        mismatches += distance(c) != distance_oracle(c);
    }
    return {checked >= 100 && mismatches == 0,
            std::to_string(checked) + " codes, " + std::to_string(mismatches) + " mismatches"};
}

Outcome agent_arithmetic() {
    std::vector<std::string> failures;
    ProjectiveSimulationAgent reward({1.0, 0.0, 0.0}, 2);
    reward.record_step("s", 0);
    reward.update(2.0);
    if (std::abs(reward.h(0)[0] - 3.0) > 1e-12) {
        failures.push_back("reward update");
    }
    ProjectiveSimulationAgent damped({1.0, 0.0, 0.1}, 1);
    damped.h_mut(damped.ensure_row("s"))[0] = 2.0;
    damped.update(0.0);
    if (std::abs(damped.h(0)[0] - 1.9) > 1e-12) {
        failures.push_back("damping");
    }
    ProjectiveSimulationAgent decay({1.0, 0.05, 0.0}, 1);
    decay.record_step("s", 0);
    decay.update(0.0);
    if (std::abs(decay.g(0)[0] - 0.95) > 1e-12) {
        failures.push_back("glow decay");
    }

    std::mt19937_64 rng(7);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 1 + rng() % 21;
        ProjectiveSimulationAgent a({0.1 + uniform_unit(rng) * 4, 0.05, 0.0}, n);
        auto row = a.ensure_row("s");
        std::vector<std::size_t> allowed;
        for (std::size_t i = 0; i < n; ++i) {
            a.h_mut(row)[i] = uniform_unit(rng) * 40 - 10;
            if (rng() % 2 || (allowed.empty() && i + 1 == n)) {
                allowed.push_back(i);
            }
        }
        auto p = a.probabilities(row, allowed);
        double sum = 0;
        for (double v : p) {
            sum += v;
        }
        worst = std::max(worst, std::abs(sum - 1));
    }
    if (worst > 1e-12) {
        failures.push_back("softmax normalisation");
    }

    ExperimentConfig cfg = ExperimentConfig::parse(
        "seeds = five_qubit, six_qubit_state*3\nsteps = 4\ntrials = 60\nsimulations = 3\nrng_seed = 11\n");
    auto replay = [&] {
        auto c = run_rl(cfg);
        std::ostringstream out;
        c.write_step_log(out);
        for (const auto &s : c.simulations) {
            out << s.agent_snapshot;
        }
        return out.str();
    };
    if (replay() != replay()) {
        failures.push_back("replay");
    }
    std::string detail = failures.empty() ? "updates, softmax and replay exact" : "failed:";
    for (const auto &f : failures) {
        detail += " " + f;
    }
    return {failures.empty(), detail};
}

Outcome rl_statistical() {
    auto cfg = ExperimentConfig::parse(
        "seeds = five_qubit, six_qubit_state*3\nsteps = 5\ntrials = 1000\nsimulations = 20\n"
        "beta = 1\neta = 0.05\ngamma = 0\nrng_seed = 1\n");
    auto c = run_rl(cfg);
    std::size_t at_five = 0;
    for (const auto &s : c.simulations) {
        at_five += s.trial_signatures.back().d == 5;
    }
    return {at_five >= 8, std::to_string(at_five) + "/20 simulations end in a d=5 code"};
}

// The [[35,1,3]] sweep is far beyond one core: both checks run under a fixed budget
// and report how much of the job they covered.
Outcome fig4_brute_force() {
    BruteForceOptions opts;
    opts.distance.budget_bits = 36;
    opts.max_fusions = 20000;
    EnvironmentConfig cfg{parse_seed_list("five_qubit,six_qubit_state*5"), 8, 0};
    try {
        auto r = brute_force(cfg, opts);
        std::ostringstream msg;
        msg << "best " << (r.best_signature ? r.best_signature->str() : "none") << ", "
            << r.optimal_sequence_count << " optimal of " << r.total_sequences << " sequences";
        return {r.best_signature == Signature{19, 1, 7} && r.optimal_sequence_count == 5, msg.str()};
    } catch (const search_budget_error &e) {
        std::ostringstream msg;
        msg << "stopped after " << e.partial.fusions << " fusions with " << e.partial.end_action << " of "
            << action_count(35) << " first actions finished, " << sequence_count(35, 8)
            << " multisets in total";
        return {false, msg.str()};
    }
}

Outcome fig4_rl() {
    auto cfg = ExperimentConfig::parse(
        "seeds = five_qubit, six_qubit_state*5\nsteps = 8\ntrials = 2\nsimulations = 1\n"
        "beta = 1\neta = 0.05\ngamma = 0\nrng_seed = 1\ndistance_budget_bits = 36\n");
    auto start = std::chrono::steady_clock::now();
    run_rl(cfg);
    double per_trial = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 2;
    std::ostringstream msg;
    msg << std::setprecision(3) << per_trial << "s per trial, about " << per_trial * 20000 / 3600
        << "h for 20 simulations of 1000 trials; frequency not measured";
    return {false, msg.str()};
}

Outcome fig5_rl() {
    auto cfg = ExperimentConfig::parse(
        "seeds = four_two_two, six_qubit_state*4\nsteps = 4\ntrials = 1000\nsimulations = 20\n"
        "beta = 0.25\neta = 1\ngamma = 0\nrng_seed = 1\n");
    auto c = run_rl(cfg, 0);
    std::size_t settled = 0;
    for (const auto &s : c.simulations) {
        settled += s.trial_signatures.back() == Signature{20, 2, 6};
    }
    return {settled == 20, std::to_string(settled) + "/20 simulations end in [[20,2,6]]"};
}

}  // namespace

int main(int argc, char **argv) {
    bool extended = false;
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--extended") {
            extended = true;
        } else {
            std::cerr << "usage: " << argv[0] << " [--extended]\n";
            return 2;
        }
    }
    std::vector<Criterion> criteria = {
        {"seed integrity", 1, seed_integrity},
        {"two five-qubit codes fuse to [[8,2,3]]", 1, two_five_qubit_fusion},
        {"[[23,1,3]] brute force, s=1..6", 300, table2_reproduction},
        {"inequivalent [[13,1,5]] optima", 300, inequivalent_optima},
        {"[[29,1,3]] brute force, s=1..6", 1800, table3_column},
        {"sequence count C(s-1+A, s)", 1, sequence_count_check},
        {"random-search probability", 1, random_probability_check},
        {"distance equals oracle on random fused codes", 300, oracle_equivalence},
        {"agent arithmetic and replay", 60, agent_arithmetic},
        {"RL reaches d=5 from [[23,1,3]] in 5 steps", 3600, rl_statistical},
    };
    if (extended) {
        criteria.push_back({"[[35,1,3]] brute force, s=8", 86400, fig4_brute_force, false});
        criteria.push_back({"RL [[19,1,7]] frequency from [[35,1,3]]", 86400, fig4_rl, false});
        criteria.push_back({"RL settles on [[20,2,6]] from [[28,2,2]]", 86400, fig5_rl, false});
    }

    std::size_t failed = 0;
    for (const auto &c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = secs <= c.limit_seconds;
        bool pass = o.pass && in_time;
        if (!pass && c.gating) {
            ++failed;
        }
        std::cout << (pass ? "PASS" : "FAIL") << (c.gating ? "" : " (extended)") << "  " << c.name << "  ["
                  << std::fixed << std::setprecision(2) << secs << "s / limit " << std::setprecision(0)
                  << c.limit_seconds << "s]  " << o.detail << (in_time ? "" : "  (over time limit)") << std::endl;
    }
    std::cout << (failed ? "FAILED: " + std::to_string(failed) + " criteria" : std::string("all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
