#pragma once

#include <atomic>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "tnqec/agent.h"
#include "tnqec/search.h"

namespace tnqec {

/// Flat key=value experiment description.
struct ExperimentConfig {
    std::vector<std::string> seeds;
    std::size_t steps = 0;
    std::size_t trials = 1000;
    std::size_t simulations = 20;
    double beta = 1.0;
    double eta = 0.05;
    double gamma = 0.0;
    std::uint64_t rng_seed = 0;
    std::string output_dir = "out";
    std::size_t distance_budget_bits = 30;

    static const std::vector<std::string> &keys() {
        static const std::vector<std::string> k = {"seeds", "steps",   "trials",   "simulations", "beta",
                                                   "eta",   "gamma",   "rng_seed", "output_dir",  "distance_budget_bits"};
        return k;
    }

    void set(const std::string &key, const std::string &value) {
        auto unsigned_value = [&](std::size_t min) {
            std::size_t used = 0;
            unsigned long long v = 0;
            try {
                if (!value.empty() && value[0] == '-') {
                    throw std::invalid_argument("negative");
                }
                v = std::stoull(value, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0 || used != value.size() || v < min) {
                throw config_error(key + ": expected an integer >= " + std::to_string(min) + ", got \"" + value + "\"");
            }
            return v;
        };
        auto real_value = [&] {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(value, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0 || used != value.size()) {
                throw config_error(key + ": expected a number, got \"" + value + "\"");
            }
            return v;
        };
        if (key == "seeds") {
            seeds = parse_seed_list(value);
        } else if (key == "steps") {
            steps = unsigned_value(1);
        } else if (key == "trials") {
            trials = unsigned_value(1);
        } else if (key == "simulations") {
            simulations = unsigned_value(1);
        } else if (key == "beta") {
            beta = real_value();
        } else if (key == "eta") {
            eta = real_value();
        } else if (key == "gamma") {
            gamma = real_value();
        } else if (key == "rng_seed") {
            rng_seed = unsigned_value(0);
        } else if (key == "output_dir") {
            if (value.empty()) {
                throw config_error("output_dir must not be empty");
            }
            output_dir = value;
        } else if (key == "distance_budget_bits") {
            distance_budget_bits = unsigned_value(1);
        } else {
            throw config_error("unknown config key \"" + key + "\"");
        }
    }

    static ExperimentConfig parse(std::string_view text) {
        ExperimentConfig cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        std::size_t line_no = 0;
        std::set<std::string> seen;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) {
                line.resize(hash);
            }
            auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) {
                continue;
            }
            auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw config_error("line " + std::to_string(line_no) + ": expected key=value");
            }
            auto trim = [](std::string s) {
                auto lo = s.find_first_not_of(" \t\r");
                auto hi = s.find_last_not_of(" \t\r");
                return lo == std::string::npos ? std::string() : s.substr(lo, hi - lo + 1);
            };
            auto key = trim(line.substr(0, eq));
            auto value = trim(line.substr(eq + 1));
            if (!seen.insert(key).second) {
                throw config_error("line " + std::to_string(line_no) + ": duplicate key \"" + key + "\"");
            }
            cfg.set(key, value);
        }
        cfg.validate();
        return cfg;
    }

    static ExperimentConfig load(const std::string &path) {
        std::ifstream in(path);
        if (!in) {
            throw config_error("cannot read config file " + path);
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    void validate() const {
        if (seeds.empty()) {
            throw config_error("missing required key \"seeds\"");
        }
        if (steps == 0) {
            throw config_error("missing required key \"steps\"");
        }
        environment().validate();
        agent().validate();
        if (trials < 1 || simulations < 1) {
            throw config_error("trials and simulations must be at least 1");
        }
        if (distance_budget_bits < 1 || distance_budget_bits > detail::max_budget_bits) {
            throw config_error("distance_budget_bits must lie in [1, " + std::to_string(detail::max_budget_bits) +
                               "]");
        }
    }

    EnvironmentConfig environment(std::size_t simulation = 0) const {
        return {seeds, steps, rng_seed + simulation};
    }
    AgentConfig agent() const {
        return {beta, eta, gamma};
    }
    DistanceOptions distance_options(unsigned workers = 1) const {
        return {distance_budget_bits, workers};
    }

    /// Canonical key=value text; parse(to_text()) reproduces the config.
    std::string to_text() const {
        std::ostringstream out;
        out.precision(17);
        out << "seeds=" << format_seed_list(seeds) << '\n'
            << "steps=" << steps << '\n'
            << "trials=" << trials << '\n'
            << "simulations=" << simulations << '\n'
            << "beta=" << beta << '\n'
            << "eta=" << eta << '\n'
            << "gamma=" << gamma << '\n'
            << "rng_seed=" << rng_seed << '\n'
            << "output_dir=" << output_dir << '\n'
            << "distance_budget_bits=" << distance_budget_bits << '\n';
        return out.str();
    }
};

struct SimulationResult {
    std::size_t simulation = 0;
    std::vector<StepRecord> steps;
    /// Environment signature at the end of each trial.
    std::vector<Signature> trial_signatures;
    /// Whether that signature meets the best known distance for its (n, k).
    std::vector<bool> trial_optimal;
    StabilizerCode final_code;
    /// Highest-distance end-of-trial code, earliest trial on ties.
    StabilizerCode best_code;
    Signature best_signature;
    std::size_t best_trial = 0;
    std::string agent_snapshot;
};

struct CampaignResult {
    ExperimentConfig config;
    std::vector<SimulationResult> simulations;

    std::vector<double> mean_final_distance() const {
        std::vector<double> out(config.trials, 0.0);
        for (std::size_t t = 0; t < config.trials; ++t) {
            for (const auto &s : simulations) {
                out[t] += double(s.trial_signatures[t].d);
            }
            out[t] /= double(simulations.size());
        }
        return out;
    }

    std::vector<double> optimal_frequency() const {
        std::vector<double> out(config.trials, 0.0);
        for (std::size_t t = 0; t < config.trials; ++t) {
            for (const auto &s : simulations) {
                out[t] += s.trial_optimal[t] ? 1.0 : 0.0;
            }
            out[t] /= double(simulations.size());
        }
        return out;
    }

    /// Fraction of simulations whose state at the end of trial t has `target`.
    std::vector<double> signature_frequency(const Signature &target) const {
        std::vector<double> out(config.trials, 0.0);
        for (std::size_t t = 0; t < config.trials; ++t) {
            for (const auto &s : simulations) {
                out[t] += s.trial_signatures[t] == target ? 1.0 : 0.0;
            }
            out[t] /= double(simulations.size());
        }
        return out;
    }

    void write_step_log(std::ostream &out) const {
        write_step_log_header(out);
        for (const auto &s : simulations) {
            for (const auto &r : s.steps) {
                write_step_record(out, r);
            }
        }
    }
};

/// One simulation: a fresh agent plays `trials` episodes; the rng drives action sampling only.
inline SimulationResult run_simulation(const ExperimentConfig &cfg, std::size_t simulation,
                                       std::shared_ptr<DistanceEngine> engine,
                                       const CodeTables &tables = CodeTables::embedded()) {
    Environment env(cfg.environment(simulation), tables, std::move(engine));
    ProjectiveSimulationAgent agent(cfg.agent(), env.action_count());
    std::mt19937_64 rng(cfg.rng_seed + simulation);
    const std::size_t nodes = env.node_count();

    SimulationResult res;
    res.simulation = simulation;
    res.steps.reserve(cfg.trials * cfg.steps);
    std::vector<std::size_t> allowed;
    bool have_best = false;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        auto o = env.reset();
        std::size_t step = 0;
        while (!o.done) {
            allowed.clear();
            for (auto a : o.allowed) {
                allowed.push_back(action_index(a, nodes));
            }
            std::string key = o.percept;
            std::size_t choice = agent.select_action(key, allowed, rng);
            agent.record_step(key, choice);
            Action a = action_at(choice, nodes);
            o = env.step(a);
            agent.update(double(o.reward));
            res.steps.push_back({simulation, t, ++step, a, o.signature, o.reward, o.done});
        }
        agent.end_trial();
        auto sig = env.signature();
        res.trial_signatures.push_back(sig);
        res.trial_optimal.push_back(tables.contains(sig.n, sig.k) && sig.d == tables.best_known_distance(sig.n, sig.k));
        if (!have_best || sig.d > res.best_signature.d) {
            have_best = true;
            res.best_signature = sig;
            res.best_code = env.state().code();
            res.best_trial = t;
        }
        if (t + 1 == cfg.trials) {
            res.final_code = env.state().code();
        }
    }
    std::ostringstream snap;
    agent.write_snapshot(snap);
    res.agent_snapshot = snap.str();
    return res;
}

/// All simulations, distributed over `workers` threads and gathered by simulation index.
inline CampaignResult run_rl(const ExperimentConfig &cfg, unsigned workers = 1,
                             std::shared_ptr<DistanceEngine> engine = nullptr,
                             const CodeTables &tables = CodeTables::embedded()) {
    cfg.validate();
    if (!engine) {
        engine = std::make_shared<DistanceEngine>(cfg.distance_options());
    }
    // Tables must cover every signature the campaign can reach.
    {
        auto root = initial_network(cfg.seeds);
        for (std::size_t s = 0; s <= cfg.steps && 2 * s <= root.code().n; ++s) {
            tables.best_known_distance(root.code().n - 2 * s, root.code().k);
        }
    }
    CampaignResult out;
    out.config = cfg;
    out.simulations.resize(cfg.simulations);
    workers = workers ? workers : std::max(1u, std::thread::hardware_concurrency());
    workers = unsigned(std::min<std::size_t>(workers, cfg.simulations));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < cfg.simulations; i = next.fetch_add(1)) {
            try {
                out.simulations[i] = run_simulation(cfg, i, engine, tables);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = cfg.simulations;
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(work);
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace tnqec
