// tnqec: fusion-game experiments on tensor-network stabilizer codes.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "tnqec/reports.h"

using namespace tnqec;
namespace fs = std::filesystem;

namespace {

enum ExitCode {
    exit_ok = 0,
    exit_other = 1,
    exit_config = 2,
    exit_budget = 3,
    exit_table_miss = 4,
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw config_error("cannot read " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Loads a code file, or the code part of a network file.
StabilizerCode load_code(const std::string &path) {
    auto text = read_file(path);
    if (text.find("nodes:") != std::string::npos) {
        return read_network(text).code();
    }
    return read_code(text);
}

ExperimentConfig load_config(const std::string &path, const std::vector<std::string> &overrides) {
    ExperimentConfig cfg;
    std::string text = path.empty() ? "" : read_file(path);
    std::string merged;
    std::set<std::string> overridden;
    for (const auto &kv : overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw config_error("--set expects key=value, got \"" + kv + "\"");
        }
        overridden.insert(kv.substr(0, eq));
    }
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto body = line.substr(0, line.find('#'));
        auto eq = body.find('=');
        if (eq != std::string::npos) {
            auto key = body.substr(0, eq);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            if (overridden.count(key)) {
                continue;
            }
        }
        merged += line + "\n";
    }
    for (const auto &kv : overrides) {
        merged += kv + "\n";
    }
    return ExperimentConfig::parse(merged);
}

struct CommonOptions {
    std::string config;
    std::vector<std::string> set;
    unsigned workers = 1;
};

void add_config_options(CLI::App *cmd, CommonOptions &o, bool required) {
    auto *opt = cmd->add_option("-c,--config", o.config, "key=value experiment config file");
    if (required) {
        opt->required();
    }
    cmd->add_option("--set", o.set, "Override a config entry (key=value); repeatable");
    cmd->add_option("-j,--workers", o.workers, "Worker threads (0: all cores)")->capture_default_str();
}

int run_rl_command(const CommonOptions &o) {
    auto cfg = load_config(o.config, o.set);
    auto result = run_rl(cfg, o.workers);
    write_campaign(cfg.output_dir, result, o.workers);
    std::size_t optimal = 0;
    for (const auto &s : result.simulations) {
        optimal += s.trial_optimal.back();
    }
    std::cout << "simulations: " << cfg.simulations << ", trials: " << cfg.trials << "\n";
    std::cout << "final mean distance: " << result.mean_final_distance().back() << "\n";
    std::cout << "simulations ending in a best-known-distance code: " << optimal << "/" << cfg.simulations << "\n";
    std::cout << "final signatures:";
    for (const auto &s : result.simulations) {
        std::cout << ' ' << s.trial_signatures.back().str();
    }
    std::cout << "\nwrote " << (fs::path(cfg.output_dir) / "summary.json").string() << "\n";
    return exit_ok;
}

struct BruteOptions {
    CommonOptions common;
    std::string seeds;
    std::size_t steps = 0;
    std::string mode = "multiset";
    std::uint64_t max_fusions = 0;
    std::size_t resume_from = 0;
    std::string report;
    std::string histograms_dir;
    std::size_t budget_bits = 0;
};

int brute_force_command(const BruteOptions &o) {
    EnvironmentConfig env;
    std::size_t budget = 30;
    if (!o.common.config.empty()) {
        auto cfg = load_config(o.common.config, o.common.set);
        env = cfg.environment();
        budget = cfg.distance_budget_bits;
    }
    if (!o.seeds.empty()) {
        env.seeds = parse_seed_list(o.seeds);
    }
    if (o.steps) {
        env.steps = o.steps;
    }
    if (o.budget_bits) {
        budget = o.budget_bits;
    }
    if (env.seeds.empty()) {
        throw config_error("brute-force needs seeds (--seeds or a config file)");
    }
    env.validate();
    BruteForceOptions opts;
    opts.mode = parse_sequence_mode(o.mode);
    opts.distance = {budget, 1};
    opts.workers = o.common.workers;
    opts.max_fusions = o.max_fusions;
    opts.resume_from = o.resume_from;

    auto emit = [&](const BruteForceResult &r) {
        auto report = brute_force_json(r);
        if (!o.report.empty()) {
            write_text_file(o.report, report.dump(2) + "\n");
        }
        if (!o.histograms_dir.empty()) {
            std::size_t i = 0;
            for (const auto &[key, b] : r.best_codes) {
                if (!b.histogram) {
                    continue;
                }
                std::ostringstream csv;
                write_histogram_csv(csv, *b.histogram);
                write_text_file(fs::path(o.histograms_dir) / ("best_" + std::to_string(i) + ".csv"), csv.str());
                write_text_file(fs::path(o.histograms_dir) / ("best_" + std::to_string(i) + ".code"), write_code(b.code));
                ++i;
            }
        }
        std::cout << "best: " << (r.best_signature ? r.best_signature->str() : std::string("none")) << "\n";
        std::cout << "optimal sequences: " << r.optimal_sequence_count << " of " << r.total_sequences
                  << " (ordered sequences: " << r.ordered_sequences << ")\n";
        std::cout << "complete: " << r.complete_sequences << ", pruned: " << r.pruned_sequences << "\n";
        std::cout << "distinct best codes: " << r.best_codes.size() << "\n";
        std::cout << "wall seconds: " << r.wall_seconds << "\n";
    };
    try {
        emit(brute_force(env, opts));
    } catch (const search_budget_error &e) {
        emit(e.partial);
        std::cerr << "tnqec: " << e.what() << " (resume with --resume-from " << e.partial.end_action << ")\n";
        return exit_budget;
    }
    return exit_ok;
}

int random_baseline_command(const CommonOptions &o, const std::string &output) {
    auto cfg = load_config(o.config, o.set);
    auto engine = std::make_shared<DistanceEngine>(cfg.distance_options());
    std::ostringstream log;
    write_step_log_header(log);
    json summary;
    summary["seeds"] = format_seed_list(cfg.seeds);
    summary["steps"] = cfg.steps;
    summary["trials"] = cfg.trials;
    summary["simulations"] = cfg.simulations;
    json per_sim = json::array();
    std::vector<double> mean(cfg.trials, 0.0);
    for (std::size_t s = 0; s < cfg.simulations; ++s) {
        Environment env(cfg.environment(s), CodeTables::embedded(), engine);
        std::mt19937_64 rng(cfg.rng_seed + s);
        auto trials = random_baseline(env, cfg.trials, rng, s);
        json row = json::array();
        for (std::size_t t = 0; t < trials.size(); ++t) {
            for (const auto &r : trials[t].steps) {
                write_step_record(log, r);
            }
            row.push_back(trials[t].final_signature.str());
            mean[t] += double(trials[t].final_signature.d) / double(cfg.simulations);
        }
        per_sim.push_back(row);
    }
    summary["mean_final_distance"] = mean;
    summary["trial_signatures"] = per_sim;
    fs::path dir = cfg.output_dir;
    fs::path csv = output.empty() ? dir / "random_steps.csv" : fs::path(output);
    write_text_file(csv, log.str());
    write_text_file(dir / "random_summary.json", summary.dump(2) + "\n");
    write_text_file(dir / "random_manifest.json", manifest_json("random-baseline", cfg.to_text(), 1).dump(2) + "\n");
    std::cout << "wrote " << csv.string() << "\n";
    return exit_ok;
}

int distance_command(const std::string &path, bool oracle, bool histogram, std::size_t budget_bits, unsigned workers) {
    auto code = load_code(path);
    auto report = verify(code);
    if (!report.ok()) {
        throw invalid_stabilizer_error("code failed verification:\n" + report.summary());
    }
    DistanceOptions opts{budget_bits, workers};
    std::size_t d = oracle ? distance_oracle(code) : distance(code, opts);
    std::cout << Signature{code.n, code.k, d}.str() << "\n";
    if (histogram) {
        write_histogram_csv(std::cout, weight_histograms(code, opts));
    }
    return exit_ok;
}

int histogram_command(const std::string &path, const std::string &output, std::size_t budget_bits) {
    auto code = load_code(path);
    std::ostringstream csv;
    write_histogram_csv(csv, weight_histograms(code, {budget_bits, 1}));
    if (output.empty()) {
        std::cout << csv.str();
    } else {
        write_text_file(output, csv.str());
    }
    return exit_ok;
}

int fuse_demo_command(const std::string &write_path) {
    auto tn = combine({seed("five_qubit"), seed("five_qubit")});
    std::cout << "two five-qubit codes: " << Signature{tn.code().n, tn.code().k, distance(tn.code())}.str() << "\n";
    std::optional<TensorNetworkCode> first_best;
    for (std::size_t qa = 0; qa < 5; ++qa) {
        for (std::size_t qb = 5; qb < 10; ++qb) {
            auto r = fuse(tn, qa, qb);
            std::cout << "fuse qubit " << qa << " (node 0) with qubit " << qb << " (node 1): ";
            if (auto *f = std::get_if<FusionFailure>(&r)) {
                std::cout << "failed (" << to_string(*f) << ")\n";
                continue;
            }
            const auto &out = std::get<TensorNetworkCode>(r);
            std::size_t d = distance(out.code());
            std::cout << Signature{out.code().n, out.code().k, d}.str() << "\n";
            if (d == 3 && !first_best) {
                first_best = out;
            }
        }
    }
    if (first_best && !write_path.empty()) {
        write_text_file(write_path, write_network(*first_best));
        std::cout << "wrote " << write_path << "\n";
    }
    return first_best ? exit_ok : exit_other;
}

int compare_command(const std::string &summary_path, const std::string &report_path, const std::string &target,
                    const std::string &n_opt_text, const std::string &total_text, const std::string &output) {
    auto summary = json::parse(read_file(summary_path));
    BigCount n_opt, total;
    Signature sig;
    if (!report_path.empty()) {
        auto report = json::parse(read_file(report_path));
        n_opt = count_from_json(report.at("optimal_sequence_count"));
        total = count_from_json(report.at("total_sequences"));
        if (!report.at("best_signature").is_null()) {
            sig = parse_signature(report.at("best_signature").get<std::string>());
        }
    }
    if (!n_opt_text.empty()) {
        n_opt = BigCount(n_opt_text);
    }
    if (!total_text.empty()) {
        total = BigCount(total_text);
    }
    if (!target.empty()) {
        sig = parse_signature(target);
    }
    if (total < 1 || sig.n == 0) {
        throw config_error("compare needs a target signature and N (from --brute-force or --target/--total)");
    }
    auto csv = compare_csv(signature_frequency_from_summary(summary, sig), n_opt, total);
    if (output.empty()) {
        std::cout << csv;
    } else {
        write_text_file(output, csv);
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Search for tensor-network stabilizer codes by fusing seed codes."};
    app.set_version_flag("--version", std::string(TNQEC_VERSION));
    app.require_subcommand(1);

    CommonOptions rl;
    auto *rl_cmd = app.add_subcommand("run-rl", "Run a projective-simulation campaign");
    add_config_options(rl_cmd, rl, true);

    BruteOptions bf;
    auto *bf_cmd = app.add_subcommand("brute-force", "Enumerate every fusion sequence of a given length");
    add_config_options(bf_cmd, bf.common, false);
    bf_cmd->add_option("--seeds", bf.seeds, "Seed list, e.g. five_qubit,six_qubit_state*3");
    bf_cmd->add_option("-s,--steps", bf.steps, "Sequence length");
    bf_cmd->add_option("--mode", bf.mode, "multiset (non-decreasing action indices) or ordered")
        ->check(CLI::IsMember({"multiset", "ordered"}))
        ->capture_default_str();
    bf_cmd->add_option("--max-fusions", bf.max_fusions, "Stop after this many fusions (0: unlimited)");
    bf_cmd->add_option("--resume-from", bf.resume_from, "First action index to explore");
    bf_cmd->add_option("--report", bf.report, "Write a JSON report here");
    bf_cmd->add_option("--histograms-dir", bf.histograms_dir, "Write best codes and weight histograms here");
    bf_cmd->add_option("--budget-bits", bf.budget_bits, "Distance enumeration budget in bits");

    CommonOptions rb;
    std::string rb_output;
    auto *rb_cmd = app.add_subcommand("random-baseline", "Play uniformly sampled action multisets");
    add_config_options(rb_cmd, rb, true);
    rb_cmd->add_option("-o,--output", rb_output, "Step log CSV (default <output_dir>/random_steps.csv)");

    std::string code_path;
    bool oracle = false, with_histogram = false;
    std::size_t budget_bits = 30;
    unsigned distance_workers = 1;
    auto *d_cmd = app.add_subcommand("distance", "Print [[n,k,d]] of a code or network file");
    d_cmd->add_option("code", code_path, "Code or network file")->required()->check(CLI::ExistingFile);
    d_cmd->add_flag("--oracle", oracle, "Use the increasing-weight search instead of coset enumeration");
    d_cmd->add_flag("--histogram", with_histogram, "Also print the weight histogram CSV");
    d_cmd->add_option("--budget-bits", budget_bits, "Enumeration budget in bits")->capture_default_str();
    d_cmd->add_option("-j,--workers", distance_workers, "Enumeration threads (0: all cores)");

    std::string demo_write;
    auto *demo_cmd = app.add_subcommand("fuse-demo", "Fuse two five-qubit codes over every leg pair");
    demo_cmd->add_option("--write", demo_write, "Write the first distance-3 network here");

    std::string hist_code, hist_output;
    std::size_t hist_budget = 30;
    auto *h_cmd = app.add_subcommand("histogram", "Stabilizer and logical weight histograms as CSV");
    h_cmd->add_option("code", hist_code, "Code or network file")->required()->check(CLI::ExistingFile);
    h_cmd->add_option("-o,--output", hist_output, "Output CSV (default stdout)");
    h_cmd->add_option("--budget-bits", hist_budget, "Enumeration budget in bits")->capture_default_str();

    std::string cmp_summary, cmp_report, cmp_target, cmp_nopt, cmp_total, cmp_output;
    auto *c_cmd = app.add_subcommand("compare", "Join an RL summary with the random-search probability curve");
    c_cmd->add_option("--summary", cmp_summary, "summary.json from run-rl")->required()->check(CLI::ExistingFile);
    c_cmd->add_option("--brute-force", cmp_report, "Brute-force JSON report supplying n_opt, N and the target");
    c_cmd->add_option("--target", cmp_target, "Target signature, e.g. [[19,1,7]]");
    c_cmd->add_option("--n-opt", cmp_nopt, "Number of optimal sequences");
    c_cmd->add_option("--total", cmp_total, "Total number of sequences N");
    c_cmd->add_option("-o,--output", cmp_output, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*rl_cmd) {
            return run_rl_command(rl);
        }
        if (*bf_cmd) {
            return brute_force_command(bf);
        }
        if (*rb_cmd) {
            return random_baseline_command(rb, rb_output);
        }
        if (*d_cmd) {
            return distance_command(code_path, oracle, with_histogram, budget_bits, distance_workers);
        }
        if (*demo_cmd) {
            return fuse_demo_command(demo_write);
        }
        if (*h_cmd) {
            return histogram_command(hist_code, hist_output, hist_budget);
        }
        if (*c_cmd) {
            return compare_command(cmp_summary, cmp_report, cmp_target, cmp_nopt, cmp_total, cmp_output);
        }
    } catch (const config_error &e) {
        std::cerr << "tnqec: config error: " << e.what() << "\n";
        return exit_config;
    } catch (const parse_error &e) {
        std::cerr << "tnqec: parse error: " << e.what() << "\n";
        return exit_config;
    } catch (const budget_error &e) {
        std::cerr << "tnqec: budget exceeded: " << e.what() << "\n";
        return exit_budget;
    } catch (const table_miss_error &e) {
        std::cerr << "tnqec: code table miss: " << e.what() << "\n";
        return exit_table_miss;
    } catch (const std::exception &e) {
        std::cerr << "tnqec: " << e.what() << "\n";
        return exit_other;
    }
    return exit_other;
}
