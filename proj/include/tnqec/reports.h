#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tnqec/experiment.h"

namespace tnqec {

using json = nlohmann::ordered_json;

/// Counts that fit in 64 bits are JSON numbers, larger ones decimal strings.
inline json count_json(const BigCount &c) {
    if (c <= BigCount(std::numeric_limits<std::uint64_t>::max())) {
        return c.convert_to<std::uint64_t>();
    }
    return c.str();
}

inline BigCount count_from_json(const json &j) {
    if (j.is_number_unsigned() || j.is_number_integer()) {
        return BigCount(j.get<std::uint64_t>());
    }
    if (j.is_string()) {
        return BigCount(j.get<std::string>());
    }
    throw parse_error("expected a count, got " + j.dump());
}

inline json histogram_json(const WeightHistogram &h) {
    json out;
    json s = json::object(), l = json::object();
    for (const auto &[w, c] : h.stabilizer_counts) {
        s[std::to_string(w)] = c;
    }
    for (const auto &[w, c] : h.logical_counts) {
        l[std::to_string(w)] = c;
    }
    out["stabilizer"] = s;
    out["logical"] = l;
    return out;
}

inline json brute_force_json(const BruteForceResult &r) {
    json out;
    out["seeds"] = format_seed_list(r.seeds);
    out["steps"] = r.steps;
    out["node_count"] = r.node_count;
    out["mode"] = to_string(r.mode);
    out["complete"] = r.complete;
    out["first_action"] = r.first_action;
    out["resume_token"] = r.end_action;
    out["best_distance"] = r.best_distance ? json(*r.best_distance) : json(nullptr);
    out["best_signature"] = r.best_signature ? json(r.best_signature->str()) : json(nullptr);
    out["optimal_sequence_count"] = count_json(r.optimal_sequence_count);
    out["total_sequences"] = count_json(r.total_sequences);
    out["ordered_sequences"] = count_json(r.ordered_sequences);
    out["complete_sequences"] = count_json(r.complete_sequences);
    out["pruned_sequences"] = count_json(r.pruned_sequences);
    out["fusions"] = r.fusions;
    out["memo_entries"] = r.memo_entries;
    out["memo_hits"] = r.memo_hits;
    out["wall_seconds"] = r.wall_seconds;
    json best = json::array();
    for (const auto &[key, b] : r.best_codes) {
        json e;
        e["percept_key"] = key;
        e["code"] = write_code(b.code);
        if (b.histogram) {
            e["histogram"] = histogram_json(*b.histogram);
        }
        best.push_back(e);
    }
    out["distinct_best_keys"] = r.best_codes.size();
    out["best_codes"] = best;
    return out;
}

inline json campaign_summary_json(const CampaignResult &c) {
    json out;
    out["seeds"] = format_seed_list(c.config.seeds);
    out["steps"] = c.config.steps;
    out["trials"] = c.config.trials;
    out["simulations"] = c.config.simulations;
    out["mean_final_distance"] = c.mean_final_distance();
    out["optimal_frequency"] = c.optimal_frequency();
    json finals = json::array(), per_sim = json::array(), codes = json::array();
    for (const auto &s : c.simulations) {
        finals.push_back(s.trial_signatures.back().str());
        json row = json::array();
        for (const auto &sig : s.trial_signatures) {
            row.push_back(sig.str());
        }
        per_sim.push_back(row);
        json e;
        e["simulation"] = s.simulation;
        e["final_signature"] = s.trial_signatures.back().str();
        e["final_code"] = write_code(s.final_code);
        e["best_signature"] = s.best_signature.str();
        e["best_trial"] = s.best_trial;
        e["best_code"] = write_code(s.best_code);
        codes.push_back(e);
    }
    out["final_signatures"] = finals;
    out["trial_signatures"] = per_sim;
    out["codes"] = codes;
    return out;
}

inline json manifest_json(const std::string &command, const std::string &config_text, unsigned workers,
                          const CodeTables &tables = CodeTables::embedded()) {
    json out;
    out["command"] = command;
    out["config"] = config_text;
    out["workers"] = workers;
    out["code_tables_fnv1a64"] = hex64(tables.hash());
    out["tnqec_version"] = TNQEC_VERSION;
    out["compiler"] = __VERSION__;
    out["cxx_standard"] = long(__cplusplus);
    return out;
}

inline void write_text_file(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

/// steps.csv, summary.json, manifest.json and agents/simulation_<i>.tsv under `dir`.
inline void write_campaign(const std::filesystem::path &dir, const CampaignResult &c, unsigned workers) {
    std::ostringstream log;
    c.write_step_log(log);
    write_text_file(dir / "steps.csv", log.str());
    write_text_file(dir / "summary.json", campaign_summary_json(c).dump(2) + "\n");
    write_text_file(dir / "manifest.json", manifest_json("run-rl", c.config.to_text(), workers).dump(2) + "\n");
    for (const auto &s : c.simulations) {
        write_text_file(dir / "agents" / ("simulation_" + std::to_string(s.simulation) + ".tsv"), s.agent_snapshot);
    }
}

/// CSV of trial, RL frequency of `target`, and the random-search probability after t+1 draws.
inline std::string compare_csv(const std::vector<double> &rl_frequency, const BigCount &n_opt,
                               const BigCount &total) {
    std::ostringstream out;
    out.precision(17);
    out << "trial,rl_frequency,random_probability\n";
    for (std::size_t t = 0; t < rl_frequency.size(); ++t) {
        out << t << ',' << rl_frequency[t] << ',' << random_search_probability(n_opt, total, t + 1) << '\n';
    }
    return out.str();
}

/// RL frequency of `target` per trial, read back from a campaign summary.
inline std::vector<double> signature_frequency_from_summary(const json &summary, const Signature &target) {
    const auto &per_sim = summary.at("trial_signatures");
    if (per_sim.empty()) {
        throw parse_error("summary has no simulations");
    }
    const std::size_t trials = per_sim[0].size();
    std::vector<double> out(trials, 0.0);
    const std::string want = target.str();
    for (const auto &row : per_sim) {
        if (row.size() != trials) {
            throw parse_error("summary simulations disagree on the number of trials");
        }
        for (std::size_t t = 0; t < trials; ++t) {
            out[t] += row[t].get<std::string>() == want ? 1.0 : 0.0;
        }
    }
    for (auto &v : out) {
        v /= double(per_sim.size());
    }
    return out;
}

}  // namespace tnqec
