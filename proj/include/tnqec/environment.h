#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tnqec/code_tables.h"
#include "tnqec/distance.h"

namespace tnqec {

struct Signature {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t d = 0;

    std::string str() const {
        return "[[" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(d) + "]]";
    }

    auto operator<=>(const Signature &) const = default;
};

/// Parses "[[n,k,d]]" or "n,k,d".
inline Signature parse_signature(std::string_view text) {
    std::string s(text);
    if (s.size() >= 4 && s.rfind("[[", 0) == 0 && s.substr(s.size() - 2) == "]]") {
        s = s.substr(2, s.size() - 4);
    }
    Signature sig;
    char c1 = 0, c2 = 0;
    long long n = -1, k = -1, d = -1;
    std::istringstream in(s);
    std::string rest;
    if (!(in >> n >> c1 >> k >> c2 >> d) || c1 != ',' || c2 != ',' || (in >> rest) || n < 0 || k < 0 || d < 0) {
        throw parse_error("bad code signature \"" + std::string(text) + "\"");
    }
    sig.n = std::size_t(n);
    sig.k = std::size_t(k);
    sig.d = std::size_t(d);
    return sig;
}

struct EnvironmentConfig {
    std::vector<std::string> seeds;
    std::size_t steps = 1;
    std::uint64_t rng_seed = 0;

    void validate() const {
        if (seeds.empty()) {
            throw config_error("at least one seed code is required");
        }
        for (const auto &s : seeds) {
            const auto &names = seed_names();
            if (std::find(names.begin(), names.end(), s) == names.end()) {
                throw config_error("unknown seed code \"" + s + "\"");
            }
        }
        if (steps < 1) {
            throw config_error("steps must be at least 1");
        }
    }
};

/// Comma-separated seed names; "name*count" repeats a name.
inline std::vector<std::string> parse_seed_list(std::string_view text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t");
            auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        item = trim(item);
        std::size_t count = 1;
        if (auto star = item.find('*'); star != std::string::npos) {
            auto num = trim(item.substr(star + 1));
            std::size_t used = 0;
            long long c = 0;
            try {
                c = std::stoll(num, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0 || used != num.size() || c < 1) {
                throw config_error("bad repeat count in seed entry \"" + item + "\"");
            }
            count = std::size_t(c);
            item = trim(item.substr(0, star));
        }
        if (item.empty()) {
            throw config_error("empty seed name in \"" + std::string(text) + "\"");
        }
        out.insert(out.end(), count, item);
    }
    if (out.empty()) {
        throw config_error("empty seed list");
    }
    return out;
}

inline std::string format_seed_list(const std::vector<std::string> &seeds) {
    std::string out;
    for (std::size_t i = 0; i < seeds.size();) {
        std::size_t j = i;
        while (j < seeds.size() && seeds[j] == seeds[i]) {
            ++j;
        }
        if (!out.empty()) {
            out += ',';
        }
        out += seeds[i];
        if (j - i > 1) {
            out += '*' + std::to_string(j - i);
        }
        i = j;
    }
    return out;
}

inline TensorNetworkCode initial_network(const std::vector<std::string> &seeds) {
    std::vector<StabilizerCode> codes;
    for (const auto &s : seeds) {
        codes.push_back(seed(s));
    }
    return combine(codes);
}

struct StepOutcome {
    std::string percept;
    int reward = 0;
    bool done = false;
    std::vector<Action> allowed;
    Signature signature;
    std::optional<FusionFailure> failure;
};

/// The fusion game. Rewards follow the change in distance, with +1 replacing a
/// negative change that lands on a best-known-distance code, and -d_old for a
/// fusion that measures a logical qubit.
class Environment {
   public:
    Environment(EnvironmentConfig cfg, const CodeTables &tables = CodeTables::embedded(),
                std::shared_ptr<DistanceEngine> engine = std::make_shared<DistanceEngine>())
        : cfg_(std::move(cfg)), tables_(&tables), engine_(std::move(engine)) {
        cfg_.validate();
        initial_ = initial_network(cfg_.seeds);
        initial_key_ = percept_key(initial_.code());
    }

    StepOutcome reset() {
        state_ = initial_;
        key_ = initial_key_;
        d_ = engine_->distance(state_.code(), key_);
        step_index_ = 0;
        done_ = false;
        started_ = true;
        return outcome(0, std::nullopt);
    }

    StepOutcome step(Action a) {
        if (!started_) {
            throw precondition_error("step called before reset");
        }
        if (done_) {
            throw precondition_error("the episode has terminated; call reset");
        }
        if (!is_allowed(state_, a)) {
            throw precondition_error("action (" + std::to_string(a.i) + "," + std::to_string(a.j) +
                                     ") is not allowed in the current state");
        }
        ++step_index_;
        auto result = apply_action(state_, a);
        if (auto *failure = std::get_if<FusionFailure>(&result)) {
            done_ = true;
            return outcome(-int(d_), *failure);
        }
        state_ = std::get<TensorNetworkCode>(std::move(result));
        key_ = percept_key(state_.code());
        std::size_t d_old = d_;
        d_ = engine_->distance(state_.code(), key_);
        int reward = int(d_) - int(d_old);
        if (reward < 0 && d_ == tables_->best_known_distance(state_.code().n, state_.code().k)) {
            reward = 1;
        }
        done_ = step_index_ == cfg_.steps;
        auto out = outcome(reward, std::nullopt);
        if (out.allowed.empty()) {
            done_ = out.done = true;
        }
        return out;
    }

    const EnvironmentConfig &config() const {
        return cfg_;
    }
    const TensorNetworkCode &state() const {
        return state_;
    }
    const std::string &percept() const {
        return key_;
    }
    Signature signature() const {
        return {state_.code().n, state_.code().k, d_};
    }
    std::size_t step_index() const {
        return step_index_;
    }
    bool done() const {
        return done_;
    }
    std::size_t node_count() const {
        return initial_.node_count();
    }
    std::size_t action_count() const {
        return tnqec::action_count(node_count());
    }
    const CodeTables &tables() const {
        return *tables_;
    }
    const std::shared_ptr<DistanceEngine> &engine() const {
        return engine_;
    }

   private:
    StepOutcome outcome(int reward, std::optional<FusionFailure> failure) const {
        StepOutcome o;
        o.percept = key_;
        o.reward = reward;
        o.done = done_;
        o.allowed = allowed_actions(state_);
        o.signature = signature();
        o.failure = failure;
        return o;
    }

    EnvironmentConfig cfg_;
    const CodeTables *tables_;
    std::shared_ptr<DistanceEngine> engine_;
    TensorNetworkCode initial_;
    std::string initial_key_;
    TensorNetworkCode state_;
    std::string key_;
    std::size_t d_ = 0;
    std::size_t step_index_ = 0;
    bool done_ = false;
    bool started_ = false;
};

struct StepRecord {
    std::size_t simulation = 0;
    std::size_t trial = 0;
    std::size_t step = 0;
    Action action;
    Signature signature;
    int reward = 0;
    bool done = false;
};

inline void write_step_log_header(std::ostream &out) {
    out << "simulation,trial,step,action_i,action_j,n,k,d,reward,done\n";
}

inline void write_step_record(std::ostream &out, const StepRecord &r) {
    out << r.simulation << ',' << r.trial << ',' << r.step << ',' << r.action.i << ',' << r.action.j << ','
        << r.signature.n << ',' << r.signature.k << ',' << r.signature.d << ',' << r.reward << ','
        << (r.done ? 1 : 0) << '\n';
}

}  // namespace tnqec
