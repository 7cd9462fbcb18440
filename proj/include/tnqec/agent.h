#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "tnqec/errors.h"

namespace tnqec {

struct AgentConfig {
    double beta = 1.0;
    double eta = 0.05;
    double gamma = 0.0;

    void validate() const {
        if (!(beta > 0) || !std::isfinite(beta)) {
            throw config_error("beta must be positive");
        }
        if (!(eta >= 0 && eta <= 1)) {
            throw config_error("eta must lie in [0, 1]");
        }
        if (!(gamma >= 0 && gamma <= 1)) {
            throw config_error("gamma must lie in [0, 1]");
        }
    }
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform_unit(std::mt19937_64 &rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

/// Two-layer projective simulation: percept rows, one column per action, with
/// h-values (initialised to 1) and glow values (initialised to 0).
class ProjectiveSimulationAgent {
   public:
    ProjectiveSimulationAgent(AgentConfig cfg, std::size_t action_count) : cfg_(cfg), actions_(action_count) {
        cfg_.validate();
        if (actions_ == 0) {
            throw config_error("agent needs at least one action");
        }
    }

    std::size_t ensure_row(const std::string &key) {
        auto [it, inserted] = rows_.emplace(key, keys_.size());
        if (inserted) {
            keys_.push_back(key);
            h_.insert(h_.end(), actions_, 1.0);
            g_.insert(g_.end(), actions_, 0.0);
            dirty_.push_back(0);
        }
        return it->second;
    }

    /// Softmax of beta * h over the row, zeroed outside `allowed` and renormalised.
    std::vector<double> probabilities(std::size_t row, std::span<const std::size_t> allowed) const {
        if (allowed.empty()) {
            throw precondition_error("action selection needs at least one allowed action");
        }
        const double *h = &h_[row * actions_];
        double top = -INFINITY;
        for (auto a : allowed) {
            check_action(a);
            top = std::max(top, h[a]);
        }
        std::vector<double> p(actions_, 0.0);
        double total = 0;
        for (auto a : allowed) {
            p[a] = std::exp(cfg_.beta * (h[a] - top));
            total += p[a];
        }
        for (auto a : allowed) {
            p[a] /= total;
        }
        return p;
    }

    std::vector<double> probabilities(const std::string &key, std::span<const std::size_t> allowed) {
        return probabilities(ensure_row(key), allowed);
    }

    std::size_t select_action(const std::string &key, std::span<const std::size_t> allowed, std::mt19937_64 &rng) {
        auto p = probabilities(ensure_row(key), allowed);
        double u = uniform_unit(rng);
        double acc = 0;
        for (auto a : allowed) {
            acc += p[a];
            if (u < acc) {
                return a;
            }
        }
        for (auto it = allowed.rbegin(); it != allowed.rend(); ++it) {
            if (p[*it] > 0) {
                return *it;
            }
        }
        return allowed.back();
    }

    /// Marks the traversed edge: its glow becomes 1.
    void record_step(const std::string &key, std::size_t action) {
        check_action(action);
        std::size_t idx = ensure_row(key) * actions_ + action;
        if (g_[idx] == 0.0) {
            glowing_.push_back(idx);
        }
        g_[idx] = 1.0;
    }

    /// h += reward * g + gamma * (1 - h), then g *= (1 - eta).
    void update(double reward) {
        for (auto idx : glowing_) {
            dirty_[idx / actions_] = 1;
        }
        if (cfg_.gamma != 0.0) {
            // Rows never touched hold h = 1, a fixed point of the damping term.
            for (std::size_t r = 0; r < keys_.size(); ++r) {
                if (!dirty_[r]) {
                    continue;
                }
                double *h = &h_[r * actions_];
                const double *g = &g_[r * actions_];
                for (std::size_t a = 0; a < actions_; ++a) {
                    h[a] = h[a] + reward * g[a] + cfg_.gamma * (1.0 - h[a]);
                }
            }
        } else {
            for (auto idx : glowing_) {
                h_[idx] = h_[idx] + reward * g_[idx];
            }
        }
        const double keep = 1.0 - cfg_.eta;
        for (auto idx : glowing_) {
            g_[idx] *= keep;
        }
    }

    void end_trial() {
        for (auto idx : glowing_) {
            g_[idx] = 0.0;
        }
        glowing_.clear();
    }

    const AgentConfig &config() const {
        return cfg_;
    }
    std::size_t action_count() const {
        return actions_;
    }
    std::size_t row_count() const {
        return keys_.size();
    }
    const std::string &key(std::size_t row) const {
        return keys_.at(row);
    }
    std::span<const double> h(std::size_t row) const {
        return {h_.data() + row * actions_, actions_};
    }
    std::span<const double> g(std::size_t row) const {
        return {g_.data() + row * actions_, actions_};
    }
    std::span<double> h_mut(std::size_t row) {
        dirty_.at(row) = 1;
        return {h_.data() + row * actions_, actions_};
    }

    /// One line per percept: key, then the h-values, tab separated.
    void write_snapshot(std::ostream &out) const {
        auto old = out.precision(17);
        for (std::size_t r = 0; r < keys_.size(); ++r) {
            out << keys_[r];
            for (auto v : h(r)) {
                out << '\t' << v;
            }
            out << '\n';
        }
        out.precision(old);
    }

   private:
    void check_action(std::size_t a) const {
        if (a >= actions_) {
            throw precondition_error("action index " + std::to_string(a) + " out of range");
        }
    }

    AgentConfig cfg_;
    std::size_t actions_;
    std::unordered_map<std::string, std::size_t> rows_;
    std::vector<std::string> keys_;
    std::vector<double> h_;
    std::vector<double> g_;
    std::vector<char> dirty_;
    std::vector<std::size_t> glowing_;
};

}  // namespace tnqec
