#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "tnqec/environment.h"

namespace tnqec {

using BigCount = boost::multiprecision::cpp_int;

inline BigCount binomial(std::size_t n, std::size_t r) {
    if (r > n) {
        return 0;
    }
    r = std::min(r, n - r);
    BigCount out = 1;
    for (std::size_t i = 1; i <= r; ++i) {
        out *= n - r + i;
        out /= i;
    }
    return out;
}

/// Number of length-s multisets over node_count(node_count+1)/2 actions.
inline BigCount sequence_count(std::size_t node_count, std::size_t s) {
    if (s < 1) {
        throw precondition_error("sequence_count needs s >= 1");
    }
    return binomial(s - 1 + action_count(node_count), s);
}

/// Number of ordered length-s action sequences.
inline BigCount ordered_sequence_count(std::size_t node_count, std::size_t s) {
    return boost::multiprecision::pow(BigCount(action_count(node_count)), unsigned(s));
}

/// Chance that t independent uniform draws from N sequences hit one of n_opt optimal ones.
inline double random_search_probability(const BigCount &n_opt, const BigCount &total, std::size_t t) {
    if (total < 1 || n_opt < 0 || n_opt > total) {
        throw precondition_error("random_search_probability needs 0 <= n_opt <= N and N >= 1");
    }
    if (t == 0 || n_opt == 0) {
        return 0.0;
    }
    if (n_opt == total) {
        return 1.0;
    }
    double q = n_opt.convert_to<double>() / total.convert_to<double>();
    return -std::expm1(double(t) * std::log1p(-q));
}

enum class SequenceMode {
    multiset,
    ordered,
};

inline const char *to_string(SequenceMode m) {
    return m == SequenceMode::multiset ? "multiset" : "ordered";
}

inline SequenceMode parse_sequence_mode(std::string_view s) {
    if (s == "multiset") {
        return SequenceMode::multiset;
    }
    if (s == "ordered") {
        return SequenceMode::ordered;
    }
    throw config_error("unknown sequence mode \"" + std::string(s) + "\" (expected multiset or ordered)");
}

struct BruteForceOptions {
    SequenceMode mode = SequenceMode::multiset;
    DistanceOptions distance;
    /// Worker threads over first actions (0: hardware concurrency).
    unsigned workers = 1;
    /// Stop after this many fusions (0: unlimited).
    std::uint64_t max_fusions = 0;
    /// First action index to explore; actions below it are skipped.
    std::size_t resume_from = 0;
    /// Exclusive upper bound on first action indices (0: all).
    std::size_t resume_to = 0;
    bool collect_best = true;
    bool histograms = true;
};

struct BestCode {
    std::string key;
    StabilizerCode code;
    std::optional<WeightHistogram> histogram;
};

struct BruteForceResult {
    std::vector<std::string> seeds;
    std::size_t steps = 0;
    std::size_t node_count = 0;
    SequenceMode mode = SequenceMode::multiset;
    std::optional<std::size_t> best_distance;
    std::optional<Signature> best_signature;
    BigCount optimal_sequence_count = 0;
    BigCount complete_sequences = 0;
    BigCount pruned_sequences = 0;
    /// Multiset count C(s - 1 + A, s), the denominator used for random-search comparisons.
    BigCount total_sequences = 0;
    /// A^s, the number of ordered sequences.
    BigCount ordered_sequences = 0;
    /// Distinct best codes by percept key, in key order.
    std::map<std::string, BestCode> best_codes;
    std::uint64_t fusions = 0;
    std::uint64_t memo_entries = 0;
    std::uint64_t memo_hits = 0;
    double wall_seconds = 0;
    /// First actions covered: [first_action, end_action).
    std::size_t first_action = 0;
    std::size_t end_action = 0;
    bool complete = true;

    /// Sequences the enumeration is responsible for in the covered range.
    BigCount enumerated_sequences() const {
        return complete_sequences + pruned_sequences;
    }
};

/// Enumeration stopped early; `partial` covers first actions [first_action, end_action)
/// and end_action is the resume token.
struct search_budget_error : budget_error {
    search_budget_error(const std::string &what, BruteForceResult partial)
        : budget_error(what), partial(std::move(partial)) {
    }
    BruteForceResult partial;
};

namespace detail {

struct SubtreeSummary {
    std::optional<std::size_t> best;
    BigCount best_count = 0;
    BigCount complete = 0;
    BigCount pruned = 0;

    void absorb(const SubtreeSummary &o) {
        if (o.best && (!best || *o.best > *best)) {
            best = o.best;
            best_count = o.best_count;
        } else if (o.best && best && *o.best == *best) {
            best_count += o.best_count;
        }
        complete += o.complete;
        pruned += o.pruned;
    }
};

struct fusion_budget_exhausted {};

class Explorer {
   public:
    Explorer(SequenceMode mode, std::size_t node_count, std::shared_ptr<DistanceEngine> engine,
             std::atomic<std::uint64_t> &fusions, std::uint64_t max_fusions)
        : mode_(mode),
          nodes_(node_count),
          actions_(action_count(node_count)),
          engine_(std::move(engine)),
          fusions_(fusions),
          max_fusions_(max_fusions) {
    }

    /// Number of sequences of length `remaining` whose first action is >= `min_action`.
    BigCount completions(std::size_t remaining, std::size_t min_action) const {
        if (remaining == 0) {
            return 1;
        }
        if (mode_ == SequenceMode::ordered) {
            return boost::multiprecision::pow(BigCount(actions_), unsigned(remaining));
        }
        std::size_t avail = actions_ - min_action;
        return binomial(remaining + avail - 1, remaining);
    }

    std::optional<TensorNetworkCode> child(const TensorNetworkCode &tn, std::size_t a) {
        Action act = action_at(a, nodes_);
        if (!is_allowed(tn, act)) {
            return std::nullopt;
        }
        if (max_fusions_ && fusions_.fetch_add(1) >= max_fusions_) {
            throw fusion_budget_exhausted{};
        }
        if (!max_fusions_) {
            fusions_.fetch_add(1, std::memory_order_relaxed);
        }
        auto res = apply_action(tn, act);
        if (auto *next = std::get_if<TensorNetworkCode>(&res)) {
            return std::move(*next);
        }
        return std::nullopt;
    }

    /// Summary of all sequences of length `remaining` from `tn` starting with an action
    /// >= min_action (multiset mode; ordered mode ignores min_action).
    SubtreeSummary explore(const TensorNetworkCode &tn, const std::string &skey, std::size_t remaining,
                           std::size_t min_action) {
        if (remaining == 0) {
            SubtreeSummary leaf;
            leaf.best = engine_->distance(tn.code());
            leaf.best_count = 1;
            leaf.complete = 1;
            return leaf;
        }
        std::string mkey = memo_key(skey, remaining, min_action);
        if (auto it = memo_.find(mkey); it != memo_.end()) {
            ++hits_;
            return it->second;
        }
        SubtreeSummary out;
        std::size_t lo = mode_ == SequenceMode::multiset ? min_action : 0;
        for (std::size_t a = lo; a < actions_; ++a) {
            out.absorb(explore_action(tn, remaining, a));
        }
        memo_.emplace(std::move(mkey), out);
        return out;
    }

    /// Sequences of length `remaining` from `tn` whose first action is exactly `a`.
    SubtreeSummary explore_action(const TensorNetworkCode &tn, std::size_t remaining, std::size_t a) {
        auto next = child(tn, a);
        if (!next) {
            SubtreeSummary dead;
            dead.pruned = completions(remaining - 1, a);
            return dead;
        }
        return explore(*next, state_key(*next), remaining - 1, a);
    }

    /// Visits every complete sequence below (tn, a) whose final distance equals `best`.
    template <class Leaf>
    void collect_action(const TensorNetworkCode &tn, std::size_t remaining, std::size_t a, std::size_t best,
                        Leaf &&leaf) {
        auto next = child(tn, a);
        if (!next) {
            return;
        }
        collect(*next, state_key(*next), remaining - 1, a, best, leaf);
    }

    std::uint64_t memo_entries() const {
        return memo_.size();
    }
    std::uint64_t memo_hits() const {
        return hits_;
    }

   private:
    std::string memo_key(const std::string &skey, std::size_t remaining, std::size_t min_action) const {
        std::string k = skey;
        k += '@';
        k += std::to_string(remaining);
        if (mode_ == SequenceMode::multiset) {
            k += '>';
            k += std::to_string(min_action);
        }
        return k;
    }

    template <class Leaf>
    void collect(const TensorNetworkCode &tn, const std::string &skey, std::size_t remaining, std::size_t min_action,
                 std::size_t best, Leaf &leaf) {
        if (remaining == 0) {
            if (engine_->distance(tn.code()) == best) {
                leaf(tn);
            }
            return;
        }
        std::string mkey = memo_key(skey, remaining, min_action);
        auto it = memo_.find(mkey);
        if (it != memo_.end() && (!it->second.best || *it->second.best != best)) {
            return;
        }
        if (!collected_.insert(mkey).second) {
            return;
        }
        std::size_t lo = mode_ == SequenceMode::multiset ? min_action : 0;
        for (std::size_t a = lo; a < actions_; ++a) {
            collect_action(tn, remaining, a, best, leaf);
        }
    }

    SequenceMode mode_;
    std::size_t nodes_;
    std::size_t actions_;
    std::shared_ptr<DistanceEngine> engine_;
    std::atomic<std::uint64_t> &fusions_;
    std::uint64_t max_fusions_;
    std::unordered_map<std::string, SubtreeSummary> memo_;
    std::unordered_set<std::string> collected_;
    std::uint64_t hits_ = 0;
};

}  // namespace detail

/// Combines results over disjoint, adjacent first-action ranges of the same problem.
inline BruteForceResult merge(const BruteForceResult &a, const BruteForceResult &b) {
    if (a.seeds != b.seeds || a.steps != b.steps || a.mode != b.mode) {
        throw precondition_error("brute-force results describe different problems");
    }
    if (a.end_action != b.first_action && b.end_action != a.first_action) {
        throw precondition_error("brute-force results do not cover adjacent first-action ranges");
    }
    BruteForceResult out = a;
    out.first_action = std::min(a.first_action, b.first_action);
    out.end_action = std::max(a.end_action, b.end_action);
    out.complete_sequences += b.complete_sequences;
    out.pruned_sequences += b.pruned_sequences;
    out.fusions += b.fusions;
    out.memo_entries += b.memo_entries;
    out.memo_hits += b.memo_hits;
    out.wall_seconds += b.wall_seconds;
    out.complete = out.first_action == 0 && out.end_action == action_count(out.node_count);
    if (b.best_distance && (!a.best_distance || *b.best_distance > *a.best_distance)) {
        out.best_distance = b.best_distance;
        out.best_signature = b.best_signature;
        out.optimal_sequence_count = b.optimal_sequence_count;
        out.best_codes = b.best_codes;
    } else if (b.best_distance && a.best_distance && *b.best_distance == *a.best_distance) {
        out.optimal_sequence_count += b.optimal_sequence_count;
        for (const auto &[k, v] : b.best_codes) {
            out.best_codes.emplace(k, v);
        }
    }
    return out;
}

/// Exhaustive search over action sequences of length cfg.steps from the combined seeds.
/// Sequences through a disallowed action or a failed fusion are pruned but counted.
inline BruteForceResult brute_force(const EnvironmentConfig &cfg, const BruteForceOptions &opts = {},
                                    std::shared_ptr<DistanceEngine> engine = nullptr) {
    cfg.validate();
    if (!engine) {
        engine = std::make_shared<DistanceEngine>(opts.distance);
    }
    auto start = std::chrono::steady_clock::now();
    const auto root = initial_network(cfg.seeds);
    const std::size_t nodes = root.node_count();
    const std::size_t actions = action_count(nodes);
    const std::size_t first = opts.resume_from;
    const std::size_t last = opts.resume_to ? std::min(opts.resume_to, actions) : actions;
    if (first > last) {
        throw precondition_error("resume range is empty or reversed");
    }

    BruteForceResult result;
    result.seeds = cfg.seeds;
    result.steps = cfg.steps;
    result.node_count = nodes;
    result.mode = opts.mode;
    result.total_sequences = sequence_count(nodes, cfg.steps);
    result.ordered_sequences = ordered_sequence_count(nodes, cfg.steps);
    result.first_action = first;

    std::atomic<std::uint64_t> fusions{0};
    unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = unsigned(std::min<std::size_t>(workers, std::max<std::size_t>(1, last - first)));

    std::vector<std::optional<detail::SubtreeSummary>> per_action(actions);
    std::vector<std::vector<BestCode>> leaves(actions);
    std::vector<std::unique_ptr<detail::Explorer>> explorers;
    for (unsigned w = 0; w < workers; ++w) {
        explorers.push_back(
            std::make_unique<detail::Explorer>(opts.mode, nodes, engine, fusions, opts.max_fusions));
    }
    std::atomic<std::size_t> next{first};
    std::atomic<bool> exhausted{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto run = [&](detail::Explorer &ex) {
        while (!exhausted) {
            std::size_t a = next.fetch_add(1);
            if (a >= last) {
                return;
            }
            try {
                auto summary = ex.explore_action(root, cfg.steps, a);
                if (opts.collect_best && summary.best) {
                    std::map<std::string, BestCode> found;
                    ex.collect_action(root, cfg.steps, a, *summary.best, [&](const TensorNetworkCode &tn) {
                        auto key = percept_key(tn.code());
                        if (!found.count(key)) {
                            found.emplace(key, BestCode{key, tn.code(), std::nullopt});
                        }
                    });
                    for (auto &[k, v] : found) {
                        leaves[a].push_back(std::move(v));
                    }
                }
                per_action[a] = std::move(summary);
            } catch (const detail::fusion_budget_exhausted &) {
                exhausted = true;
                return;
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                exhausted = true;
                return;
            }
        }
    };
    if (workers == 1) {
        run(*explorers[0]);
    } else {
        std::vector<std::thread> threads;
        for (unsigned w = 0; w < workers; ++w) {
            threads.emplace_back(run, std::ref(*explorers[w]));
        }
        for (auto &t : threads) {
            t.join();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    // The covered range is the longest finished prefix of first actions.
    std::size_t end = first;
    while (end < last && per_action[end]) {
        ++end;
    }
    detail::SubtreeSummary total;
    for (std::size_t a = first; a < end; ++a) {
        total.absorb(*per_action[a]);
    }
    result.end_action = end;
    result.complete_sequences = total.complete;
    result.pruned_sequences = total.pruned;
    result.best_distance = total.best;
    result.optimal_sequence_count = total.best_count;
    if (total.best) {
        for (std::size_t a = first; a < end; ++a) {
            if (per_action[a]->best != total.best) {
                continue;
            }
            for (auto &leaf : leaves[a]) {
                result.best_codes.emplace(leaf.key, std::move(leaf));
            }
        }
        std::size_t n = root.code().n - 2 * cfg.steps;
        result.best_signature = Signature{n, root.code().k, *total.best};
        if (opts.histograms) {
            for (auto &[k, v] : result.best_codes) {
                v.histogram = engine->weight_histograms(v.code);
            }
        }
    }
    result.fusions = fusions.load();
    for (auto &ex : explorers) {
        result.memo_entries += ex->memo_entries();
        result.memo_hits += ex->memo_hits();
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.complete = end == actions && first == 0;
    if (end < last) {
        throw search_budget_error("brute force stopped after " + std::to_string(result.fusions) +
                                      " fusions; resume from first action " + std::to_string(end),
                                  std::move(result));
    }
    return result;
}

struct RandomTrial {
    std::vector<StepRecord> steps;
    Signature final_signature;
    std::string final_key;
    bool failed = false;
};

/// Uniform multiset of s action indices out of A, returned in non-decreasing order.
inline std::vector<std::size_t> sample_multiset(std::mt19937_64 &rng, std::size_t action_total, std::size_t s) {
    // Stars and bars: choose s distinct positions out of s + A - 1.
    const std::size_t slots = s + action_total - 1;
    std::set<std::size_t> chosen;
    for (std::size_t j = slots - s; j < slots; ++j) {
        std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        if (!chosen.insert(t).second) {
            chosen.insert(j);
        }
    }
    std::vector<std::size_t> out;
    std::size_t i = 0;
    for (auto pos : chosen) {
        out.push_back(pos - i);
        ++i;
    }
    return out;
}

/// Plays `trials` uniformly sampled action multisets (in non-decreasing order).
/// A disallowed action or a failed fusion ends the trial with reward -d.
inline std::vector<RandomTrial> random_baseline(Environment &env, std::size_t trials, std::mt19937_64 &rng,
                                                std::size_t simulation = 0) {
    std::vector<RandomTrial> out;
    out.reserve(trials);
    const std::size_t nodes = env.node_count();
    for (std::size_t t = 0; t < trials; ++t) {
        RandomTrial trial;
        env.reset();
        auto seq = sample_multiset(rng, env.action_count(), env.config().steps);
        for (std::size_t i = 0; i < seq.size(); ++i) {
            Action a = action_at(seq[i], nodes);
            StepRecord rec;
            rec.simulation = simulation;
            rec.trial = t;
            rec.step = i + 1;
            rec.action = a;
            if (!is_allowed(env.state(), a)) {
                rec.signature = env.signature();
                rec.reward = -int(rec.signature.d);
                rec.done = true;
                trial.failed = true;
                trial.steps.push_back(rec);
                break;
            }
            auto o = env.step(a);
            rec.signature = o.signature;
            rec.reward = o.reward;
            rec.done = o.done;
            trial.steps.push_back(rec);
            if (o.failure) {
                trial.failed = true;
            }
            if (o.done) {
                break;
            }
        }
        trial.final_signature = env.signature();
        trial.final_key = env.percept();
        out.push_back(std::move(trial));
    }
    return out;
}

}  // namespace tnqec
