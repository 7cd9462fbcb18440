#pragma once

#include <algorithm>
#include <bit>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "tnqec/percept.h"

namespace tnqec {

/// Weight distributions over the stabilizer group and over the 4^k - 1
/// nontrivial logical cosets.
struct WeightHistogram {
    std::map<std::size_t, std::uint64_t> stabilizer_counts;
    std::map<std::size_t, std::uint64_t> logical_counts;

    std::optional<std::size_t> min_logical_weight() const {
        for (const auto &[w, c] : logical_counts) {
            if (c) {
                return w;
            }
        }
        return std::nullopt;
    }

    bool operator==(const WeightHistogram &) const = default;
};

/// CSV with columns class,weight,count.
inline void write_histogram_csv(std::ostream &out, const WeightHistogram &h) {
    out << "class,weight,count\n";
    for (const auto &[w, c] : h.stabilizer_counts) {
        out << "stabilizer," << w << ',' << c << '\n';
    }
    for (const auto &[w, c] : h.logical_counts) {
        out << "logical," << w << ',' << c << '\n';
    }
}

/// Distances keyed by percept key; safe under concurrent readers and writers.
class DistanceCache {
   public:
    std::optional<std::size_t> find(const std::string &key) const {
        std::shared_lock lock(mutex_);
        auto it = map_.find(key);
        if (it == map_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    void insert(const std::string &key, std::size_t d) {
        std::unique_lock lock(mutex_);
        map_.emplace(key, d);
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return map_.size();
    }

   private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::size_t> map_;
};

struct DistanceOptions {
    /// Enumeration is refused when n + k exceeds this.
    std::size_t budget_bits = 30;
    /// Worker threads for large enumerations; 0 means hardware concurrency.
    unsigned workers = 0;
};

namespace detail {

inline constexpr std::size_t max_budget_bits = 62;

/// Stabilizer generators and all nontrivial logical-coset representatives packed into single words.
struct PackedCode {
    std::size_t n = 0;
    std::size_t r = 0;
    std::vector<uint64_t> gx, gz;
    std::vector<uint64_t> lx, lz;
};

inline uint64_t pack_word(std::span<const uint64_t> words) {
    return words.empty() ? 0 : words[0];
}

inline void check_budget(const StabilizerCode &code, const DistanceOptions &opts) {
    std::size_t budget = std::min(opts.budget_bits, max_budget_bits);
    if (code.n + code.k > budget) {
        throw budget_error("enumerating [[" + std::to_string(code.n) + "," + std::to_string(code.k) +
                           "]] needs n + k = " + std::to_string(code.n + code.k) + " bits, budget is " +
                           std::to_string(budget));
    }
}

inline PackedCode pack(const StabilizerCode &code) {
    PackedCode p;
    p.n = code.n;
    p.r = code.stabilizers.size();
    for (const auto &g : code.stabilizers.rows) {
        p.gx.push_back(pack_word(g.x_words()));
        p.gz.push_back(pack_word(g.z_words()));
    }
    std::vector<uint64_t> bx, bz;
    for (const auto *group : {&code.logical_x, &code.logical_z}) {
        for (const auto &l : *group) {
            bx.push_back(pack_word(l.x_words()));
            bz.push_back(pack_word(l.z_words()));
        }
    }
    for (uint64_t mask = 1; mask < (uint64_t{1} << bx.size()); ++mask) {
        uint64_t x = 0, z = 0;
        for (std::size_t i = 0; i < bx.size(); ++i) {
            if ((mask >> i) & 1) {
                x ^= bx[i];
                z ^= bz[i];
            }
        }
        p.lx.push_back(x);
        p.lz.push_back(z);
    }
    return p;
}

/// Visits the stabilizer-group elements with Gray index in [lo, hi): the
/// element at index i is the product of generators selected by i ^ (i >> 1),
/// and consecutive elements differ by exactly one generator.
template <class Visit>
void gray_walk(const PackedCode &p, uint64_t lo, uint64_t hi, Visit &&visit) {
    if (lo >= hi) {
        return;
    }
    uint64_t x = 0, z = 0;
    uint64_t g = lo ^ (lo >> 1);
    for (std::size_t b = 0; b < p.r; ++b) {
        if ((g >> b) & 1) {
            x ^= p.gx[b];
            z ^= p.gz[b];
        }
    }
    visit(x, z);
    for (uint64_t i = lo + 1; i < hi; ++i) {
        auto b = std::countr_zero(i);
        x ^= p.gx[b];
        z ^= p.gz[b];
        visit(x, z);
    }
}

inline unsigned resolve_workers(unsigned workers) {
    return workers ? workers : std::max(1u, std::thread::hardware_concurrency());
}

/// Number of Gray-index top bits fixed per block; blocks keep at least 2^16 elements.
inline std::size_t split_bits(std::size_t r, unsigned workers) {
    workers = resolve_workers(workers);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < workers && bits + 16 < r) {
        ++bits;
    }
    return bits;
}

inline std::size_t partition_slots(std::size_t r, unsigned workers) {
    return std::size_t{1} << split_bits(r, workers);
}

/// Runs `work(lo, hi, slot)` over a partition of [0, 2^r) into partition_slots blocks.
template <class Work>
void partitioned(std::size_t r, unsigned workers, Work &&work) {
    uint64_t total = uint64_t{1} << r;
    std::size_t bits = split_bits(r, workers);
    if (bits == 0) {
        work(uint64_t{0}, total, std::size_t{0});
        return;
    }
    std::size_t blocks = std::size_t{1} << bits;
    uint64_t block = total >> bits;
    std::vector<std::thread> threads;
    for (std::size_t s = 0; s < blocks; ++s) {
        threads.emplace_back([&, s] { work(s * block, (s + 1) * block, s); });
    }
    for (auto &t : threads) {
        t.join();
    }
}

}  // namespace detail

/// Calls f(coset_element) for every element of the coset (stabilizer group) * L,
/// where L is the product of logical generators selected by `coset_mask`
/// (bit a selects logical_x[a], bit k + a selects logical_z[a]; mask 0 is the
/// stabilizer group itself). Elements arrive in Gray order.
template <class F>
void for_each_coset_element(const StabilizerCode &code, uint64_t coset_mask, F &&f) {
    if (code.n > 64) {
        throw budget_error("packed enumeration supports at most 64 qubits");
    }
    auto p = detail::pack(code);
    uint64_t lx = 0, lz = 0;
    if (coset_mask) {
        lx = p.lx[coset_mask - 1];
        lz = p.lz[coset_mask - 1];
    }
    detail::gray_walk(p, 0, uint64_t{1} << p.r, [&](uint64_t x, uint64_t z) {
        PauliString out(code.n);
        for (std::size_t q = 0; q < code.n; ++q) {
            out.set(q, ((x ^ lx) >> q) & 1, ((z ^ lz) >> q) & 1);
        }
        f(out);
    });
}

/// Exact minimum weight over all nontrivial logical coset elements.
inline std::size_t distance(const StabilizerCode &code, const DistanceOptions &opts = {}) {
    if (code.k == 0) {
        throw undefined_distance_error("distance is undefined for a code with no logical qubits");
    }
    detail::check_budget(code, opts);
    auto p = detail::pack(code);
    std::size_t slots = detail::partition_slots(p.r, opts.workers);
    std::vector<std::size_t> best(slots, code.n + 1);
    const std::size_t cosets = p.lx.size();
    detail::partitioned(p.r, opts.workers, [&](uint64_t lo, uint64_t hi, std::size_t slot) {
        std::size_t local = code.n + 1;
        detail::gray_walk(p, lo, hi, [&](uint64_t x, uint64_t z) {
            for (std::size_t c = 0; c < cosets; ++c) {
                std::size_t w = std::size_t(std::popcount((x ^ p.lx[c]) | (z ^ p.lz[c])));
                local = w < local ? w : local;
            }
        });
        best[slot] = local;
    });
    return *std::min_element(best.begin(), best.end());
}

inline WeightHistogram weight_histograms(const StabilizerCode &code, const DistanceOptions &opts = {}) {
    if (code.k == 0) {
        throw undefined_distance_error("logical weights are undefined for a code with no logical qubits");
    }
    detail::check_budget(code, opts);
    auto p = detail::pack(code);
    std::size_t slots = detail::partition_slots(p.r, opts.workers);
    std::vector<std::vector<uint64_t>> stab(slots, std::vector<uint64_t>(code.n + 1, 0));
    std::vector<std::vector<uint64_t>> logi(slots, std::vector<uint64_t>(code.n + 1, 0));
    const std::size_t cosets = p.lx.size();
    detail::partitioned(p.r, opts.workers, [&](uint64_t lo, uint64_t hi, std::size_t slot) {
        auto &s = stab[slot];
        auto &l = logi[slot];
        detail::gray_walk(p, lo, hi, [&](uint64_t x, uint64_t z) {
            ++s[std::popcount(x | z)];
            for (std::size_t c = 0; c < cosets; ++c) {
                ++l[std::popcount((x ^ p.lx[c]) | (z ^ p.lz[c]))];
            }
        });
    });
    WeightHistogram h;
    for (std::size_t w = 0; w <= code.n; ++w) {
        uint64_t cs = 0, cl = 0;
        for (std::size_t s = 0; s < slots; ++s) {
            cs += stab[s][w];
            cl += logi[s][w];
        }
        if (cs) {
            h.stabilizer_counts[w] = cs;
        }
        if (cl) {
            h.logical_counts[w] = cl;
        }
    }
    return h;
}

/// Distance by brute-force search over Paulis of increasing weight: the first
/// weight with an operator that commutes with every stabilizer but lies outside
/// the stabilizer group. Shares no code with the packed enumeration.
inline std::size_t distance_oracle(const StabilizerCode &code) {
    const std::size_t n = code.n;
    using Vec = std::vector<int>;  // x_0..x_{n-1}, z_0..z_{n-1}
    std::vector<Vec> stabs;
    for (const auto &g : code.stabilizers.rows) {
        Vec v(2 * n, 0);
        for (std::size_t q = 0; q < n; ++q) {
            v[q] = g.x(q);
            v[n + q] = g.z(q);
        }
        stabs.push_back(v);
    }
    auto gf2_rank = [](std::vector<Vec> m) {
        std::size_t rank = 0;
        std::size_t cols = m.empty() ? 0 : m[0].size();
        for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
            std::size_t pivot = rank;
            while (pivot < m.size() && m[pivot][c] == 0) {
                ++pivot;
            }
            if (pivot == m.size()) {
                continue;
            }
            std::swap(m[pivot], m[rank]);
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (i != rank && m[i][c]) {
                    for (std::size_t j = 0; j < cols; ++j) {
                        m[i][j] ^= m[rank][j];
                    }
                }
            }
            ++rank;
        }
        return rank;
    };
    const std::size_t base_rank = gf2_rank(stabs);
    auto is_logical = [&](const Vec &v) {
        for (const auto &s : stabs) {
            int form = 0;
            for (std::size_t q = 0; q < n; ++q) {
                form ^= (v[q] & s[n + q]) ^ (v[n + q] & s[q]);
            }
            if (form) {
                return false;
            }
        }
        auto extended = stabs;
        extended.push_back(v);
        return gf2_rank(extended) > base_rank;
    };

    for (std::size_t w = 1; w <= n; ++w) {
        std::vector<std::size_t> support(w);
        for (std::size_t i = 0; i < w; ++i) {
            support[i] = i;
        }
        while (true) {
            std::vector<int> letters(w, 0);  // 0: X, 1: Y, 2: Z
            while (true) {
                Vec v(2 * n, 0);
                for (std::size_t i = 0; i < w; ++i) {
                    v[support[i]] = letters[i] <= 1;
                    v[n + support[i]] = letters[i] >= 1;
                }
                if (is_logical(v)) {
                    return w;
                }
                std::size_t pos = 0;
                while (pos < w && letters[pos] == 2) {
                    letters[pos++] = 0;
                }
                if (pos == w) {
                    break;
                }
                ++letters[pos];
            }
            std::size_t i = w;
            while (i > 0 && support[i - 1] == n - w + i - 1) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++support[i - 1];
            for (std::size_t j = i; j < w; ++j) {
                support[j] = support[j - 1] + 1;
            }
        }
    }
    throw undefined_distance_error("no logical operator found; the code has no logical qubits");
}

/// Distance with a shared percept-keyed cache.
class DistanceEngine {
   public:
    explicit DistanceEngine(DistanceOptions opts = {},
                            std::shared_ptr<DistanceCache> cache = std::make_shared<DistanceCache>())
        : opts_(opts), cache_(std::move(cache)) {
    }

    std::size_t distance(const StabilizerCode &code) const {
        return distance(code, percept_key(code));
    }

    std::size_t distance(const StabilizerCode &code, const std::string &key) const {
        if (auto hit = cache_->find(key)) {
            return *hit;
        }
        std::size_t d = tnqec::distance(code, opts_);
        cache_->insert(key, d);
        return d;
    }

    WeightHistogram weight_histograms(const StabilizerCode &code) const {
        return tnqec::weight_histograms(code, opts_);
    }

    const DistanceOptions &options() const {
        return opts_;
    }
    DistanceCache &cache() const {
        return *cache_;
    }
    std::shared_ptr<DistanceCache> shared_cache() const {
        return cache_;
    }

   private:
    DistanceOptions opts_;
    std::shared_ptr<DistanceCache> cache_;
};

}  // namespace tnqec
