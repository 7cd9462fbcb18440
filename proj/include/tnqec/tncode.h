#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tnqec/codes.h"

namespace tnqec {

/// Fusion of the legs on two tensor nodes (i == j fuses two legs of the same node).
struct Action {
    std::size_t i = 0;
    std::size_t j = 0;

    auto operator<=>(const Action &) const = default;
};

inline std::size_t action_count(std::size_t node_count) {
    return node_count * (node_count + 1) / 2;
}

/// Position of `a` in the lexicographic order (0,0), (0,1), ..., (0,N-1), (1,1), ...
inline std::size_t action_index(Action a, std::size_t node_count) {
    return a.i * (2 * node_count - a.i + 1) / 2 + (a.j - a.i);
}

inline Action action_at(std::size_t index, std::size_t node_count) {
    std::size_t i = 0;
    while (index >= node_count - i) {
        index -= node_count - i;
        ++i;
    }
    return {i, i + index};
}

enum class FusionFailure {
    measures_logical,
    rank_deficient,
};

inline const char *to_string(FusionFailure f) {
    return f == FusionFailure::measures_logical ? "measures_logical" : "rank_deficient";
}

/// Contracts qubits qa and qb (positions in `code`) with a Bell pair: the
/// stabilizer group keeps the elements acting with equal letters on qa and qb,
/// and each logical is replaced by a coset member with equal letters there.
/// Both qubits are then dropped.
inline std::variant<StabilizerCode, FusionFailure> fuse_code(const StabilizerCode &code, std::size_t qa,
                                                            std::size_t qb) {
    if (qa == qb || qa >= code.n || qb >= code.n) {
        throw precondition_error("fusion needs two distinct live qubits, got " + std::to_string(qa) + " and " +
                                 std::to_string(qb) + " on " + std::to_string(code.n) + " qubits");
    }
    if (code.n < code.k + 2) {
        return FusionFailure::measures_logical;
    }
    auto split = split_by_letter_match(code.stabilizers, qa, qb);

    StabilizerCode out;
    out.n = code.n - 2;
    out.k = code.k;
    for (std::size_t a = 0; a < code.k; ++a) {
        auto mx = split.matched(code.logical_x[a]);
        auto mz = split.matched(code.logical_z[a]);
        if (!mx || !mz) {
            return FusionFailure::measures_logical;
        }
        out.logical_x.push_back(mx->without_qubits(qa, qb));
        out.logical_z.push_back(mz->without_qubits(qa, qb));
    }

    std::vector<PauliString> rows;
    rows.reserve(split.kernel.size());
    for (const auto &g : split.kernel) {
        rows.push_back(g.without_qubits(qa, qb));
    }
    out.stabilizers = rref(GeneratorMatrix(out.n, std::move(rows)));
    if (out.stabilizers.size() != out.n - out.k) {
        return FusionFailure::rank_deficient;
    }
    auto report = verify(out);
    if (!report.ok()) {
        throw std::logic_error("fused code failed verification:\n" + report.summary());
    }
    return out;
}

/// A stabilizer code together with the tensor node owning each live qubit.
///
/// Qubit positions are indices into `code()`; `qubit_ids()` keeps the label each
/// position had in the freshly combined network.
class TensorNetworkCode {
   public:
    TensorNetworkCode() = default;

    TensorNetworkCode(StabilizerCode code, std::size_t node_count, std::vector<std::size_t> node_of,
                      std::vector<std::size_t> qubit_ids = {})
        : code_(std::move(code)), node_count_(node_count), node_of_(std::move(node_of)), ids_(std::move(qubit_ids)) {
        if (ids_.empty()) {
            ids_.resize(code_.n);
            for (std::size_t q = 0; q < code_.n; ++q) {
                ids_[q] = q;
            }
        }
        if (node_of_.size() != code_.n || ids_.size() != code_.n) {
            throw dimension_error("node assignment covers " + std::to_string(node_of_.size()) + " qubits, code has " +
                                  std::to_string(code_.n));
        }
        for (auto v : node_of_) {
            if (v >= node_count_) {
                throw dimension_error("node id " + std::to_string(v) + " out of range");
            }
        }
    }

    const StabilizerCode &code() const {
        return code_;
    }
    std::size_t node_count() const {
        return node_count_;
    }
    const std::vector<std::size_t> &node_of() const {
        return node_of_;
    }
    const std::vector<std::size_t> &qubit_ids() const {
        return ids_;
    }

    std::size_t live_count(std::size_t node) const {
        return std::size_t(std::count(node_of_.begin(), node_of_.end(), node));
    }

    bool operator==(const TensorNetworkCode &) const = default;

   private:
    StabilizerCode code_;
    std::size_t node_count_ = 0;
    std::vector<std::size_t> node_of_;
    std::vector<std::size_t> ids_;
};

/// Disjoint union of the seeds; seed i becomes node i and its qubits are contiguous.
inline TensorNetworkCode combine(std::span<const StabilizerCode> seeds) {
    if (seeds.empty()) {
        throw precondition_error("combine needs at least one seed code");
    }
    std::size_t n = 0, k = 0;
    for (const auto &s : seeds) {
        n += s.n;
        k += s.k;
    }
    StabilizerCode code;
    code.n = n;
    code.k = k;
    std::vector<PauliString> rows;
    std::vector<std::size_t> node_of;
    std::size_t offset = 0;
    for (std::size_t node = 0; node < seeds.size(); ++node) {
        const auto &s = seeds[node];
        for (const auto &r : s.stabilizers.rows) {
            rows.push_back(r.embedded(n, offset));
        }
        for (const auto &l : s.logical_x) {
            code.logical_x.push_back(l.embedded(n, offset));
        }
        for (const auto &l : s.logical_z) {
            code.logical_z.push_back(l.embedded(n, offset));
        }
        node_of.insert(node_of.end(), s.n, node);
        offset += s.n;
    }
    code.stabilizers = GeneratorMatrix(n, std::move(rows));
    return TensorNetworkCode(std::move(code), seeds.size(), std::move(node_of));
}

inline TensorNetworkCode combine(std::initializer_list<StabilizerCode> seeds) {
    return combine(std::span<const StabilizerCode>(seeds.begin(), seeds.size()));
}

inline bool is_allowed(const TensorNetworkCode &tn, Action a) {
    if (a.i > a.j || a.j >= tn.node_count()) {
        return false;
    }
    if (a.i == a.j) {
        return tn.live_count(a.i) >= 2;
    }
    return tn.live_count(a.i) >= 1 && tn.live_count(a.j) >= 1;
}

/// Structurally possible fusions, in action-index order.
inline std::vector<Action> allowed_actions(const TensorNetworkCode &tn) {
    std::vector<std::size_t> live(tn.node_count(), 0);
    for (auto v : tn.node_of()) {
        ++live[v];
    }
    std::vector<Action> out;
    for (std::size_t i = 0; i < tn.node_count(); ++i) {
        for (std::size_t j = i; j < tn.node_count(); ++j) {
            if (i == j ? live[i] >= 2 : (live[i] >= 1 && live[j] >= 1)) {
                out.push_back({i, j});
            }
        }
    }
    return out;
}

/// Lowest live position on node i, then lowest live position on node j other than the first.
inline std::pair<std::size_t, std::size_t> resolve_action(const TensorNetworkCode &tn, Action a) {
    if (!is_allowed(tn, a)) {
        throw precondition_error("action (" + std::to_string(a.i) + "," + std::to_string(a.j) + ") is not allowed");
    }
    const auto &node_of = tn.node_of();
    std::size_t qa = 0;
    while (node_of[qa] != a.i) {
        ++qa;
    }
    std::size_t qb = 0;
    while (node_of[qb] != a.j || qb == qa) {
        ++qb;
    }
    return {qa, qb};
}

inline std::variant<TensorNetworkCode, FusionFailure> fuse(const TensorNetworkCode &tn, std::size_t qa,
                                                          std::size_t qb) {
    auto result = fuse_code(tn.code(), qa, qb);
    if (auto *failure = std::get_if<FusionFailure>(&result)) {
        return *failure;
    }
    std::vector<std::size_t> node_of, ids;
    for (std::size_t q = 0; q < tn.code().n; ++q) {
        if (q != qa && q != qb) {
            node_of.push_back(tn.node_of()[q]);
            ids.push_back(tn.qubit_ids()[q]);
        }
    }
    return TensorNetworkCode(std::get<StabilizerCode>(std::move(result)), tn.node_count(), std::move(node_of),
                             std::move(ids));
}

inline std::variant<TensorNetworkCode, FusionFailure> apply_action(const TensorNetworkCode &tn, Action a) {
    auto [qa, qb] = resolve_action(tn, a);
    return fuse(tn, qa, qb);
}

/// Code file text followed by "nodes: <node_count>" and one node id per qubit.
inline std::string write_network(const TensorNetworkCode &tn) {
    std::string out = write_code(tn.code());
    out += "nodes: " + std::to_string(tn.node_count()) + "\n";
    for (auto v : tn.node_of()) {
        out += std::to_string(v) + "\n";
    }
    return out;
}

inline TensorNetworkCode read_network(std::istream &in) {
    auto lines = detail::content_lines(in);
    std::size_t pos = 0;
    auto code = detail::parse_code_lines(lines, pos);
    if (pos >= lines.size() || lines[pos].rfind("nodes:", 0) != 0) {
        throw parse_error("expected \"nodes:\" section after the logical rows");
    }
    std::size_t node_count = 0;
    bool explicit_count = false;
    {
        std::istringstream header(lines[pos].substr(6));
        long long c;
        if (header >> c) {
            if (c < 1) {
                throw parse_error("bad node count in \"" + lines[pos] + "\"");
            }
            node_count = std::size_t(c);
            explicit_count = true;
        }
    }
    ++pos;
    std::vector<std::size_t> node_of;
    for (; pos < lines.size(); ++pos) {
        std::size_t used = 0;
        long long v = -1;
        try {
            v = std::stoll(lines[pos], &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != lines[pos].size() || v < 0) {
            throw parse_error("bad node id \"" + lines[pos] + "\"");
        }
        node_of.push_back(std::size_t(v));
        if (!explicit_count) {
            node_count = std::max(node_count, std::size_t(v) + 1);
        }
    }
    if (node_of.size() != code.n) {
        throw parse_error("nodes section lists " + std::to_string(node_of.size()) + " qubits, code has " +
                          std::to_string(code.n));
    }
    return TensorNetworkCode(std::move(code), node_count, std::move(node_of));
}

inline TensorNetworkCode read_network(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_network(in);
}

}  // namespace tnqec
