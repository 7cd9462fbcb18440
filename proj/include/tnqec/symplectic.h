#pragma once

#include <initializer_list>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "tnqec/pauli.h"

namespace tnqec {

/// An ordered list of n-qubit Pauli strings, read as generators of a (phaseless) group.
struct GeneratorMatrix {
    std::size_t n = 0;
    std::vector<PauliString> rows;

    GeneratorMatrix() = default;

    GeneratorMatrix(std::size_t num_qubits, std::vector<PauliString> generators)
        : n(num_qubits), rows(std::move(generators)) {
        for (const auto &r : rows) {
            if (r.num_qubits() != n) {
                throw dimension_error("generator " + r.str() + " does not act on " + std::to_string(n) +
                                      " qubits");
            }
        }
    }

    static GeneratorMatrix from_text(std::size_t num_qubits, std::initializer_list<std::string_view> rows) {
        std::vector<PauliString> out;
        for (auto r : rows) {
            out.push_back(PauliString::from_text(r));
        }
        return GeneratorMatrix(num_qubits, std::move(out));
    }

    std::size_t size() const {
        return rows.size();
    }
    bool empty() const {
        return rows.empty();
    }

    bool operator==(const GeneratorMatrix &other) const = default;
};

namespace detail {

/// Bit of `p` at interleaved column c: columns are (x_0, z_0, x_1, z_1, ...).
inline bool column_bit(const PauliString &p, std::size_t c) {
    return (c & 1) ? p.z(c >> 1) : p.x(c >> 1);
}

inline void set_column_bit(PauliString &p, std::size_t c, bool v) {
    std::size_t q = c >> 1;
    if (c & 1) {
        p.set(q, p.x(q), v);
    } else {
        p.set(q, v, p.z(q));
    }
}

inline std::optional<std::size_t> leading_column(const PauliString &p) {
    for (std::size_t c = 0; c < 2 * p.num_qubits(); ++c) {
        if (column_bit(p, c)) {
            return c;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Reduced row-echelon basis over GF(2) with interleaved column order.
///
/// Pivot columns are strictly increasing and each pivot is the only
/// nonzero entry in its column, so the basis of a given group is unique.
class EchelonBasis {
   public:
    explicit EchelonBasis(std::size_t n) : m_(n, {}) {
    }

    explicit EchelonBasis(const GeneratorMatrix &m) : m_(m.n, m.rows) {
        auto &rows = m_.rows;
        std::size_t pr = 0;
        for (std::size_t c = 0; c < 2 * m_.n && pr < rows.size(); ++c) {
            std::size_t i = pr;
            while (i < rows.size() && !detail::column_bit(rows[i], c)) {
                ++i;
            }
            if (i == rows.size()) {
                continue;
            }
            std::swap(rows[i], rows[pr]);
            for (std::size_t j = 0; j < rows.size(); ++j) {
                if (j != pr && detail::column_bit(rows[j], c)) {
                    rows[j] *= rows[pr];
                }
            }
            pivots_.push_back(c);
            ++pr;
        }
        rows.resize(pr);
    }

    const GeneratorMatrix &matrix() const {
        return m_;
    }
    std::size_t rank() const {
        return m_.rows.size();
    }
    const std::vector<std::size_t> &pivots() const {
        return pivots_;
    }

    /// Canonical representative of the coset p * <basis>.
    PauliString reduce(PauliString p) const {
        if (p.num_qubits() != m_.n) {
            throw dimension_error("operator on " + std::to_string(p.num_qubits()) + " qubits reduced against " +
                                  std::to_string(m_.n) + "-qubit generators");
        }
        for (std::size_t i = 0; i < pivots_.size(); ++i) {
            if (detail::column_bit(p, pivots_[i])) {
                p *= m_.rows[i];
            }
        }
        return p;
    }

    bool contains(const PauliString &p) const {
        return reduce(p).is_identity();
    }

    /// Adds `p` to the span. Returns false when it was already contained.
    bool insert(const PauliString &p) {
        PauliString r = reduce(p);
        auto lead = detail::leading_column(r);
        if (!lead) {
            return false;
        }
        std::size_t c = *lead;
        for (auto &row : m_.rows) {
            if (detail::column_bit(row, c)) {
                row *= r;
            }
        }
        std::size_t pos = 0;
        while (pos < pivots_.size() && pivots_[pos] < c) {
            ++pos;
        }
        pivots_.insert(pivots_.begin() + pos, c);
        m_.rows.insert(m_.rows.begin() + pos, std::move(r));
        return true;
    }

   private:
    GeneratorMatrix m_;
    std::vector<std::size_t> pivots_;
};

inline GeneratorMatrix rref(const GeneratorMatrix &m) {
    return EchelonBasis(m).matrix();
}

inline std::size_t rank(const GeneratorMatrix &m) {
    return EchelonBasis(m).rank();
}

inline bool contains(const GeneratorMatrix &m, const PauliString &p) {
    if (p.num_qubits() != m.n) {
        throw dimension_error("membership test with mismatched qubit count");
    }
    return EchelonBasis(m).contains(p);
}

/// Split of a group by the two letter-matching functionals on qubits (a, b):
/// f_x(g) = x_a + x_b and f_z(g) = z_a + z_b.
///
/// `kernel` generates {g in <m> : f_x(g) = f_z(g) = 0}. `pivots` (at most two)
/// complete it to generators of <m>; `pivot_values` records (f_x, f_z) of each.
struct LetterMatchSplit {
    std::size_t a = 0;
    std::size_t b = 0;
    std::vector<PauliString> kernel;
    std::vector<PauliString> pivots;
    std::vector<std::pair<bool, bool>> pivot_values;

    std::pair<bool, bool> values(const PauliString &g) const {
        return {g.x(a) != g.x(b), g.z(a) != g.z(b)};
    }

    /// An element of the coset p * <m> that acts with the same letter on a and b, if one exists.
    std::optional<PauliString> matched(const PauliString &p) const {
        auto target = values(p);
        std::size_t np = pivots.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << np); ++mask) {
            bool fx = target.first, fz = target.second;
            for (std::size_t i = 0; i < np; ++i) {
                if ((mask >> i) & 1) {
                    fx ^= pivot_values[i].first;
                    fz ^= pivot_values[i].second;
                }
            }
            if (!fx && !fz) {
                PauliString out = p;
                for (std::size_t i = 0; i < np; ++i) {
                    if ((mask >> i) & 1) {
                        out *= pivots[i];
                    }
                }
                return out;
            }
        }
        return std::nullopt;
    }
};

inline LetterMatchSplit split_by_letter_match(const GeneratorMatrix &m, std::size_t a, std::size_t b) {
    if (a == b || a >= m.n || b >= m.n) {
        throw dimension_error("letter-matching constraint needs two distinct qubits below " + std::to_string(m.n));
    }
    LetterMatchSplit s;
    s.a = a;
    s.b = b;
    std::vector<PauliString> rows = m.rows;
    auto eliminate = [&](auto functional) {
        std::optional<PauliString> pivot;
        std::vector<PauliString> rest;
        for (auto &r : rows) {
            if (functional(r)) {
                if (!pivot) {
                    pivot = std::move(r);
                    continue;
                }
                r *= *pivot;
            }
            rest.push_back(std::move(r));
        }
        rows = std::move(rest);
        if (pivot) {
            s.pivot_values.push_back(s.values(*pivot));
            s.pivots.push_back(std::move(*pivot));
        }
    };
    eliminate([&](const PauliString &g) { return g.x(a) != g.x(b); });
    eliminate([&](const PauliString &g) { return g.z(a) != g.z(b); });
    s.kernel = std::move(rows);
    return s;
}

/// Generators (in rref) of the subgroup of <m> whose elements act with the same
/// Pauli letter on qubits a and b.
inline GeneratorMatrix constrained_subgroup(const GeneratorMatrix &m, std::size_t a, std::size_t b) {
    auto split = split_by_letter_match(m, a, b);
    return rref(GeneratorMatrix(m.n, std::move(split.kernel)));
}

/// Basis of {v : <v, c> = 0 for every constraint c} where <,> is the plain
/// dot product of the 2n-bit vectors. Basis vectors follow free-column order.
inline std::vector<PauliString> dot_nullspace(std::size_t n, const std::vector<PauliString> &constraints) {
    EchelonBasis basis(GeneratorMatrix(n, constraints));
    const auto &piv = basis.pivots();
    const auto &rows = basis.matrix().rows;
    std::vector<PauliString> out;
    std::size_t next_pivot = 0;
    for (std::size_t c = 0; c < 2 * n; ++c) {
        if (next_pivot < piv.size() && piv[next_pivot] == c) {
            ++next_pivot;
            continue;
        }
        PauliString v(n);
        detail::set_column_bit(v, c, true);
        for (std::size_t i = 0; i < piv.size(); ++i) {
            if (detail::column_bit(rows[i], c)) {
                detail::set_column_bit(v, piv[i], true);
            }
        }
        out.push_back(std::move(v));
    }
    return out;
}

/// Same operator with the X and Z parts exchanged.
inline PauliString swap_xz(const PauliString &p) {
    PauliString out(p.num_qubits());
    for (std::size_t q = 0; q < p.num_qubits(); ++q) {
        out.set(q, p.z(q), p.x(q));
    }
    return out;
}

/// Basis of the symplectic complement: every Pauli commuting with all rows of m.
inline std::vector<PauliString> symplectic_complement(const GeneratorMatrix &m) {
    std::vector<PauliString> constraints;
    constraints.reserve(m.size());
    for (const auto &r : m.rows) {
        constraints.push_back(swap_xz(r));
    }
    return dot_nullspace(m.n, constraints);
}

}  // namespace tnqec
