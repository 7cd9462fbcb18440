#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tnqec/errors.h"

namespace tnqec {

inline constexpr std::size_t words_for(std::size_t bits) {
    return (bits + 63) / 64;
}

/// Phaseless n-qubit Pauli operator stored as packed X and Z bit-vectors.
///
/// Qubit q carries I, X, Y, Z for (x_q, z_q) = (0,0), (1,0), (1,1), (0,1).
/// Text form is a string over {I, X, Y, Z} with qubit 0 leftmost.
class PauliString {
   public:
    PauliString() = default;

    /// Identity on `n` qubits.
    explicit PauliString(std::size_t n) : n_(n), x_(words_for(n), 0), z_(words_for(n), 0) {
    }

    static PauliString from_text(std::string_view text) {
        PauliString p(text.size());
        for (std::size_t q = 0; q < text.size(); ++q) {
            switch (text[q]) {
                case 'I':
                case '_':
                    break;
                case 'X':
                    p.set(q, true, false);
                    break;
                case 'Y':
                    p.set(q, true, true);
                    break;
                case 'Z':
                    p.set(q, false, true);
                    break;
                default:
                    throw parse_error("invalid Pauli character '" + std::string(1, text[q]) + "' in \"" +
                                      std::string(text) + "\"");
            }
        }
        return p;
    }

    /// Integer labels g_q in {0,1,2,3} meaning I, X, Y, Z.
    static PauliString from_labels(std::span<const int> labels) {
        PauliString p(labels.size());
        for (std::size_t q = 0; q < labels.size(); ++q) {
            switch (labels[q]) {
                case 0:
                    break;
                case 1:
                    p.set(q, true, false);
                    break;
                case 2:
                    p.set(q, true, true);
                    break;
                case 3:
                    p.set(q, false, true);
                    break;
                default:
                    throw parse_error("Pauli label out of range: " + std::to_string(labels[q]));
            }
        }
        return p;
    }

    std::vector<int> labels() const {
        std::vector<int> out(n_);
        for (std::size_t q = 0; q < n_; ++q) {
            bool xb = x(q), zb = z(q);
            out[q] = xb ? (zb ? 2 : 1) : (zb ? 3 : 0);
        }
        return out;
    }

    std::size_t num_qubits() const {
        return n_;
    }

    bool x(std::size_t q) const {
        return (x_[q >> 6] >> (q & 63)) & 1;
    }
    bool z(std::size_t q) const {
        return (z_[q >> 6] >> (q & 63)) & 1;
    }

    char letter(std::size_t q) const {
        static constexpr char table[4] = {'I', 'X', 'Z', 'Y'};
        return table[int(x(q)) | (int(z(q)) << 1)];
    }

    void set(std::size_t q, bool xb, bool zb) {
        uint64_t mask = uint64_t{1} << (q & 63);
        auto &xw = x_[q >> 6];
        auto &zw = z_[q >> 6];
        xw = xb ? (xw | mask) : (xw & ~mask);
        zw = zb ? (zw | mask) : (zw & ~mask);
    }

    std::size_t weight() const {
        std::size_t w = 0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            w += std::popcount(x_[i] | z_[i]);
        }
        return w;
    }

    bool is_identity() const {
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (x_[i] | z_[i]) {
                return false;
            }
        }
        return true;
    }

    std::string str() const {
        std::string out(n_, 'I');
        for (std::size_t q = 0; q < n_; ++q) {
            out[q] = letter(q);
        }
        return out;
    }

    PauliString &operator*=(const PauliString &other) {
        check_same_size(other);
        for (std::size_t i = 0; i < x_.size(); ++i) {
            x_[i] ^= other.x_[i];
            z_[i] ^= other.z_[i];
        }
        return *this;
    }

    /// Symplectic product mod 2: 1 iff the operators anticommute.
    bool symplectic(const PauliString &other) const {
        check_same_size(other);
        uint64_t acc = 0;
        for (std::size_t i = 0; i < x_.size(); ++i) {
            acc ^= (x_[i] & other.z_[i]) ^ (z_[i] & other.x_[i]);
        }
        return std::popcount(acc) & 1;
    }

    /// Copy with qubits `a` and `b` removed; remaining qubits keep their order.
    PauliString without_qubits(std::size_t a, std::size_t b) const {
        PauliString out(n_ - 2);
        std::size_t t = 0;
        for (std::size_t q = 0; q < n_; ++q) {
            if (q == a || q == b) {
                continue;
            }
            out.set(t++, x(q), z(q));
        }
        return out;
    }

    /// This operator placed on qubits [offset, offset + n) of an `total`-qubit register.
    PauliString embedded(std::size_t total, std::size_t offset) const {
        if (offset + n_ > total) {
            throw dimension_error("embedding exceeds register size");
        }
        PauliString out(total);
        for (std::size_t q = 0; q < n_; ++q) {
            out.set(offset + q, x(q), z(q));
        }
        return out;
    }

    std::span<const uint64_t> x_words() const {
        return x_;
    }
    std::span<const uint64_t> z_words() const {
        return z_;
    }

    bool operator==(const PauliString &other) const = default;

    /// Lowercase hex of the X words followed by the Z words, ceil(n/4) digits each.
    std::string hex() const {
        static constexpr char digits[] = "0123456789abcdef";
        std::size_t nd = (n_ + 3) / 4;
        std::string out;
        out.reserve(2 * nd);
        for (const auto *words : {&x_, &z_}) {
            for (std::size_t d = nd; d-- > 0;) {
                std::size_t bit = 4 * d;
                out.push_back(digits[((*words)[bit >> 6] >> (bit & 63)) & 0xF]);
            }
        }
        return out;
    }

   private:
    void check_same_size(const PauliString &other) const {
        if (other.n_ != n_) {
            throw dimension_error("Pauli strings act on " + std::to_string(n_) + " and " +
                                  std::to_string(other.n_) + " qubits");
        }
    }

    std::size_t n_ = 0;
    std::vector<uint64_t> x_;
    std::vector<uint64_t> z_;
};

inline bool commutes(const PauliString &p, const PauliString &q) {
    return !p.symplectic(q);
}

inline PauliString multiply(PauliString p, const PauliString &q) {
    p *= q;
    return p;
}

inline std::size_t weight(const PauliString &p) {
    return p.weight();
}

}  // namespace tnqec

template <>
struct std::hash<tnqec::PauliString> {
    std::size_t operator()(const tnqec::PauliString &p) const noexcept {
        std::size_t h = p.num_qubits();
        for (auto words : {p.x_words(), p.z_words()}) {
            for (uint64_t w : words) {
                h ^= std::hash<uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            }
        }
        return h;
    }
};
