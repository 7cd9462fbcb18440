#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "tnqec/embedded_data.h"
#include "tnqec/errors.h"

namespace tnqec {

/// 64-bit FNV-1a, used to fingerprint data files in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << v;
    return out.str();
}

struct TableEntry {
    std::size_t d_best = 0;
    std::string source;
};

/// Best known distance per (n, k), parsed from a TSV with columns n, k, d_best, source.
class CodeTables {
   public:
    static CodeTables parse(std::string_view text) {
        CodeTables t;
        t.hash_ = fnv1a64(text);
        std::istringstream in{std::string(text)};
        std::string line;
        bool header = false;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (line.empty() || line[0] == '#') {
                continue;
            }
            if (!header) {
                if (line != "n\tk\td_best\tsource") {
                    throw parse_error("code tables: expected header \"n<TAB>k<TAB>d_best<TAB>source\"");
                }
                header = true;
                continue;
            }
            std::istringstream row(line);
            long long n = -1, k = -1, d = -1;
            std::string source, extra;
            if (!(row >> n >> k >> d >> source) || (row >> extra) || n < 1 || k < 0 || d < 0 || k > n) {
                throw parse_error("code tables line " + std::to_string(line_no) + ": bad row \"" + line + "\"");
            }
            auto [it, inserted] = t.entries_.emplace(std::pair{std::size_t(n), std::size_t(k)},
                                                     TableEntry{std::size_t(d), source});
            if (!inserted) {
                throw parse_error("code tables line " + std::to_string(line_no) + ": duplicate entry");
            }
        }
        if (!header) {
            throw parse_error("code tables: missing header");
        }
        return t;
    }

    /// The tables compiled into the library.
    static const CodeTables &embedded() {
        static const CodeTables tables = parse(embedded::code_tables_tsv);
        return tables;
    }

    std::size_t best_known_distance(std::size_t n, std::size_t k) const {
        auto it = entries_.find({n, k});
        if (it == entries_.end()) {
            throw table_miss_error("no best-known distance tabulated for [[" + std::to_string(n) + "," +
                                   std::to_string(k) + "]]");
        }
        return it->second.d_best;
    }

    bool contains(std::size_t n, std::size_t k) const {
        return entries_.count({n, k}) != 0;
    }

    const std::map<std::pair<std::size_t, std::size_t>, TableEntry> &entries() const {
        return entries_;
    }

    std::uint64_t hash() const {
        return hash_;
    }

   private:
    std::map<std::pair<std::size_t, std::size_t>, TableEntry> entries_;
    std::uint64_t hash_ = 0;
};

inline std::size_t best_known_distance(std::size_t n, std::size_t k) {
    return CodeTables::embedded().best_known_distance(n, k);
}

}  // namespace tnqec
