#pragma once

#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tnqec/embedded_data.h"
#include "tnqec/symplectic.h"

namespace tnqec {

/// An [[n, k]] stabilizer code: n - k independent commuting generators plus
/// k pairs of logical representatives (logical_x[a] anticommutes with logical_z[a] only).
struct StabilizerCode {
    std::size_t n = 0;
    std::size_t k = 0;
    GeneratorMatrix stabilizers;
    std::vector<PauliString> logical_x;
    std::vector<PauliString> logical_z;

    bool operator==(const StabilizerCode &other) const = default;
};

/// errors[j] anticommutes with stabilizer j and commutes with every other
/// stabilizer, every logical, and every other pure error.
struct PureErrorSet {
    std::vector<PauliString> errors;
};

struct LogicalCompletion {
    std::vector<PauliString> logical_x;
    std::vector<PauliString> logical_z;
    PureErrorSet pure_errors;
};

/// Completes independent commuting stabilizers to a symplectic basis of the
/// full Pauli group by symplectic Gram-Schmidt.
///
/// Extension candidates are tried in the order: Z-type normalizer elements,
/// X-type normalizer elements, general normalizer elements, so CSS-like codes
/// get Z-type logical Z and X-type logical X (e.g. ZZZZZ / XXXXX for the
/// five-qubit code). Output is deterministic in the input row order.
inline LogicalCompletion complete_logicals(const GeneratorMatrix &stabilizers) {
    const std::size_t n = stabilizers.n;
    const auto &s = stabilizers.rows;
    for (std::size_t i = 0; i < s.size(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (!commutes(s[i], s[j])) {
                throw invalid_stabilizer_error("stabilizers " + s[i].str() + " and " + s[j].str() + " anticommute");
            }
        }
    }
    EchelonBasis span(stabilizers);
    if (span.rank() != s.size()) {
        throw invalid_stabilizer_error("stabilizer generators are not independent (rank " +
                                       std::to_string(span.rank()) + " of " + std::to_string(s.size()) + ")");
    }
    const std::size_t k = n - s.size();

    std::vector<PauliString> z_constraints, x_constraints;
    for (const auto &row : s) {
        PauliString zc(n), xc(n);
        for (std::size_t q = 0; q < n; ++q) {
            zc.set(q, false, row.x(q));
            xc.set(q, row.z(q), false);
        }
        z_constraints.push_back(std::move(zc));
        x_constraints.push_back(std::move(xc));
    }
    auto is_z_type = [](const PauliString &p) {
        for (auto w : p.x_words()) {
            if (w) {
                return false;
            }
        }
        return true;
    };
    auto is_x_type = [](const PauliString &p) {
        for (auto w : p.z_words()) {
            if (w) {
                return false;
            }
        }
        return true;
    };

    std::vector<PauliString> candidates;
    for (auto &v : dot_nullspace(n, z_constraints)) {
        if (is_z_type(v)) {
            candidates.push_back(std::move(v));
        }
    }
    for (auto &v : dot_nullspace(n, x_constraints)) {
        if (is_x_type(v)) {
            candidates.push_back(std::move(v));
        }
    }
    for (auto &v : symplectic_complement(stabilizers)) {
        candidates.push_back(std::move(v));
    }

    std::vector<PauliString> extension;
    for (const auto &c : candidates) {
        if (extension.size() == 2 * k) {
            break;
        }
        if (span.insert(c)) {
            extension.push_back(c);
        }
    }

    LogicalCompletion out;
    while (!extension.empty()) {
        PauliString u = extension.front();
        std::size_t partner = 1;
        while (partner < extension.size() && commutes(u, extension[partner])) {
            ++partner;
        }
        if (partner == extension.size()) {
            throw invalid_stabilizer_error("normalizer extension is degenerate");
        }
        PauliString w = extension[partner];
        std::vector<PauliString> rest;
        for (std::size_t i = 1; i < extension.size(); ++i) {
            if (i == partner) {
                continue;
            }
            PauliString v = extension[i];
            bool with_w = v.symplectic(w);
            bool with_u = v.symplectic(u);
            if (with_w) {
                v *= u;
            }
            if (with_u) {
                v *= w;
            }
            rest.push_back(std::move(v));
        }
        out.logical_z.push_back(std::move(u));
        out.logical_x.push_back(std::move(w));
        extension = std::move(rest);
    }

    // Pure errors: dual partners of the stabilizers drawn from single-qubit X/Z.
    std::vector<PauliString> pool;
    for (std::size_t q = 0; q < n; ++q) {
        PauliString px(n), pz(n);
        px.set(q, true, false);
        pz.set(q, false, true);
        pool.push_back(std::move(px));
        pool.push_back(std::move(pz));
    }
    auto &errors = out.pure_errors.errors;
    for (std::size_t j = 0; j < s.size(); ++j) {
        std::size_t pick = 0;
        while (pick < pool.size() && commutes(pool[pick], s[j])) {
            ++pick;
        }
        if (pick == pool.size()) {
            throw invalid_stabilizer_error("no pure error found for " + s[j].str());
        }
        PauliString e = pool[pick];
        pool.erase(pool.begin() + pick);
        for (auto &p : pool) {
            if (!commutes(p, s[j])) {
                p *= e;
            }
        }
        for (auto &prev : errors) {
            if (!commutes(prev, s[j])) {
                prev *= e;
            }
        }
        errors.push_back(std::move(e));
    }
    for (auto &e : errors) {
        for (std::size_t a = 0; a < k; ++a) {
            bool with_x = e.symplectic(out.logical_x[a]);
            bool with_z = e.symplectic(out.logical_z[a]);
            if (with_x) {
                e *= out.logical_z[a];
            }
            if (with_z) {
                e *= out.logical_x[a];
            }
        }
    }
    for (std::size_t j = 0; j < errors.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            if (!commutes(errors[j], errors[i])) {
                errors[j] *= s[i];
            }
        }
    }
    return out;
}

/// Structural checks of a StabilizerCode. Failures are reported, never thrown.
struct VerificationReport {
    struct Check {
        std::string name;
        bool passed = true;
        std::string detail;
    };
    std::vector<Check> checks;

    bool ok() const {
        for (const auto &c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return true;
    }

    bool passed(std::string_view name) const {
        for (const auto &c : checks) {
            if (c.name == name) {
                return c.passed;
            }
        }
        return false;
    }

    std::string summary() const {
        std::string out;
        for (const auto &c : checks) {
            out += (c.passed ? "ok   " : "FAIL ") + c.name;
            if (!c.detail.empty()) {
                out += ": " + c.detail;
            }
            out += "\n";
        }
        return out;
    }
};

inline VerificationReport verify(const StabilizerCode &code) {
    VerificationReport report;
    auto add = [&](std::string name, bool passed, std::string detail = {}) {
        report.checks.push_back({std::move(name), passed, passed ? std::string{} : std::move(detail)});
    };

    bool shape = code.k <= code.n && code.stabilizers.n == code.n && code.logical_x.size() == code.k &&
                 code.logical_z.size() == code.k && code.stabilizers.size() == code.n - code.k;
    for (const auto *group : {&code.logical_x, &code.logical_z}) {
        for (const auto &p : *group) {
            shape = shape && p.num_qubits() == code.n;
        }
    }
    add("shape", shape, "row counts or qubit counts disagree with (n, k)");
    if (!shape) {
        return report;
    }

    const auto &s = code.stabilizers.rows;
    EchelonBasis span(code.stabilizers);
    add("stabilizer_rank", span.rank() == code.n - code.k,
        "rank " + std::to_string(span.rank()) + ", expected " + std::to_string(code.n - code.k));

    std::string bad;
    for (std::size_t i = 0; i < s.size() && bad.empty(); ++i) {
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            if (!commutes(s[i], s[j])) {
                bad = s[i].str() + " / " + s[j].str();
                break;
            }
        }
    }
    add("stabilizers_commute", bad.empty(), bad);

    bad.clear();
    for (const auto *group : {&code.logical_x, &code.logical_z}) {
        for (const auto &l : *group) {
            for (const auto &g : s) {
                if (!commutes(l, g) && bad.empty()) {
                    bad = l.str() + " / " + g.str();
                }
            }
        }
    }
    add("logicals_commute_with_stabilizers", bad.empty(), bad);

    bad.clear();
    for (std::size_t a = 0; a < code.k; ++a) {
        for (std::size_t b = 0; b < code.k; ++b) {
            if (commutes(code.logical_x[a], code.logical_z[b]) == (a == b)) {
                bad = "X" + std::to_string(a) + " / Z" + std::to_string(b);
            }
            if (a != b && !commutes(code.logical_x[a], code.logical_x[b])) {
                bad = "X" + std::to_string(a) + " / X" + std::to_string(b);
            }
            if (a != b && !commutes(code.logical_z[a], code.logical_z[b])) {
                bad = "Z" + std::to_string(a) + " / Z" + std::to_string(b);
            }
        }
    }
    add("logical_pairing", bad.empty(), bad);

    bad.clear();
    for (const auto *group : {&code.logical_x, &code.logical_z}) {
        for (const auto &l : *group) {
            if (span.contains(l) && bad.empty()) {
                bad = l.str();
            }
        }
    }
    add("logicals_outside_stabilizer_group", bad.empty(), bad);
    return report;
}

/// Builds a code from independent commuting stabilizers, completing logicals
/// and reducing each representative against the stabilizer rref.
inline StabilizerCode code_from_stabilizers(const GeneratorMatrix &stabilizers) {
    auto completion = complete_logicals(stabilizers);
    EchelonBasis span(stabilizers);
    StabilizerCode code;
    code.n = stabilizers.n;
    code.k = stabilizers.n - stabilizers.size();
    code.stabilizers = stabilizers;
    for (auto &l : completion.logical_x) {
        code.logical_x.push_back(span.reduce(std::move(l)));
    }
    for (auto &l : completion.logical_z) {
        code.logical_z.push_back(span.reduce(std::move(l)));
    }
    return code;
}

/// Text format:
///   n k
///   n-k stabilizer rows
///   ---
///   k logical-X rows
///   k logical-Z rows
/// Lines starting with '#' and blank lines are ignored when reading.
inline std::string write_code(const StabilizerCode &code) {
    std::string out = std::to_string(code.n) + " " + std::to_string(code.k) + "\n";
    for (const auto &r : code.stabilizers.rows) {
        out += r.str() + "\n";
    }
    out += "---\n";
    for (const auto &r : code.logical_x) {
        out += r.str() + "\n";
    }
    for (const auto &r : code.logical_z) {
        out += r.str() + "\n";
    }
    return out;
}

namespace detail {

inline std::vector<std::string> content_lines(std::istream &in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
            line.pop_back();
        }
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos || line[start] == '#') {
            continue;
        }
        lines.push_back(line.substr(start));
    }
    return lines;
}

inline PauliString parse_row(const std::string &line, std::size_t n) {
    auto p = PauliString::from_text(line);
    if (p.num_qubits() != n) {
        throw parse_error("row \"" + line + "\" has " + std::to_string(p.num_qubits()) + " qubits, expected " +
                          std::to_string(n));
    }
    return p;
}

/// Parses a code from lines[pos...]; advances pos past the logical rows.
inline StabilizerCode parse_code_lines(const std::vector<std::string> &lines, std::size_t &pos) {
    if (pos >= lines.size()) {
        throw parse_error("empty code text");
    }
    std::istringstream header(lines[pos++]);
    long long n = -1, k = -1;
    std::string extra;
    if (!(header >> n >> k) || (header >> extra) || n < 1 || k < 0 || k > n) {
        throw parse_error("bad code header \"" + lines[pos - 1] + "\"");
    }
    StabilizerCode code;
    code.n = std::size_t(n);
    code.k = std::size_t(k);
    std::vector<PauliString> rows;
    auto need = [&](const char *what) {
        if (pos >= lines.size()) {
            throw parse_error(std::string("code text ends before ") + what);
        }
    };
    for (std::size_t i = 0; i < code.n - code.k; ++i) {
        need("all stabilizer rows");
        rows.push_back(parse_row(lines[pos++], code.n));
    }
    need("separator");
    if (lines[pos] != "---") {
        throw parse_error("expected \"---\" after stabilizers, got \"" + lines[pos] + "\"");
    }
    ++pos;
    code.stabilizers = GeneratorMatrix(code.n, std::move(rows));
    for (auto *group : {&code.logical_x, &code.logical_z}) {
        for (std::size_t i = 0; i < code.k; ++i) {
            need("all logical rows");
            group->push_back(parse_row(lines[pos++], code.n));
        }
    }
    return code;
}

}  // namespace detail

inline StabilizerCode read_code(std::istream &in) {
    auto lines = detail::content_lines(in);
    std::size_t pos = 0;
    auto code = detail::parse_code_lines(lines, pos);
    if (pos != lines.size()) {
        throw parse_error("unexpected trailing line \"" + lines[pos] + "\"");
    }
    return code;
}

inline StabilizerCode read_code(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_code(in);
}

inline const std::vector<std::string> &seed_names() {
    static const std::vector<std::string> names = {"five_qubit", "six_qubit_state", "four_two_two", "ten_one_four"};
    return names;
}

/// Seed-code catalog.
///
/// five_qubit and six_qubit_state carry the textbook generators verbatim
/// (six_qubit_state is the five-qubit code purified by a sixth qubit).
/// four_two_two and ten_one_four get logicals from complete_logicals.
inline StabilizerCode seed(std::string_view name) {
    if (name == "five_qubit") {
        StabilizerCode c;
        c.n = 5;
        c.k = 1;
        c.stabilizers = GeneratorMatrix::from_text(5, {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
        c.logical_x = {PauliString::from_text("XXXXX")};
        c.logical_z = {PauliString::from_text("ZZZZZ")};
        return c;
    }
    if (name == "six_qubit_state") {
        StabilizerCode c;
        c.n = 6;
        c.k = 0;
        c.stabilizers =
            GeneratorMatrix::from_text(6, {"XZZXII", "IXZZXI", "XIXZZI", "ZXIXZI", "XXXXXX", "ZZZZZZ"});
        return c;
    }
    if (name == "four_two_two") {
        return code_from_stabilizers(GeneratorMatrix::from_text(4, {"XXXX", "ZZZZ"}));
    }
    if (name == "ten_one_four") {
        auto shipped = read_code(embedded::ten_one_four_code);
        return code_from_stabilizers(shipped.stabilizers);
    }
    throw catalog_error("unknown seed code \"" + std::string(name) + "\"");
}

}  // namespace tnqec
