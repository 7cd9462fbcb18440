#pragma once

#include <string>

#include "tnqec/tncode.h"

namespace tnqec {

/// Canonical, presentation-independent key of a code: "n.k:" followed by the
/// hex rows of the stabilizer rref, then "|" and the logical representatives
/// reduced against that rref (X representatives first, then Z).
inline std::string percept_key(const StabilizerCode &code) {
    EchelonBasis basis(code.stabilizers);
    std::string key = std::to_string(code.n) + "." + std::to_string(code.k) + ":";
    const auto &rows = basis.matrix().rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i) {
            key += ',';
        }
        key += rows[i].hex();
    }
    key += '|';
    bool first = true;
    for (const auto *group : {&code.logical_x, &code.logical_z}) {
        for (const auto &l : *group) {
            if (!first) {
                key += ',';
            }
            first = false;
            key += basis.reduce(l).hex();
        }
    }
    return key;
}

/// Percept key plus the node owning each qubit; identifies a search state.
inline std::string state_key(const TensorNetworkCode &tn) {
    std::string key = percept_key(tn.code());
    key += '#';
    for (auto v : tn.node_of()) {
        key += std::to_string(v);
        key += '.';
    }
    return key;
}

}  // namespace tnqec
