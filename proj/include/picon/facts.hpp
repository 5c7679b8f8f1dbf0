#pragma once

// State-update facts. Both the protocol and the architecture semantics emit
// one fact per knowledge- or value-changing step; the simulation and
// bisimulation checks compare the two fact sets under a mapping.

#include <string>
#include <tuple>
#include <vector>

#include "picon/term.hpp"

namespace picon {

struct UpdateFact {
    enum class Kind { Has, Receive, ReceiveAtt, Compute, CheckEq, VerifEq };
    Kind kind = Kind::Has;
    std::string comp;
    std::string peer;                                   // sender / attester
    std::string var;                                    // assigned variable
    Term rhs;                                           // Compute rhs, Check lhs/rhs packed in eqs
    std::vector<std::pair<Term, Term>> eqs;             // CheckEq / VerifEq / ReceiveAtt payload
    Term value;                                         // runtime value (not part of identity)

    // Identity excludes the runtime value: facts mirror relations.
    auto key() const {
        std::string eqrepr;
        for (const auto& [a, b] : eqs) eqrepr += to_string(a) + "=" + to_string(b) + ";";
        return std::make_tuple(static_cast<int>(kind), comp, peer, var, to_string(rhs), eqrepr);
    }
};

inline bool operator==(const UpdateFact& a, const UpdateFact& b) { return a.key() == b.key(); }
inline bool operator<(const UpdateFact& a, const UpdateFact& b) { return a.key() < b.key(); }

inline std::string to_string(const UpdateFact& f) {
    std::string k;
    switch (f.kind) {
        case UpdateFact::Kind::Has: k = "has"; break;
        case UpdateFact::Kind::Receive: k = "receive"; break;
        case UpdateFact::Kind::ReceiveAtt: k = "receive_att"; break;
        case UpdateFact::Kind::Compute: k = "compute"; break;
        case UpdateFact::Kind::CheckEq: k = "check"; break;
        case UpdateFact::Kind::VerifEq: k = "verif"; break;
    }
    std::string out = k + "(" + f.comp;
    if (!f.peer.empty()) out += " from " + f.peer;
    if (!f.var.empty()) out += ", " + f.var;
    if (f.kind == UpdateFact::Kind::Compute) out += " = " + to_string(f.rhs);
    if (!f.eqs.empty()) {
        out += ", {";
        bool first = true;
        for (const auto& [a, b] : f.eqs) {
            if (!first) out += ", ";
            first = false;
            out += to_string(a) + " = " + to_string(b);
        }
        out += "}";
    }
    return out + ")";
}

}  // namespace picon
