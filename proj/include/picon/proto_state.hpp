#pragma once

// Protocol-level knowledge semantics: per-component variable and property
// states, the label-by-label state update, trace folding, and the set of all
// reachable global states with value provenance.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "picon/facts.hpp"
#include "picon/reduction.hpp"
#include "picon/term.hpp"

namespace picon {

struct ComponentState {
    std::map<std::string, Term> var_state;        // functional: one binding per variable
    std::set<std::pair<Term, Term>> prop_state;   // established equations
    std::set<std::string> trusted;                // Trust facts, fixed at Init
    bool error = false;
};

struct GlobalState {
    std::map<std::string, ComponentState> comps;
    std::map<Term, std::set<std::string>> provenance;  // value -> variables it bound

    std::string serialize() const {
        std::string s;
        for (const auto& [id, c] : comps) {
            s += id + (c.error ? "!" : "") + "{";
            for (const auto& [v, t] : c.var_state) s += v + ":" + to_string(t) + ",";
            s += "|";
            for (const auto& [a, b] : c.prop_state) s += to_string(a) + "=" + to_string(b) + ",";
            s += "|";
            for (const auto& t : c.trusted) s += t + ",";
            s += "}";
        }
        s += "@";
        for (const auto& [t, vs] : provenance) {
            s += to_string(t) + ":";
            for (const auto& v : vs) s += v + ",";
            s += ";";
        }
        return s;
    }
};

inline bool operator<(const GlobalState& a, const GlobalState& b) {
    return a.serialize() < b.serialize();
}
inline bool operator==(const GlobalState& a, const GlobalState& b) {
    return a.serialize() == b.serialize();
}

// Init^S: empty states carrying only the syntactic trust facts.
inline GlobalState initial_state(const System& s) {
    GlobalState g;
    for (const Component* c : system_components(s)) {
        ComponentState cs;
        cs.trusted = c->trusts;
        g.comps[c->id] = cs;
    }
    return g;
}

struct UnknownComponent : Error {
    using Error::Error;
};

// One state-update clause per label kind. Errored components absorb all
// further updates. The optional fact output mirrors the update for the
// simulation checks; silent steps produce none.
inline GlobalState apply_label(const Label& l, const GlobalState& g,
                               UpdateFact* fact_out = nullptr) {
    auto it = g.comps.find(l.comp);
    if (it == g.comps.end()) throw UnknownComponent("no component '" + l.comp + "'");
    GlobalState out = g;
    ComponentState& me = out.comps.at(l.comp);
    if (me.error) return out;

    auto bind = [&](const std::string& x, const Term& v) {
        me.var_state[x] = v;
        out.provenance[v].insert(x);
    };

    switch (l.kind) {
        case Label::Kind::Has:
            bind(l.var, l.value);
            if (fact_out) *fact_out = {UpdateFact::Kind::Has, l.comp, "", l.var, {}, {}, l.value};
            break;
        case Label::Kind::Rcv:
            bind(l.var, l.value);
            if (fact_out)
                *fact_out = {UpdateFact::Kind::Receive, l.comp, l.peer, l.var, {}, {}, l.value};
            break;
        case Label::Kind::RcvAtt:
            bind(l.var, l.value);
            if (fact_out)
                *fact_out = {UpdateFact::Kind::ReceiveAtt, l.comp, l.peer, l.var, {}, l.att_eqs,
                             l.value};
            break;
        case Label::Kind::Comp:
            bind(l.var, l.value);
            me.prop_state.insert({Term::var(l.var), l.rhs});
            if (fact_out)
                *fact_out = {UpdateFact::Kind::Compute, l.comp, "", l.var, l.rhs, {}, l.value};
            break;
        case Label::Kind::Check:
            me.prop_state.insert({l.lhs, l.rhs});
            if (fact_out)
                *fact_out = {UpdateFact::Kind::CheckEq, l.comp, "", "", {}, {{l.lhs, l.rhs}}, {}};
            break;
        case Label::Kind::VerAtt:
            if (!l.attester.empty() && me.trusted.count(l.attester)) {
                for (const auto& eq : l.att_eqs) me.prop_state.insert(eq);
                if (fact_out)
                    *fact_out = {UpdateFact::Kind::VerifEq, l.comp, l.attester, "", {}, l.att_eqs,
                                 {}};
            }
            break;
        case Label::Kind::Error:
            me.error = true;
            break;
        case Label::Kind::Tau:
            if (l.has_binding) bind(l.var, l.value);
            break;
    }
    return out;
}

inline GlobalState run_trace(const LabelTrace& tr, const GlobalState& init) {
    GlobalState g = init;
    for (const auto& l : tr) g = apply_label(l, g);
    return g;
}

struct ProtoSemantics {
    std::vector<GlobalState> states;     // every prefix of every trace
    std::vector<GlobalState> endpoints;  // maximal-trace end states
    std::set<UpdateFact> facts;
};

// The set of reachable global states. The knowledge state reached at a given
// process configuration does not depend on the interleaving that led there
// (independent steps commute), so the walk is memoized per configuration.
inline ProtoSemantics proto_semantics(const System& s, const ReductionConfig& rc = {}) {
    ProtoSemantics out;
    std::set<std::string> seen_states, seen_endpoints, visited_cfgs;
    std::size_t nodes = 0;

    struct Rec {
        const ReductionConfig& rc;
        ProtoSemantics& out;
        std::set<std::string>&seen_states, &seen_endpoints, &visited_cfgs;
        std::size_t& nodes;

        void run(const SysConfig& cfg, const GlobalState& g) {
            if (!visited_cfgs.insert(cfg.serialize()).second) return;
            if (++nodes > rc.max_nodes)
                throw StateSpaceBudgetExceeded("protocol state-space budget exhausted");
            if (seen_states.insert(g.serialize()).second) out.states.push_back(g);
            auto steps = enabled_steps(cfg, rc);
            if (steps.empty()) {
                if (seen_endpoints.insert(g.serialize()).second) out.endpoints.push_back(g);
                return;
            }
            for (const auto& [label, next] : steps) {
                UpdateFact fact;
                fact.comp = "";
                GlobalState ng = apply_label(label, g, &fact);
                if (!fact.comp.empty()) out.facts.insert(fact);
                run(next, ng);
            }
        }
    } rec{rc, out, seen_states, seen_endpoints, visited_cfgs, nodes};
    rec.run(initial_config(s), initial_state(s));
    return out;
}

// Def. 1's state set.
inline std::vector<GlobalState> state_semantics(const System& s, const ReductionConfig& rc = {}) {
    return proto_semantics(s, rc).states;
}

}  // namespace picon
