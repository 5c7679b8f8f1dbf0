#pragma once

// Privacy-logic evaluation at both levels. A component "obtains" a variable
// when, in some reachable state, it can deduce a value that was bound to that
// variable along the run. Knowledge of an equation holds when every maximal
// run ends in a state whose established equations entail it.

#include <string>
#include <vector>

#include "picon/formula.hpp"
#include "picon/pal.hpp"
#include "picon/proto_state.hpp"
#include "picon/term.hpp"

namespace picon {

struct LogicConfig {
    std::size_t deduction_depth = kDefaultDeductionDepth;
    std::size_t rewrite_budget = kDefaultRewriteBudget;
};

namespace logic_detail {

// Can `comp` in this architecture state deduce some value that was bound to
// variable `x`?
inline bool arch_witness(const ArchGlobalState& g, const std::string& comp, const std::string& x,
                         const EquationalTheory& E, const LogicConfig& lc) {
    auto it = g.comps.find(comp);
    if (it == g.comps.end()) return false;
    std::vector<Term> knowledge;
    for (const auto& [v, val] : it->second.values) knowledge.push_back(val);
    for (const auto& [val, vars] : g.provenance) {
        if (!vars.count(x)) continue;
        if (deducible(knowledge, val, E, lc.deduction_depth, lc.rewrite_budget)) return true;
    }
    return false;
}

inline bool sys_witness(const GlobalState& g, const std::string& comp, const std::string& x,
                        const EquationalTheory& E, const LogicConfig& lc) {
    auto it = g.comps.find(comp);
    if (it == g.comps.end()) return false;
    std::vector<Term> knowledge;
    for (const auto& [v, val] : it->second.var_state) knowledge.push_back(val);
    for (const auto& [val, vars] : g.provenance) {
        if (!vars.count(x)) continue;
        if (deducible(knowledge, val, E, lc.deduction_depth, lc.rewrite_budget)) return true;
    }
    return false;
}

}  // namespace logic_detail

// Evaluation over a precomputed architecture state space. Array variables
// expand over their declared range; Has^all needs one state providing every
// instance, Has^none forbids every instance in every state.
inline bool eval_arch(const ArchSemantics& sem, const Architecture& a, const PropertyFormula& f,
                      const LogicConfig& lc = {}) {
    using logic_detail::arch_witness;
    switch (f.kind) {
        case PropertyFormula::Kind::HasAll: {
            auto instances = a.expand_var(f.var);
            for (const auto& g : sem.states) {
                bool all = true;
                for (const auto& x : instances)
                    if (!arch_witness(g, f.comp, x, a.theory, lc)) {
                        all = false;
                        break;
                    }
                if (all) return true;
            }
            return false;
        }
        case PropertyFormula::Kind::HasNone: {
            auto instances = a.expand_var(f.var);
            for (const auto& g : sem.states)
                for (const auto& x : instances)
                    if (arch_witness(g, f.comp, x, a.theory, lc)) return false;
            return true;
        }
        case PropertyFormula::Kind::Knows: {
            for (const auto& g : sem.endpoints) {
                auto it = g.comps.find(f.comp);
                std::vector<std::pair<Term, Term>> eqs;
                if (it != g.comps.end())
                    eqs.assign(it->second.props.begin(), it->second.props.end());
                if (!entails_equation(eqs, f.lhs, f.rhs, a.theory, lc.rewrite_budget))
                    return false;
            }
            return true;
        }
        case PropertyFormula::Kind::And:
            return eval_arch(sem, a, f.kids[0], lc) && eval_arch(sem, a, f.kids[1], lc);
    }
    return false;
}

inline bool eval_arch(const Architecture& a, const PropertyFormula& f, const LogicConfig& lc = {},
                      const ExploreConfig& ec = {}) {
    return eval_arch(explore_architecture(a, ec), a, f, lc);
}

inline bool eval_sys(const ProtoSemantics& sem, const EquationalTheory& E,
                     const PropertyFormula& f, const LogicConfig& lc = {}) {
    using logic_detail::sys_witness;
    switch (f.kind) {
        case PropertyFormula::Kind::HasAll: {
            for (const auto& g : sem.states)
                if (sys_witness(g, f.comp, f.var, E, lc)) return true;
            return false;
        }
        case PropertyFormula::Kind::HasNone: {
            for (const auto& g : sem.states)
                if (sys_witness(g, f.comp, f.var, E, lc)) return false;
            return true;
        }
        case PropertyFormula::Kind::Knows: {
            for (const auto& g : sem.endpoints) {
                auto it = g.comps.find(f.comp);
                std::vector<std::pair<Term, Term>> eqs;
                if (it != g.comps.end())
                    eqs.assign(it->second.prop_state.begin(), it->second.prop_state.end());
                if (!entails_equation(eqs, f.lhs, f.rhs, E, lc.rewrite_budget)) return false;
            }
            return true;
        }
        case PropertyFormula::Kind::And:
            return eval_sys(sem, E, f.kids[0], lc) && eval_sys(sem, E, f.kids[1], lc);
    }
    return false;
}

inline bool eval_sys(const System& s, const PropertyFormula& f, const ReductionConfig& rc = {},
                     const LogicConfig& lc = {}) {
    return eval_sys(proto_semantics(s, rc), rc.theory, f, lc);
}

}  // namespace picon
