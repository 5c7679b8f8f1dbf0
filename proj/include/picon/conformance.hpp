#pragma once

// Conformance checking: search for an injective, structure-preserving
// renaming from the extracted architecture onto the target architecture
// (strong: exact relation-set equality; weak: target contained in the
// image), plus the state-update simulation and bisimulation checks used to
// cross-validate conformance verdicts.

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "picon/extraction.hpp"
#include "picon/logic.hpp"
#include "picon/pal.hpp"

namespace picon {

struct Mapping {
    std::map<std::string, std::string> id_map;   // component id renaming
    std::map<std::string, std::string> var_map;  // variable/name renaming
    std::map<std::string, std::string> fun_map;  // function-symbol renaming
    std::map<std::string, std::string> id_rev, var_rev, fun_rev;

    bool bind(std::map<std::string, std::string>& fwd, std::map<std::string, std::string>& rev,
              const std::string& from, const std::string& to) {
        auto it = fwd.find(from);
        if (it != fwd.end()) return it->second == to;
        auto rit = rev.find(to);
        if (rit != rev.end()) return false;  // injectivity
        fwd[from] = to;
        rev[to] = from;
        return true;
    }
    bool bind_id(const std::string& f, const std::string& t) { return bind(id_map, id_rev, f, t); }
    bool bind_var(const std::string& f, const std::string& t) { return bind(var_map, var_rev, f, t); }
    bool bind_fun(const std::string& f, const std::string& t) { return bind(fun_map, fun_rev, f, t); }

    std::string map_id(const std::string& s) const {
        auto it = id_map.find(s);
        return it == id_map.end() ? s : it->second;
    }
    std::string map_var(const std::string& s) const {
        auto it = var_map.find(s);
        return it == var_map.end() ? s : it->second;
    }
    Term map_term(const Term& t) const {
        if (t.kind == TermKind::Var || t.kind == TermKind::Name) {
            if (t.id.empty()) return t;
            return Term::var(map_var(t.id));
        }
        if (t.kind == TermKind::Fun) {
            auto it = fun_map.find(t.id);
            Term out = Term::fun(it == fun_map.end() ? t.id : it->second, {});
            for (const auto& a : t.args) out.args.push_back(map_term(a));
            return out;
        }
        return t;
    }
};

namespace conf_detail {

// Structural unification of a source (extracted) term against a target
// (architecture) term, extending the mapping. Source names behave like
// variables: the target level has no names.
inline bool unify_term(const Term& s, const Term& t, Mapping& m,
                       const EquationalTheory& Es, const EquationalTheory& Et) {
    if (s.kind == TermKind::Fun) {
        if (t.kind != TermKind::Fun || s.args.size() != t.args.size()) return false;
        auto fs = Es.functions.find(s.id);
        auto ft = Et.functions.find(t.id);
        if (fs != Es.functions.end() && ft != Et.functions.end() &&
            !fs->second.result_tag.empty() && !ft->second.result_tag.empty() &&
            fs->second.result_tag != ft->second.result_tag)
            return false;  // result types must agree
        if (!m.bind_fun(s.id, t.id)) return false;
        for (std::size_t i = 0; i < s.args.size(); ++i)
            if (!unify_term(s.args[i], t.args[i], m, Es, Et)) return false;
        return true;
    }
    if (s.kind == TermKind::Var || s.kind == TermKind::Name) {
        if (s.id.empty()) return t.id.empty();
        if (t.kind != TermKind::Var && t.kind != TermKind::Name) return false;
        return m.bind_var(s.id, t.id);
    }
    return s == t;
}

inline bool unify_attest(const Attest& s, const Attest& t, Mapping& m,
                         const EquationalTheory& Es, const EquationalTheory& Et);

// Equation multisets match when some permutation aligns them pairwise.
inline bool match_eqs(const std::vector<std::pair<std::string, Term>>& s,
                      const std::vector<std::pair<std::string, Term>>& t, std::size_t i,
                      std::vector<bool>& used, Mapping& m, const EquationalTheory& Es,
                      const EquationalTheory& Et) {
    if (i == s.size()) return true;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (used[j]) continue;
        Mapping saved = m;
        if (m.bind_var(s[i].first, t[j].first) &&
            unify_term(s[i].second, t[j].second, m, Es, Et)) {
            used[j] = true;
            if (match_eqs(s, t, i + 1, used, m, Es, Et)) return true;
            used[j] = false;
        }
        m = saved;
    }
    return false;
}

inline bool unify_attest(const Attest& s, const Attest& t, Mapping& m,
                         const EquationalTheory& Es, const EquationalTheory& Et) {
    if (s.equations.size() != t.equations.size()) return false;
    if (!m.bind_id(s.attester, t.attester)) return false;
    std::vector<bool> used(t.equations.size(), false);
    return match_eqs(s.equations, t.equations, 0, used, m, Es, Et);
}

inline bool unify_relation(const Relation& s, const Relation& t, Mapping& m,
                           const EquationalTheory& Es, const EquationalTheory& Et) {
    if (s.kind != t.kind) return false;
    if (!s.comp.empty() || !t.comp.empty())
        if (!m.bind_id(s.comp, t.comp)) return false;
    if (!s.peer.empty() || !t.peer.empty())
        if (!m.bind_id(s.peer, t.peer)) return false;
    if (!s.var.empty() || !t.var.empty()) {
        if (s.var.empty() != t.var.empty()) return false;
        if (!m.bind_var(s.var, t.var)) return false;
    }
    if (!unify_term(s.lhs, t.lhs, m, Es, Et)) return false;
    if (!unify_term(s.rhs, t.rhs, m, Es, Et)) return false;
    if (s.atts.size() != t.atts.size()) return false;
    // attestation sets are tiny; permutation matching
    std::vector<bool> used(t.atts.size(), false);
    struct Rec {
        const Relation &s, &t;
        const EquationalTheory &Es, &Et;
        bool run(std::size_t i, std::vector<bool>& used, Mapping& m) {
            if (i == s.atts.size()) return true;
            for (std::size_t j = 0; j < t.atts.size(); ++j) {
                if (used[j]) continue;
                Mapping saved = m;
                if (unify_attest(s.atts[i], t.atts[j], m, Es, Et)) {
                    used[j] = true;
                    if (run(i + 1, used, m)) return true;
                    used[j] = false;
                }
                m = saved;
            }
            return false;
        }
    } rec{s, t, Es, Et};
    return rec.run(0, used, m);
}

// Backtracking cover: match every relation in `cover` against a distinct
// relation in `pool` (directions differ between strong and weak modes).
// `src_is_pool` says which side of each pair is the extracted architecture.
inline bool cover_all(const std::vector<Relation>& cover, const std::vector<Relation>& pool,
                      bool src_is_pool, std::size_t i, std::vector<bool>& used, Mapping& m,
                      const EquationalTheory& Es, const EquationalTheory& Et, std::size_t& budget) {
    if (i == cover.size()) return true;
    for (std::size_t j = 0; j < pool.size(); ++j) {
        if (used[j]) continue;
        if (budget == 0) throw SearchBudgetExceeded("mapping search budget exhausted");
        --budget;
        Mapping saved = m;
        bool ok = src_is_pool ? unify_relation(pool[j], cover[i], m, Es, Et)
                              : unify_relation(cover[i], pool[j], m, Es, Et);
        if (ok) {
            used[j] = true;
            if (cover_all(cover, pool, src_is_pool, i + 1, used, m, Es, Et, budget)) return true;
            used[j] = false;
        }
        m = saved;
    }
    return false;
}

}  // namespace conf_detail

enum class ConformanceMode { Strong, Weak };

struct SearchConfig {
    std::size_t search_budget = 2000000;
    bool strict_subset = false;  // weak mode: require the containment to be proper
};

// Strong: some mapping renames the extracted relation set exactly onto the
// target. Weak: some mapping makes the image contain every target relation.
inline std::optional<Mapping> find_mapping(const Architecture& aS, const Architecture& a,
                                           ConformanceMode mode, const SearchConfig& sc = {}) {
    using namespace conf_detail;
    std::vector<Relation> src(aS.relations.begin(), aS.relations.end());
    std::vector<Relation> tgt(a.relations.begin(), a.relations.end());
    std::size_t budget = sc.search_budget;
    Mapping m;
    if (mode == ConformanceMode::Strong) {
        if (src.size() != tgt.size()) return std::nullopt;
        std::vector<bool> used(tgt.size(), false);
        if (cover_all(src, tgt, false, 0, used, m, aS.theory, a.theory, budget)) return m;
        return std::nullopt;
    }
    if (sc.strict_subset && src.size() <= tgt.size()) return std::nullopt;
    std::vector<bool> used(src.size(), false);
    if (cover_all(tgt, src, true, 0, used, m, aS.theory, a.theory, budget)) return m;
    return std::nullopt;
}

// Best-effort maximum matching for diagnostics: which target relations stay
// unmatched (missing) and which extracted ones stay unused (extra).
inline Mapping best_partial_mapping(const Architecture& aS, const Architecture& a,
                                    std::vector<Relation>& missing, std::vector<Relation>& extra,
                                    const SearchConfig& sc = {}) {
    using namespace conf_detail;
    std::vector<Relation> src(aS.relations.begin(), aS.relations.end());
    std::vector<Relation> tgt(a.relations.begin(), a.relations.end());
    std::size_t budget = sc.search_budget;

    Mapping best;
    std::vector<int> best_assign(tgt.size(), -1);
    std::size_t best_count = 0;
    bool have_best = false;

    struct Rec {
        const std::vector<Relation>&src, &tgt;
        const EquationalTheory &Es, &Et;
        std::size_t& budget;
        Mapping& best;
        std::vector<int>& best_assign;
        std::size_t& best_count;
        bool& have_best;

        void run(std::size_t i, std::vector<bool>& used, std::vector<int>& assign, Mapping& m,
                 std::size_t count) {
            if (have_best && count + (tgt.size() - i) <= best_count) return;
            if (i == tgt.size()) {
                if (!have_best || count > best_count) {
                    have_best = true;
                    best_count = count;
                    best = m;
                    best_assign = assign;
                }
                return;
            }
            for (std::size_t j = 0; j < src.size(); ++j) {
                if (used[j]) continue;
                if (budget == 0) return;  // degrade to the best found so far
                --budget;
                Mapping saved = m;
                if (unify_relation(src[j], tgt[i], m, Es, Et)) {
                    used[j] = true;
                    assign[i] = static_cast<int>(j);
                    run(i + 1, used, assign, m, count + 1);
                    assign[i] = -1;
                    used[j] = false;
                }
                m = saved;
            }
            run(i + 1, used, assign, m, count);  // leave tgt[i] unmatched
        }
    };
    std::vector<bool> used(src.size(), false);
    std::vector<int> assign(tgt.size(), -1);
    Mapping m;
    Rec rec{src, tgt, aS.theory, a.theory, budget, best, best_assign, best_count, have_best};
    rec.run(0, used, assign, m, 0);

    missing.clear();
    extra.clear();
    std::vector<bool> src_used(src.size(), false);
    for (std::size_t i = 0; i < tgt.size(); ++i) {
        if (best_assign[i] < 0)
            missing.push_back(tgt[i]);
        else
            src_used[static_cast<std::size_t>(best_assign[i])] = true;
    }
    for (std::size_t j = 0; j < src.size(); ++j)
        if (!src_used[j]) extra.push_back(src[j]);
    return best;
}

// ---------------------------------------------------------------------------
// State simulation via update facts

inline UpdateFact map_fact(const UpdateFact& f, const Mapping& m) {
    UpdateFact out = f;
    out.comp = m.map_id(f.comp);
    out.peer = f.peer.empty() ? f.peer : m.map_id(f.peer);
    out.var = f.var.empty() ? f.var : m.map_var(f.var);
    out.rhs = m.map_term(f.rhs);
    for (auto& [a, b] : out.eqs) {
        a = m.map_term(a);
        b = m.map_term(b);
    }
    out.value = {};
    return out;
}

inline bool fact_touches(const UpdateFact& f, const std::string& var) {
    if (f.var == var) return true;
    if (mentions_var(f.rhs, var)) return true;
    for (const auto& [a, b] : f.eqs) {
        if ((a.is_var() && a.id == var) || mentions_var(a, var)) return true;
        if (mentions_var(b, var)) return true;
    }
    return false;
}

inline std::set<UpdateFact> mapped_facts(const std::set<UpdateFact>& proto, const Mapping& m) {
    std::set<UpdateFact> out;
    for (const auto& f : proto) out.insert(map_fact(f, m));
    return out;
}

// The protocol simulates the architecture when every architecture update is
// mirrored by a protocol update under the mapping. Restricting to a variable
// pair keeps only the updates that touch it.
inline bool check_simulation(const std::set<UpdateFact>& proto_facts,
                             const std::set<UpdateFact>& arch_facts, const Mapping& m,
                             const std::optional<std::pair<std::string, std::string>>&
                                 arch_calc_pair = std::nullopt) {
    std::set<UpdateFact> img = mapped_facts(proto_facts, m);
    for (const auto& af : arch_facts) {
        if (arch_calc_pair && !fact_touches(af, arch_calc_pair->first)) continue;
        UpdateFact probe = af;
        probe.value = {};
        if (!img.count(probe)) return false;
    }
    return true;
}

inline bool check_bisimulation(const std::set<UpdateFact>& proto_facts,
                               const std::set<UpdateFact>& arch_facts, const Mapping& m,
                               const std::optional<std::pair<std::string, std::string>>&
                                   arch_calc_pair = std::nullopt) {
    if (!check_simulation(proto_facts, arch_facts, m, arch_calc_pair)) return false;
    std::set<UpdateFact> arch_clean;
    for (const auto& af : arch_facts) {
        UpdateFact probe = af;
        probe.value = {};
        arch_clean.insert(probe);
    }
    for (const auto& pf : mapped_facts(proto_facts, m)) {
        if (arch_calc_pair && !fact_touches(pf, arch_calc_pair->first)) continue;
        if (!arch_clean.count(pf)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Verdicts

struct ConformanceVerdict {
    ConformanceMode mode = ConformanceMode::Strong;
    bool holds = false;
    std::optional<Mapping> witness;
    std::vector<Relation> missing;  // target relations with no extracted counterpart
    std::vector<Relation> extra;    // extracted relations outside the target
    std::vector<std::pair<std::string, std::string>> hasnone_violations;  // (arch var, calc var)
    Architecture extracted;
};

inline ConformanceVerdict check_conformance(const System& s, const Architecture& a,
                                            ConformanceMode mode, const ReductionConfig& rc = {},
                                            const SearchConfig& sc = {},
                                            const LogicConfig& lc = {}) {
    ConformanceVerdict v;
    v.mode = mode;
    v.extracted = extract_architecture(s, rc);
    v.witness = find_mapping(v.extracted, a, mode, sc);
    if (!v.witness) {
        best_partial_mapping(v.extracted, a, v.missing, v.extra, sc);
        return v;
    }
    if (mode == ConformanceMode::Weak) {
        // every Has^none guarantee the architecture actually provides must
        // also hold in the protocol
        ProtoSemantics sem = proto_semantics(s, rc);
        std::optional<ArchSemantics> asem;
        for (const auto& [name, f] : a.properties) {
            if (f.kind != PropertyFormula::Kind::HasNone) continue;
            if (!asem) asem = explore_architecture(a);
            if (!eval_arch(*asem, a, f, lc)) continue;  // nothing promised, nothing owed
            for (const auto& inst : a.expand_var(f.var)) {
                for (const auto& [calc_var, arch_var] : v.witness->var_map) {
                    if (arch_var != inst) continue;
                    std::string calc_comp = f.comp;
                    for (const auto& [ci, ai] : v.witness->id_map)
                        if (ai == f.comp) calc_comp = ci;
                    if (!eval_sys(sem, rc.theory,
                                  PropertyFormula::has_none(calc_comp, calc_var), lc))
                        v.hasnone_violations.emplace_back(inst, calc_var);
                }
            }
        }
        if (!v.hasnone_violations.empty()) return v;
    }
    v.holds = true;
    return v;
}

}  // namespace picon
