#pragma once

// Labeled reduction semantics over process configurations, and exhaustive
// enumeration of all maximal label traces.
//
// Instead of substituting values into the process text, each component keeps
// an environment (variable -> value). Labels carry both the syntactic
// right-hand side (what the component wrote) and the evaluated value (what it
// holds), so the downstream knowledge semantics never has to re-run the
// protocol.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "picon/calculus.hpp"
#include "picon/term.hpp"

namespace picon {

struct Label {
    enum class Kind { Has, Rcv, RcvAtt, VerAtt, Check, Comp, Error, Tau };
    Kind kind = Kind::Tau;
    std::string comp;
    std::string peer;     // sender (Rcv/RcvAtt)
    std::string var;      // bound variable
    Term rhs;             // syntactic rhs (Comp), If rhs (Check), attested t_m (VerAtt)
    Term lhs;             // If lhs (Check)
    Term value;           // evaluated value bound to `var`
    bool has_binding = false;  // Tau only: carries a (var, value) binding
    // attestation payload, carried by RcvAtt and VerAtt
    std::string attester;
    std::string att_msg_var;                      // sender-side message variable
    std::vector<std::pair<Term, Term>> att_eqs;   // x = t equations, first is (msg var, t_m)

    auto key() const {
        std::string eqrepr;
        for (const auto& [a, b] : att_eqs) eqrepr += to_string(a) + "=" + to_string(b) + ";";
        return std::make_tuple(static_cast<int>(kind), comp, peer, var, to_string(rhs),
                               to_string(lhs), to_string(value), has_binding, attester,
                               att_msg_var, eqrepr);
    }
};

inline bool operator==(const Label& a, const Label& b) { return a.key() == b.key(); }
inline bool operator<(const Label& a, const Label& b) { return a.key() < b.key(); }

inline std::string to_string(const Label& l) {
    switch (l.kind) {
        case Label::Kind::Has: return "has(" + l.comp + ", " + l.var + ":" + to_string(l.value) + ")";
        case Label::Kind::Rcv:
            return "rcv(" + l.comp + ", " + l.peer + ", " + l.var + ":" + to_string(l.value) + ")";
        case Label::Kind::RcvAtt:
            return "rcv_att(" + l.comp + ", " + l.peer + ", " + l.var + ":" + to_string(l.value) +
                   ")";
        case Label::Kind::VerAtt:
            return "ver_att(" + l.comp + ", " + l.var + ":" + to_string(l.rhs) + ")";
        case Label::Kind::Check:
            return "check(" + l.comp + ", " + to_string(l.lhs) + " = " + to_string(l.rhs) + ")";
        case Label::Kind::Comp:
            return "comp(" + l.comp + ", " + l.var + ":" + to_string(l.rhs) + ")";
        case Label::Kind::Error: return "error(" + l.comp + ")";
        case Label::Kind::Tau: return "tau(" + l.comp + ")";
    }
    return "";
}

using LabelTrace = std::vector<Label>;

// ---------------------------------------------------------------------------
// Configurations

struct AttReceipt {
    std::string attester;
    std::string msg_var;                          // sender-side message variable
    std::vector<std::pair<Term, Term>> equations;  // sender-side computation closure
};

struct CompConfig {
    std::vector<Process> threads;
    std::map<std::string, Term> env;   // variable -> evaluated value
    std::map<std::string, Term> defs;  // variable -> syntactic rhs of its defining let
    std::map<std::string, AttReceipt> receipts;  // keyed by the signature binder
    std::set<std::string> trusts;
    bool error = false;
};

struct SysConfig {
    std::map<std::string, CompConfig> comps;

    std::string serialize() const {
        std::string s;
        for (const auto& [id, c] : comps) {
            s += id + (c.error ? "!ERR" : "") + "{";
            for (const auto& t : c.threads) s += render_process(t) + " ;; ";
            s += "|";
            for (const auto& [v, val] : c.env) s += v + ":" + to_string(val) + ",";
            s += "|";
            for (const auto& [v, r] : c.receipts) s += v + "<" + r.attester + ",";
            s += "}";
        }
        return s;
    }
};

namespace red_detail {

// Structural normalization: open restrictions, split parallel compositions,
// drop nil threads.
inline void flatten(const Process& p, std::vector<Process>& out) {
    switch (p.kind) {
        case Process::Kind::Nil: return;
        case Process::Kind::Par:
            flatten(p.kids[0], out);
            flatten(p.kids[1], out);
            return;
        case Process::Kind::Restrict: flatten(p.kids[0], out); return;
        default: out.push_back(p);
    }
}

inline Term eval_term(const Term& t, const CompConfig& c, const EquationalTheory& E,
                      std::size_t budget) {
    struct Sub {
        const CompConfig& c;
        Term run(const Term& t) {
            if (t.kind == TermKind::Var) {
                auto it = c.env.find(t.id);
                if (it == c.env.end())
                    throw Error("variable '" + t.id + "' used before it is bound");
                return it->second;
            }
            Term out = t;
            for (auto& a : out.args) a = run(a);
            return out;
        }
    } sub{c};
    return normal_form(sub.run(t), E, budget);
}

// The computation closure backward-reachable from `v` in the sender's defs,
// skipping signature plumbing. These are the equations an attestation covers.
inline void att_closure(const std::string& v, const CompConfig& sender,
                        std::vector<std::pair<Term, Term>>& out, std::set<std::string>& seen) {
    if (!seen.insert(v).second) return;
    auto it = sender.defs.find(v);
    if (it == sender.defs.end()) return;
    const Term& rhs = it->second;
    if (rhs.is_fun("sign") || rhs.is_fun("checksign")) return;
    out.emplace_back(Term::var(v), rhs);
    std::set<std::string> vars;
    collect_vars(rhs, vars);
    for (const auto& x : vars) att_closure(x, sender, out, seen);
}

}  // namespace red_detail

inline SysConfig initial_config(const System& s) {
    SysConfig cfg;
    for (const Component* c : system_components(s)) {
        CompConfig cc;
        cc.trusts = c->trusts;
        red_detail::flatten(c->body, cc.threads);
        cfg.comps[c->id] = std::move(cc);
    }
    return cfg;
}

struct ReductionConfig {
    EquationalTheory theory = EquationalTheory::builtins();
    std::size_t rewrite_budget = kDefaultRewriteBudget;
    std::size_t max_nodes = 100000;
};

// One successor per enabled base rule, closed under parallel composition.
inline std::vector<std::pair<Label, SysConfig>> enabled_steps(const SysConfig& cfg,
                                                             const ReductionConfig& rc) {
    using red_detail::eval_term;
    std::vector<std::pair<Label, SysConfig>> out;

    auto advance = [&](SysConfig next, const std::string& comp, std::size_t ti,
                       const Process& cont) {
        auto& cc = next.comps.at(comp);
        std::vector<Process> rest;
        red_detail::flatten(cont, rest);
        cc.threads.erase(cc.threads.begin() + static_cast<long>(ti));
        cc.threads.insert(cc.threads.end(), rest.begin(), rest.end());
        return next;
    };

    for (const auto& [id, cc] : cfg.comps) {
        if (cc.error) continue;
        for (std::size_t ti = 0; ti < cc.threads.size(); ++ti) {
            const Process& p = cc.threads[ti];
            switch (p.kind) {
                case Process::Kind::Let: {
                    if (p.rhs.is_name()) {  // environment input: x = k
                        Label l;
                        l.kind = Label::Kind::Has;
                        l.comp = id;
                        l.var = p.binder;
                        l.value = p.rhs;
                        SysConfig next = advance(cfg, id, ti, p.kids[0]);
                        next.comps.at(id).env[p.binder] = p.rhs;
                        out.emplace_back(std::move(l), std::move(next));
                        break;
                    }
                    Term value = eval_term(p.rhs, cc, rc.theory, rc.rewrite_budget);
                    SysConfig next = advance(cfg, id, ti, p.kids[0]);
                    auto& me = next.comps.at(id);
                    me.env[p.binder] = value;
                    me.defs[p.binder] = p.rhs;
                    Label l;
                    l.comp = id;
                    l.var = p.binder;
                    l.value = value;
                    if (p.rhs.is_fun("sign") || p.rhs.is_fun("checksign")) {
                        l.kind = Label::Kind::Tau;  // signature plumbing is silent
                        l.has_binding = true;
                    } else {
                        l.kind = Label::Kind::Comp;
                        l.rhs = p.rhs;
                    }
                    out.emplace_back(std::move(l), std::move(next));
                    break;
                }
                case Process::Kind::If: {
                    Term lv = eval_term(p.lhs, cc, rc.theory, rc.rewrite_budget);
                    Term rv = eval_term(p.rhs, cc, rc.theory, rc.rewrite_budget);
                    bool holds = lv == rv;
                    bool is_verif = p.rhs.is_fun("checksign");
                    if (!holds) {
                        Label l;
                        l.kind = Label::Kind::Error;
                        l.comp = id;
                        SysConfig next = cfg;
                        auto& me = next.comps.at(id);
                        me.error = true;
                        me.threads.clear();
                        out.emplace_back(std::move(l), std::move(next));
                        break;
                    }
                    SysConfig next = advance(cfg, id, ti, p.kids[0]);
                    Label l;
                    l.comp = id;
                    if (is_verif) {
                        l.kind = Label::Kind::VerAtt;
                        l.value = lv;
                        // recover the receipt through the signature variable
                        const Term& sig_arg = p.rhs.args[0];
                        if (sig_arg.is_var()) {
                            auto it = cc.receipts.find(sig_arg.id);
                            if (it != cc.receipts.end()) {
                                l.attester = it->second.attester;
                                l.att_msg_var = it->second.msg_var;
                                l.att_eqs = it->second.equations;
                                if (!l.att_eqs.empty()) l.rhs = l.att_eqs.front().second;
                            }
                        }
                        l.var = p.lhs.is_var() ? p.lhs.id : to_string(p.lhs);
                    } else {
                        l.kind = Label::Kind::Check;
                        l.lhs = p.lhs;
                        l.rhs = p.rhs;
                    }
                    out.emplace_back(std::move(l), std::move(next));
                    break;
                }
                case Process::Kind::Send:
                case Process::Kind::SendAtt: {
                    // pair with a matching receiver anywhere in the system
                    bool att = p.kind == Process::Kind::SendAtt;
                    for (const auto& [rid, rcc] : cfg.comps) {
                        if (rcc.error) continue;
                        for (std::size_t rj = 0; rj < rcc.threads.size(); ++rj) {
                            if (rid == id && rj == ti) continue;
                            const Process& q = rcc.threads[rj];
                            if (att && q.kind != Process::Kind::RecvAtt) continue;
                            if (!att && q.kind != Process::Kind::Recv) continue;
                            if (q.channel.id != p.channel.id) continue;

                            Term v = eval_term(p.payload, cc, rc.theory, rc.rewrite_budget);
                            SysConfig next = cfg;
                            {
                                // remove both heads, append both continuations
                                auto& sc = next.comps.at(id);
                                auto& rcv = next.comps.at(rid);
                                std::vector<Process> scont, rcont;
                                red_detail::flatten(p.kids[0], scont);
                                red_detail::flatten(q.kids[0], rcont);
                                if (id == rid) {
                                    auto hi = std::max(ti, rj), lo = std::min(ti, rj);
                                    sc.threads.erase(sc.threads.begin() + static_cast<long>(hi));
                                    sc.threads.erase(sc.threads.begin() + static_cast<long>(lo));
                                    sc.threads.insert(sc.threads.end(), scont.begin(), scont.end());
                                    sc.threads.insert(sc.threads.end(), rcont.begin(), rcont.end());
                                } else {
                                    sc.threads.erase(sc.threads.begin() + static_cast<long>(ti));
                                    sc.threads.insert(sc.threads.end(), scont.begin(), scont.end());
                                    rcv.threads.erase(rcv.threads.begin() + static_cast<long>(rj));
                                    rcv.threads.insert(rcv.threads.end(), rcont.begin(),
                                                       rcont.end());
                                }
                            }
                            auto& rcv = next.comps.at(rid);
                            rcv.env[q.binder] = v;
                            Label l;
                            l.comp = rid;
                            l.peer = id;
                            l.var = q.binder;
                            l.value = v;
                            if (att) {
                                Term vsig = eval_term(p.payload2, cc, rc.theory, rc.rewrite_budget);
                                rcv.env[q.binder2] = vsig;
                                AttReceipt rec;
                                rec.attester = id;
                                if (p.payload.is_var()) {
                                    rec.msg_var = p.payload.id;
                                    std::set<std::string> seen;
                                    red_detail::att_closure(p.payload.id, cc, rec.equations, seen);
                                }
                                l.attester = id;
                                l.att_msg_var = rec.msg_var;
                                l.att_eqs = rec.equations;
                                rcv.receipts[q.binder2] = std::move(rec);
                            }
                            if (id == rid) {
                                l.kind = Label::Kind::Tau;
                                l.has_binding = true;
                                l.peer.clear();
                            } else {
                                l.kind = att ? Label::Kind::RcvAtt : Label::Kind::Rcv;
                            }
                            out.emplace_back(std::move(l), std::move(next));
                        }
                    }
                    break;
                }
                case Process::Kind::Recv:
                case Process::Kind::RecvAtt:
                    break;  // handled from the sender side
                default:
                    break;  // Nil/Par/Restrict never survive flattening
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first.key() < b.first.key(); });
    return out;
}

// All maximal label traces, sharing suffixes between configurations reached
// by different interleavings. There is no replication, so the configuration
// graph is acyclic and the memoization is sound.
inline std::vector<LabelTrace> all_traces(const System& s, const ReductionConfig& rc = {}) {
    std::map<std::string, std::vector<LabelTrace>> memo;
    std::size_t nodes = 0;

    struct Rec {
        const ReductionConfig& rc;
        std::map<std::string, std::vector<LabelTrace>>& memo;
        std::size_t& nodes;

        const std::vector<LabelTrace>& run(const SysConfig& cfg) {
            std::string k = cfg.serialize();
            auto it = memo.find(k);
            if (it != memo.end()) return it->second;
            if (++nodes > rc.max_nodes)
                throw StateSpaceBudgetExceeded("reduction state-space budget exhausted");
            std::vector<LabelTrace> result;
            auto steps = enabled_steps(cfg, rc);
            if (steps.empty()) {
                result.push_back({});
            } else {
                for (const auto& [label, next] : steps) {
                    for (const auto& suffix : run(next)) {
                        LabelTrace tr;
                        tr.reserve(suffix.size() + 1);
                        tr.push_back(label);
                        tr.insert(tr.end(), suffix.begin(), suffix.end());
                        result.push_back(std::move(tr));
                    }
                }
                // distinct interleavings can produce identical label traces
                std::sort(result.begin(), result.end());
                result.erase(std::unique(result.begin(), result.end()), result.end());
            }
            return memo.emplace(std::move(k), std::move(result)).first->second;
        }
    } rec{rc, memo, nodes};
    return rec.run(initial_config(s));
}

inline std::vector<std::pair<Label, SysConfig>> enabled_steps(const System& s,
                                                             const ReductionConfig& rc = {}) {
    return enabled_steps(initial_config(s), rc);
}

}  // namespace picon
