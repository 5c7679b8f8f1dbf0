#pragma once

// Architecture extraction: fold the label traces of a system into the set of
// architecture relations it realizes, seeded with the syntactic trust
// relations. A fixpoint over the trace set makes the guarded rules
// independent of trace processing order.

#include <set>
#include <string>
#include <vector>

#include "picon/pal.hpp"
#include "picon/proto_state.hpp"
#include "picon/reduction.hpp"

namespace picon {

struct ExtractionContext {
    std::set<Relation> relations;  // alpha_S, grows monotonically
};

namespace ext_detail {

inline Attest attest_of(const Label& l) {
    Attest a;
    a.attester = l.attester;
    for (const auto& [x, t] : l.att_eqs) a.equations.emplace_back(x.id, t);
    a.normalize();
    return a;
}

}  // namespace ext_detail

// One extraction rule per label kind; guarded rules consult the relations
// extracted so far and simply decline until their guards appear.
inline void extract_label(const Label& l, ExtractionContext& ctx) {
    switch (l.kind) {
        case Label::Kind::Has:
            ctx.relations.insert(Relation::has_arch(l.comp, l.var));
            break;
        case Label::Kind::Rcv:
            ctx.relations.insert(Relation::receive(l.comp, l.peer, {}, l.var));
            break;
        case Label::Kind::RcvAtt: {
            if (l.att_eqs.empty()) {
                // the sent value was never computed by the sender; nothing to attest
                ctx.relations.insert(Relation::receive(l.comp, l.peer, {}, l.var));
                break;
            }
            // guard: the sender's defining computation has been extracted
            Relation guard =
                Relation::compute(l.peer, l.att_msg_var, l.att_eqs.front().second);
            if (ctx.relations.count(guard))
                ctx.relations.insert(
                    Relation::receive(l.comp, l.peer, {ext_detail::attest_of(l)}, l.var));
            break;
        }
        case Label::Kind::Comp:
            if (!l.rhs.is_fun("sign") && !l.rhs.is_fun("checksign"))
                ctx.relations.insert(Relation::compute(l.comp, l.var, l.rhs));
            break;
        case Label::Kind::Check:
            ctx.relations.insert(Relation::check(l.comp, l.lhs, l.rhs));
            break;
        case Label::Kind::VerAtt: {
            if (l.attester.empty() || l.att_eqs.empty()) break;
            if (!ctx.relations.count(Relation::trust(l.comp, l.attester))) break;
            Attest at = ext_detail::attest_of(l);
            bool have_receive = false;
            for (const auto& r : ctx.relations) {
                if (r.kind != Relation::Kind::Receive || r.comp != l.comp ||
                    r.peer != l.attester)
                    continue;
                for (const auto& a : r.atts)
                    if (a == at) have_receive = true;
            }
            if (have_receive) ctx.relations.insert(Relation::verif(l.comp, at));
            break;
        }
        case Label::Kind::Error:
        case Label::Kind::Tau:
            break;
    }
}

inline Architecture extract_architecture(const System& s, const ReductionConfig& rc = {}) {
    ExtractionContext ctx;
    ctx.relations = initial_trust(s);
    auto traces = all_traces(s, rc);
    // guards reference relations from other traces: iterate to a fixpoint
    std::size_t before;
    do {
        before = ctx.relations.size();
        for (const auto& tr : traces)
            for (const auto& l : tr) extract_label(l, ctx);
    } while (ctx.relations.size() != before);

    Architecture a;
    a.name = "Extracted";
    for (const Component* c : system_components(s)) a.components.push_back(c->id);
    a.relations = ctx.relations;
    a.theory = rc.theory;
    observe_system(s, a.theory);
    for (const auto& r : a.relations) {
        a.theory.observe(r.lhs);
        a.theory.observe(r.rhs);
    }
    return a;
}

}  // namespace picon
