#pragma once

// PAL: architecture relations, the concrete-syntax parser, event semantics,
// compatible traces, and the architecture state space.
//
// Indexed relations (`has M Xc[i]` under `range i in 1..r`) are instantiated
// at parse time; `iter(F, X)` unfolds to the left fold of F over the array's
// declared range.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "picon/facts.hpp"
#include "picon/formula.hpp"
#include "picon/lexer.hpp"
#include "picon/term.hpp"

namespace picon {

struct Attest {
    std::string attester;
    std::vector<std::pair<std::string, Term>> equations;  // var = term, kept sorted

    void normalize() { std::sort(equations.begin(), equations.end()); }
    auto key() const {
        std::string e;
        for (const auto& [x, t] : equations) e += x + "=" + to_string(t) + ";";
        return std::make_pair(attester, e);
    }
};

inline bool operator==(const Attest& a, const Attest& b) { return a.key() == b.key(); }
inline bool operator<(const Attest& a, const Attest& b) { return a.key() < b.key(); }

inline std::string to_string(const Attest& a) {
    std::string out = "attest " + a.attester + " { ";
    for (std::size_t i = 0; i < a.equations.size(); ++i) {
        if (i) out += ", ";
        out += a.equations[i].first + " = " + to_string(a.equations[i].second);
    }
    return out + " }";
}

struct Relation {
    enum class Kind { HasArch, Receive, Compute, Check, VerifAttest, Trust };
    Kind kind = Kind::HasArch;
    std::string comp;             // owner: receiver for Receive, truster for Trust
    std::string peer;             // sender / trustee
    std::string var;              // HasArch, Receive, Compute lhs
    Term lhs, rhs;                // Check sides; Compute rhs in `rhs`
    std::vector<Attest> atts;     // Receive attachments (possibly empty), VerifAttest payload

    static Relation has_arch(std::string c, std::string v) {
        Relation r;
        r.kind = Kind::HasArch;
        r.comp = std::move(c);
        r.var = std::move(v);
        return r;
    }
    static Relation receive(std::string c, std::string from, std::vector<Attest> as, std::string v) {
        Relation r;
        r.kind = Kind::Receive;
        r.comp = std::move(c);
        r.peer = std::move(from);
        r.atts = std::move(as);
        for (auto& a : r.atts) a.normalize();
        std::sort(r.atts.begin(), r.atts.end());
        r.var = std::move(v);
        return r;
    }
    static Relation compute(std::string c, std::string v, Term t) {
        Relation r;
        r.kind = Kind::Compute;
        r.comp = std::move(c);
        r.var = std::move(v);
        r.rhs = std::move(t);
        return r;
    }
    static Relation check(std::string c, Term l, Term t) {
        Relation r;
        r.kind = Kind::Check;
        r.comp = std::move(c);
        r.lhs = std::move(l);
        r.rhs = std::move(t);
        return r;
    }
    static Relation verif(std::string c, Attest a) {
        Relation r;
        r.kind = Kind::VerifAttest;
        r.comp = std::move(c);
        a.normalize();
        r.atts.push_back(std::move(a));
        return r;
    }
    static Relation trust(std::string truster, std::string trustee) {
        Relation r;
        r.kind = Kind::Trust;
        r.comp = std::move(truster);
        r.peer = std::move(trustee);
        return r;
    }

    auto key() const {
        std::string a;
        for (const auto& at : atts) {
            a += at.key().first + "|" + at.key().second + "||";
        }
        return std::make_tuple(static_cast<int>(kind), comp, peer, var, to_string(lhs),
                               to_string(rhs), a);
    }
};

inline bool operator==(const Relation& a, const Relation& b) { return a.key() == b.key(); }
inline bool operator!=(const Relation& a, const Relation& b) { return a.key() != b.key(); }
inline bool operator<(const Relation& a, const Relation& b) { return a.key() < b.key(); }

inline std::string to_string(const Relation& r) {
    switch (r.kind) {
        case Relation::Kind::HasArch: return "has " + r.comp + " " + r.var;
        case Relation::Kind::Receive: {
            std::string out = "receive " + r.comp + " from " + r.peer;
            for (const auto& a : r.atts) out += " " + to_string(a);
            return out + " var " + r.var;
        }
        case Relation::Kind::Compute:
            return "compute " + r.comp + " (" + r.var + " = " + to_string(r.rhs) + ")";
        case Relation::Kind::Check:
            return "check " + r.comp + " (" + to_string(r.lhs) + " = " + to_string(r.rhs) + ")";
        case Relation::Kind::VerifAttest:
            return "verifattest " + r.comp + " " + to_string(r.atts.at(0));
        case Relation::Kind::Trust: return "trust " + r.comp + " " + r.peer;
    }
    return "";
}

struct Architecture {
    std::string name;
    std::vector<std::string> components;
    std::set<Relation> relations;
    std::map<std::string, std::size_t> ranges;  // array variable -> size
    std::vector<std::pair<std::string, PropertyFormula>> properties;
    EquationalTheory theory = EquationalTheory::builtins();

    bool has_component(const std::string& c) const {
        return std::find(components.begin(), components.end(), c) != components.end();
    }

    // Expand an array variable to its instances; scalars map to themselves.
    std::vector<std::string> expand_var(const std::string& v) const {
        auto it = ranges.find(v);
        if (it == ranges.end()) return {v};
        std::vector<std::string> out;
        for (std::size_t i = 1; i <= it->second; ++i) out.push_back(v + "_" + std::to_string(i));
        return out;
    }
};

// ---------------------------------------------------------------------------
// Parser

namespace pal_detail {

// Template terms before instantiation: indexed variables are encoded as
// @idx(X, i) nodes and iterated applications as @iter(F, X).
inline Term parse_term(Lexer& lx) {
    if (lx.peek().kind == Token::Kind::Ident && lx.peek().text == "iter") {
        lx.next();
        lx.expect_punct("(");
        std::string fn;
        if (lx.peek().kind == Token::Kind::Ident) {
            fn = lx.next().text;
        } else if (lx.peek().kind == Token::Kind::Punct) {
            fn = lx.next().text;  // +, *, ...
        } else {
            lx.fail("expected function symbol in iter()");
        }
        lx.expect_punct(",");
        std::string arr = lx.expect_ident("array variable");
        lx.expect_punct(")");
        return Term::fun("@iter", {Term::var(fn), Term::var(arr)});
    }
    std::string id = lx.expect_ident("term");
    if (lx.accept_punct("[")) {
        std::string idx = lx.expect_ident("index variable");
        lx.expect_punct("]");
        return Term::fun("@idx", {Term::var(id), Term::var(idx)});
    }
    if (lx.accept_punct("(")) {
        std::vector<Term> args;
        if (!lx.accept_punct(")")) {
            args.push_back(parse_term(lx));
            while (lx.accept_punct(",")) args.push_back(parse_term(lx));
            lx.expect_punct(")");
        }
        return Term::fun(id, std::move(args));
    }
    return Term::var(id);
}

inline void collect_index_vars(const Term& t, std::set<std::string>& out) {
    if (t.is_fun("@idx")) {
        out.insert(t.args[1].id);
        return;
    }
    for (const auto& a : t.args) collect_index_vars(a, out);
}

struct RawAttest {
    std::string attester;
    std::vector<std::pair<Term, Term>> equations;
};

struct RawRelation {
    Relation::Kind kind;
    std::string comp, peer;
    Term var;  // @idx or plain var
    Term lhs, rhs;
    std::vector<RawAttest> atts;
    int line = 0, col = 0;
};

}  // namespace pal_detail

inline Architecture parse_architecture(
    const std::string& source,
    const std::map<std::string, std::size_t>& range_overrides = {}) {
    using namespace pal_detail;
    Lexer lx(source);
    Architecture arch;
    lx.expect_keyword("architecture");
    arch.name = lx.expect_ident("architecture name");
    lx.expect_punct("{");

    std::map<std::string, std::size_t> index_ranges;  // index var -> size
    std::map<std::string, std::string> array_index;   // array -> index var
    std::vector<RawRelation> raw;
    struct RawProperty {
        std::string name;
        std::vector<std::string> words;  // tokenized rhs
        Term lhs, rhs;                   // knows payload
    };
    std::vector<RawProperty> raw_props;

    auto expect_component = [&](const std::string& c, const Token& tok) {
        if (!arch.has_component(c))
            throw ParseError("undeclared component '" + c + "'", tok.line, tok.col);
    };

    while (!lx.accept_punct("}")) {
        Token at = lx.peek();
        if (lx.accept_ident("components")) {
            arch.components.push_back(lx.expect_ident("component id"));
            while (lx.accept_punct(",")) arch.components.push_back(lx.expect_ident("component id"));
            lx.expect_punct(";");
        } else if (lx.accept_ident("range")) {
            std::string idx = lx.expect_ident("index variable");
            lx.expect_keyword("in");
            Token lo = lx.next();
            lx.expect_punct("..");
            Token hi = lx.next();
            if (lo.kind != Token::Kind::Number || hi.kind != Token::Kind::Number)
                throw ParseError("range bounds must be numbers", lo.line, lo.col);
            if (std::stoul(lo.text) != 1)
                throw ParseError("ranges start at 1", lo.line, lo.col);
            index_ranges[idx] = static_cast<std::size_t>(std::stoul(hi.text));
            lx.expect_punct(";");
        } else if (lx.accept_ident("has")) {
            RawRelation r;
            r.kind = Relation::Kind::HasArch;
            r.comp = lx.expect_ident("component id");
            expect_component(r.comp, at);
            r.var = parse_term(lx);
            lx.expect_punct(";");
            raw.push_back(std::move(r));
        } else if (lx.accept_ident("compute")) {
            RawRelation r;
            r.kind = Relation::Kind::Compute;
            r.comp = lx.expect_ident("component id");
            expect_component(r.comp, at);
            lx.expect_punct("(");
            r.var = parse_term(lx);
            lx.expect_punct("=");
            r.rhs = parse_term(lx);
            lx.expect_punct(")");
            lx.expect_punct(";");
            raw.push_back(std::move(r));
        } else if (lx.accept_ident("receive")) {
            RawRelation r;
            r.kind = Relation::Kind::Receive;
            r.comp = lx.expect_ident("component id");
            expect_component(r.comp, at);
            lx.expect_keyword("from");
            r.peer = lx.expect_ident("component id");
            expect_component(r.peer, at);
            while (lx.peek().kind == Token::Kind::Ident && lx.peek().text == "attest") {
                lx.next();
                RawAttest a;
                a.attester = lx.expect_ident("component id");
                expect_component(a.attester, at);
                lx.expect_punct("{");
                do {
                    Term l = parse_term(lx);
                    lx.expect_punct("=");
                    Term t = parse_term(lx);
                    a.equations.emplace_back(std::move(l), std::move(t));
                } while (lx.accept_punct(","));
                lx.expect_punct("}");
                r.atts.push_back(std::move(a));
            }
            lx.expect_keyword("var");
            r.var = parse_term(lx);
            lx.expect_punct(";");
            raw.push_back(std::move(r));
        } else if (lx.accept_ident("verifattest")) {
            RawRelation r;
            r.kind = Relation::Kind::VerifAttest;
            r.comp = lx.expect_ident("component id");
            expect_component(r.comp, at);
            lx.expect_keyword("attest");
            RawAttest a;
            a.attester = lx.expect_ident("component id");
            expect_component(a.attester, at);
            lx.expect_punct("{");
            do {
                Term l = parse_term(lx);
                lx.expect_punct("=");
                Term t = parse_term(lx);
                a.equations.emplace_back(std::move(l), std::move(t));
            } while (lx.accept_punct(","));
            lx.expect_punct("}");
            r.atts.push_back(std::move(a));
            lx.expect_punct(";");
            raw.push_back(std::move(r));
        } else if (lx.accept_ident("check")) {
            RawRelation r;
            r.kind = Relation::Kind::Check;
            r.comp = lx.expect_ident("component id");
            expect_component(r.comp, at);
            lx.expect_punct("(");
            r.lhs = parse_term(lx);
            lx.expect_punct("=");
            r.rhs = parse_term(lx);
            lx.expect_punct(")");
            lx.expect_punct(";");
            raw.push_back(std::move(r));
        } else if (lx.accept_ident("trust")) {
            RawRelation r;
            r.kind = Relation::Kind::Trust;
            r.comp = lx.expect_ident("component id");
            expect_component(r.comp, at);
            r.peer = lx.expect_ident("component id");
            expect_component(r.peer, at);
            lx.expect_punct(";");
            raw.push_back(std::move(r));
        } else if (lx.accept_ident("property")) {
            RawProperty p;
            p.name = lx.expect_ident("property name");
            lx.expect_punct("=");
            std::string head = lx.expect_ident("property form");
            p.words.push_back(head);
            if (head == "hasall" || head == "hasnone") {
                p.words.push_back(lx.expect_ident("component id"));
                p.words.push_back(lx.expect_ident("variable"));
            } else if (head == "knows") {
                p.words.push_back(lx.expect_ident("component id"));
                lx.expect_punct("(");
                p.lhs = parse_term(lx);
                lx.expect_punct("=");
                p.rhs = parse_term(lx);
                lx.expect_punct(")");
            } else {
                // conjunction of previously declared properties
                p.words.push_back(lx.expect_ident("property name"));  // second operand after 'and'
                // head itself was the first operand name; expect 'and'
                if (p.words[1] != "and") lx.fail("expected 'and' in property conjunction");
                p.words[1] = head;                       // first operand
                p.words[0] = "and";
                p.words.push_back(lx.expect_ident("property name"));
            }
            lx.expect_punct(";");
            raw_props.push_back(std::move(p));
        } else {
            lx.fail("unexpected token '" + lx.peek().text + "' in architecture body");
        }
    }

    // Resolve array ranges from subscript usage.
    auto note_arrays = [&](const Term& t, auto&& self) -> void {
        if (t.is_fun("@idx")) {
            array_index[t.args[0].id] = t.args[1].id;
            return;
        }
        for (const auto& a : t.args) self(a, self);
    };
    for (const auto& r : raw) {
        note_arrays(r.var, note_arrays);
        note_arrays(r.lhs, note_arrays);
        note_arrays(r.rhs, note_arrays);
        for (const auto& a : r.atts)
            for (const auto& [l, t] : a.equations) {
                note_arrays(l, note_arrays);
                note_arrays(t, note_arrays);
            }
    }
    for (auto& [idx, size] : index_ranges) {
        auto ov = range_overrides.find(idx);
        if (ov != range_overrides.end()) size = ov->second;
    }
    for (const auto& [arr, idx] : array_index) {
        auto it = index_ranges.find(idx);
        if (it == index_ranges.end())
            throw Error("index variable '" + idx + "' has no declared range");
        arch.ranges[arr] = it->second;
        auto ov = range_overrides.find(arr);
        if (ov != range_overrides.end()) arch.ranges[arr] = ov->second;
    }
    // iter over arrays that are never subscripted default to range 1
    auto note_iter = [&](const Term& t, auto&& self) -> void {
        if (t.is_fun("@iter") && !arch.ranges.count(t.args[1].id)) {
            std::size_t n = 1;
            auto ov = range_overrides.find(t.args[1].id);
            if (ov != range_overrides.end()) n = ov->second;
            arch.ranges[t.args[1].id] = n;
        }
        for (const auto& a : t.args) self(a, self);
    };
    for (const auto& r : raw) note_iter(r.rhs, note_iter);

    // Instantiate templates for each index value.
    auto instantiate = [&](const Term& t, std::size_t i, auto&& self) -> Term {
        if (t.is_fun("@idx")) return Term::var(t.args[0].id + "_" + std::to_string(i));
        if (t.is_fun("@iter")) {
            const std::string& fn = t.args[0].id;
            const std::string& arr = t.args[1].id;
            std::size_t n = arch.ranges.at(arr);
            Term acc = Term::var(arr + "_1");
            for (std::size_t k = 2; k <= n; ++k)
                acc = Term::fun(fn, {acc, Term::var(arr + "_" + std::to_string(k))});
            return acc;
        }
        Term out = t;
        for (auto& a : out.args) a = self(a, i, self);
        return out;
    };

    for (const auto& r : raw) {
        std::set<std::string> ivars;
        collect_index_vars(r.var, ivars);
        collect_index_vars(r.lhs, ivars);
        collect_index_vars(r.rhs, ivars);
        for (const auto& a : r.atts)
            for (const auto& [l, t] : a.equations) {
                collect_index_vars(l, ivars);
                collect_index_vars(t, ivars);
            }
        std::size_t n = 1;
        for (const auto& iv : ivars) {
            auto it = index_ranges.find(iv);
            if (it == index_ranges.end())
                throw Error("index variable '" + iv + "' has no declared range");
            n = std::max(n, it->second);
        }
        if (ivars.empty()) n = 1;
        for (std::size_t i = 1; i <= n; ++i) {
            Relation rel;
            rel.kind = r.kind;
            rel.comp = r.comp;
            rel.peer = r.peer;
            bool has_var = !(r.var.kind == TermKind::Name && r.var.id.empty());
            if (has_var) rel.var = instantiate(r.var, i, instantiate).id;
            rel.lhs = instantiate(r.lhs, i, instantiate);
            rel.rhs = instantiate(r.rhs, i, instantiate);
            for (const auto& a : r.atts) {
                Attest at;
                at.attester = a.attester;
                for (const auto& [l, t] : a.equations)
                    at.equations.emplace_back(instantiate(l, i, instantiate).id,
                                              instantiate(t, i, instantiate));
                at.normalize();
                rel.atts.push_back(std::move(at));
            }
            std::sort(rel.atts.begin(), rel.atts.end());
            arch.theory.observe(rel.lhs);
            arch.theory.observe(rel.rhs);
            arch.relations.insert(std::move(rel));
        }
    }

    // Properties (after relations so array expansion knows the ranges).
    std::map<std::string, PropertyFormula> named;
    for (const auto& p : raw_props) {
        PropertyFormula f;
        if (p.words[0] == "hasall") {
            f = PropertyFormula::has_all(p.words[1], p.words[2]);
        } else if (p.words[0] == "hasnone") {
            f = PropertyFormula::has_none(p.words[1], p.words[2]);
        } else if (p.words[0] == "knows") {
            auto strip = [&](const Term& t) {
                // property terms use plain identifiers; indexed forms were
                // already rejected by the grammar here
                return t;
            };
            f = PropertyFormula::knows(p.words[1], strip(p.lhs), strip(p.rhs));
        } else {  // and
            auto a = named.find(p.words[1]);
            auto b = named.find(p.words[2]);
            if (a == named.end() || b == named.end())
                throw Error("property conjunction references unknown property");
            f = PropertyFormula::conj(a->second, b->second);
        }
        if ((f.kind == PropertyFormula::Kind::HasAll || f.kind == PropertyFormula::Kind::HasNone ||
             f.kind == PropertyFormula::Kind::Knows) &&
            !arch.has_component(f.comp))
            throw Error("property references undeclared component '" + f.comp + "'");
        named[p.name] = f;
        arch.properties.emplace_back(p.name, std::move(f));
    }
    return arch;
}

inline std::string render_architecture(const Architecture& a) {
    std::string out = "architecture " + (a.name.empty() ? std::string("A") : a.name) + " {\n";
    out += "  components ";
    for (std::size_t i = 0; i < a.components.size(); ++i) {
        if (i) out += ", ";
        out += a.components[i];
    }
    out += ";\n";
    for (const auto& r : a.relations) out += "  " + to_string(r) + ";\n";
    for (const auto& [name, f] : a.properties) out += "  property " + name + " = " + to_string(f) + ";\n";
    out += "}\n";
    return out;
}

// ---------------------------------------------------------------------------
// Event semantics

struct ArchEvent {
    Relation relation;   // the instantiated relation this event fires
    Term value;          // runtime value assigned (has/receive/compute)
};

inline std::string to_string(const ArchEvent& e) { return to_string(e.relation); }

struct ArchCompState {
    std::map<std::string, Term> values;                 // sigma^v, absent = undefined
    std::set<std::pair<Term, Term>> props;              // sigma^pk equations
    std::set<std::string> trusted;                      // Trust facts of this component
    auto key() const { return std::tie(values, props, trusted); }
};

struct ArchGlobalState {
    std::map<std::string, ArchCompState> comps;
    std::map<Term, std::set<std::string>> provenance;   // value -> variables it was bound to

    std::string serialize() const {
        std::string s;
        for (const auto& [c, st] : comps) {
            s += c + "{";
            for (const auto& [v, t] : st.values) s += v + ":" + to_string(t) + ",";
            s += "|";
            for (const auto& [a, b] : st.props) s += to_string(a) + "=" + to_string(b) + ",";
            s += "|";
            for (const auto& t : st.trusted) s += t + ",";
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

inline bool operator<(const ArchGlobalState& a, const ArchGlobalState& b) {
    return a.serialize() < b.serialize();
}
inline bool operator==(const ArchGlobalState& a, const ArchGlobalState& b) {
    return a.serialize() == b.serialize();
}

inline Term arch_seed(const std::string& var) { return Term::name("$" + var); }

inline std::optional<Term> arch_eval(const Term& t, const ArchCompState& st) {
    if (t.kind == TermKind::Var) {
        auto it = st.values.find(t.id);
        if (it == st.values.end()) return std::nullopt;
        return it->second;
    }
    if (t.kind == TermKind::Fun) {
        Term out = t;
        for (auto& a : out.args) {
            auto v = arch_eval(a, st);
            if (!v) return std::nullopt;
            a = *v;
        }
        return out;
    }
    return t;  // names/seeds evaluate to themselves
}

inline ArchGlobalState arch_initial_state(const Architecture& a) {
    ArchGlobalState g;
    for (const auto& c : a.components) g.comps[c] = {};
    for (const auto& r : a.relations)
        if (r.kind == Relation::Kind::Trust) g.comps[r.comp].trusted.insert(r.peer);
    return g;
}

struct UndefinedOperand : Error {
    using Error::Error;
};

// S_E: the effect of one event on the global state. The compute clause follows
// the published definition; the others mirror their relations.
inline ArchGlobalState apply_event(const ArchEvent& e, const ArchGlobalState& g,
                                   const EquationalTheory& E, UpdateFact* fact_out = nullptr) {
    ArchGlobalState out = g;
    const Relation& r = e.relation;
    auto& me = out.comps.at(r.comp);
    switch (r.kind) {
        case Relation::Kind::HasArch: {
            Term v = e.value.id.empty() ? arch_seed(r.var) : e.value;
            me.values[r.var] = v;
            out.provenance[v].insert(r.var);
            if (fact_out) *fact_out = {UpdateFact::Kind::Has, r.comp, "", r.var, {}, {}, v};
            break;
        }
        case Relation::Kind::Receive: {
            auto& sender = out.comps.at(r.peer);
            auto it = sender.values.find(r.var);
            if (it == sender.values.end())
                throw UndefinedOperand("receive of undefined variable '" + r.var + "'");
            me.values[r.var] = it->second;
            out.provenance[it->second].insert(r.var);
            if (fact_out) {
                std::vector<std::pair<Term, Term>> eqs;
                for (const auto& at : r.atts)
                    for (const auto& [x, t] : at.equations) eqs.emplace_back(Term::var(x), t);
                *fact_out = {r.atts.empty() ? UpdateFact::Kind::Receive : UpdateFact::Kind::ReceiveAtt,
                             r.comp, r.peer, r.var, {}, std::move(eqs), it->second};
            }
            break;
        }
        case Relation::Kind::Compute: {
            auto v = arch_eval(r.rhs, me);
            if (!v) throw UndefinedOperand("compute of '" + r.var + "' over undefined operands");
            me.values[r.var] = *v;
            me.props.insert({Term::var(r.var), r.rhs});
            out.provenance[*v].insert(r.var);
            if (fact_out)
                *fact_out = {UpdateFact::Kind::Compute, r.comp, "", r.var, r.rhs, {}, *v};
            break;
        }
        case Relation::Kind::Check: {
            auto l = arch_eval(r.lhs, me);
            auto t = arch_eval(r.rhs, me);
            if (!l || !t) throw UndefinedOperand("check over undefined operands");
            if (equal_in_E(*l, *t, E)) {
                me.props.insert({r.lhs, r.rhs});
                if (fact_out)
                    *fact_out = {UpdateFact::Kind::CheckEq, r.comp, "", "", {}, {{r.lhs, r.rhs}}, {}};
            }
            break;
        }
        case Relation::Kind::VerifAttest: {
            const Attest& at = r.atts.at(0);
            if (me.trusted.count(at.attester)) {
                std::vector<std::pair<Term, Term>> eqs;
                for (const auto& [x, t] : at.equations) {
                    me.props.insert({Term::var(x), t});
                    eqs.emplace_back(Term::var(x), t);
                }
                if (fact_out)
                    *fact_out = {UpdateFact::Kind::VerifEq, r.comp, at.attester, "", {}, std::move(eqs), {}};
            }
            break;
        }
        case Relation::Kind::Trust:
            break;  // trust never fires as an event
    }
    return out;
}

struct ExploreConfig {
    std::size_t max_nodes = 100000;
    std::size_t rewrite_budget = kDefaultRewriteBudget;
    std::size_t deduction_depth = kDefaultDeductionDepth;
};

struct ArchSemantics {
    std::vector<ArchGlobalState> states;     // all reachable states (prefix-closed)
    std::vector<ArchGlobalState> endpoints;  // states with no enabled event
    std::set<UpdateFact> facts;
};

namespace pal_detail {

inline bool event_enabled(const Relation& r, const ArchGlobalState& g) {
    const auto& me = g.comps.at(r.comp);
    auto defined = [&](const Term& t, const ArchCompState& st) {
        std::set<std::string> vs;
        collect_vars(t, vs);
        for (const auto& v : vs)
            if (!st.values.count(v)) return false;
        return true;
    };
    switch (r.kind) {
        case Relation::Kind::HasArch: return true;
        case Relation::Kind::Receive: return g.comps.at(r.peer).values.count(r.var) != 0;
        case Relation::Kind::Compute: return defined(r.rhs, me);
        case Relation::Kind::Check: return defined(r.lhs, me) && defined(r.rhs, me);
        case Relation::Kind::VerifAttest: {
            for (const auto& [x, t] : r.atts.at(0).equations)
                if (!me.values.count(x)) return false;
            return true;
        }
        case Relation::Kind::Trust: return false;
    }
    return false;
}

}  // namespace pal_detail

// Explore the full event-interleaving space: each relation instance fires at
// most once per trace, and an event is enabled only once its operands are
// defined. Visited (fired-set, state) pairs are shared across orderings.
inline ArchSemantics explore_architecture(const Architecture& a, const ExploreConfig& cfg = {}) {
    std::vector<Relation> fireable(a.relations.begin(), a.relations.end());
    ArchSemantics out;
    std::set<std::string> seen_states;
    std::set<std::string> visited;
    std::size_t nodes = 0;

    struct Node {
        std::vector<bool> fired;
        ArchGlobalState state;
    };
    std::vector<Node> stack;
    stack.push_back({std::vector<bool>(fireable.size(), false), arch_initial_state(a)});

    while (!stack.empty()) {
        Node n = std::move(stack.back());
        stack.pop_back();
        std::string key;
        for (bool b : n.fired) key += b ? '1' : '0';
        key += "#" + n.state.serialize();
        if (!visited.insert(key).second) continue;
        if (++nodes > cfg.max_nodes)
            throw StateSpaceBudgetExceeded("architecture state-space budget exhausted");
        if (seen_states.insert(n.state.serialize()).second) out.states.push_back(n.state);

        bool any = false;
        for (std::size_t i = 0; i < fireable.size(); ++i) {
            if (n.fired[i] || fireable[i].kind == Relation::Kind::Trust) continue;
            if (!pal_detail::event_enabled(fireable[i], n.state)) continue;
            any = true;
            ArchEvent ev{fireable[i], {}};
            UpdateFact fact;
            fact.kind = UpdateFact::Kind::Has;
            fact.comp = "";
            ArchGlobalState next = apply_event(ev, n.state, a.theory, &fact);
            if (!fact.comp.empty()) out.facts.insert(fact);
            Node m{n.fired, std::move(next)};
            m.fired[i] = true;
            stack.push_back(std::move(m));
        }
        if (!any) out.endpoints.push_back(n.state);
    }
    // endpoints may repeat across fired-sets with equal states
    std::sort(out.endpoints.begin(), out.endpoints.end());
    out.endpoints.erase(std::unique(out.endpoints.begin(), out.endpoints.end()),
                        out.endpoints.end());
    return out;
}

// T(A): maximal compatible event traces.
inline std::vector<std::vector<ArchEvent>> compatible_traces(const Architecture& a,
                                                             const ExploreConfig& cfg = {}) {
    std::vector<Relation> fireable(a.relations.begin(), a.relations.end());
    std::vector<std::vector<ArchEvent>> out;
    std::size_t nodes = 0;

    struct Frame {
        std::vector<bool> fired;
        ArchGlobalState state;
        std::vector<ArchEvent> trace;
    };
    std::vector<Frame> stack;
    stack.push_back({std::vector<bool>(fireable.size(), false), arch_initial_state(a), {}});
    while (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (++nodes > cfg.max_nodes)
            throw StateSpaceBudgetExceeded("architecture trace budget exhausted");
        bool any = false;
        for (std::size_t i = 0; i < fireable.size(); ++i) {
            if (f.fired[i] || fireable[i].kind == Relation::Kind::Trust) continue;
            if (!pal_detail::event_enabled(fireable[i], f.state)) continue;
            any = true;
            ArchEvent ev{fireable[i], {}};
            Frame g{f.fired, apply_event(ev, f.state, a.theory), f.trace};
            g.fired[i] = true;
            g.trace.push_back(ev);
            stack.push_back(std::move(g));
        }
        if (!any) out.push_back(std::move(f.trace));
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        auto repr = [](const std::vector<ArchEvent>& tr) {
            std::string s;
            for (const auto& e : tr) s += to_string(e) + "\n";
            return s;
        };
        return repr(x) < repr(y);
    });
    return out;
}

// S(A): the set of reachable global states.
inline std::vector<ArchGlobalState> arch_semantics(const Architecture& a,
                                                   const ExploreConfig& cfg = {}) {
    return explore_architecture(a, cfg).states;
}

}  // namespace picon
