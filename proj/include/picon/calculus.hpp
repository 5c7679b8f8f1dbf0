#pragma once

// Protocol AST and parser: processes, components with their trust sets, and
// systems composed under name restrictions.
//
// Identifier universes are inferred from position: binders are variables,
// `new`-bound identifiers are restricted names, identifiers in channel
// position are channels, and every other free identifier is a name. One
// identifier may not live in two universes.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "picon/lexer.hpp"
#include "picon/pal.hpp"
#include "picon/term.hpp"

namespace picon {

struct Process {
    enum class Kind { Nil, Send, SendAtt, Recv, RecvAtt, Par, Restrict, Let, If };
    Kind kind = Kind::Nil;
    Term channel;          // Send / SendAtt / Recv / RecvAtt
    Term payload;          // Send payload, SendAtt message
    Term payload2;         // SendAtt signature
    std::string binder;    // Recv / Let binder, RecvAtt message binder, Restrict name
    std::string binder2;   // RecvAtt signature binder
    Term lhs, rhs;         // If operands; Let rhs lives in `rhs`
    bool fresh = false;    // Let written with the `fresh` keyword
    std::vector<Process> kids;  // continuations: Par holds two, Nil none

    static Process nil() { return {}; }
};

inline bool operator==(const Process& a, const Process& b);
inline bool process_eq(const Process& a, const Process& b) {
    if (a.kind != b.kind || a.channel != b.channel || a.payload != b.payload ||
        a.payload2 != b.payload2 || a.binder != b.binder || a.binder2 != b.binder2 ||
        a.lhs != b.lhs || a.rhs != b.rhs || a.fresh != b.fresh ||
        a.kids.size() != b.kids.size())
        return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!(a.kids[i] == b.kids[i])) return false;
    return true;
}
inline bool operator==(const Process& a, const Process& b) { return process_eq(a, b); }
inline bool operator!=(const Process& a, const Process& b) { return !(a == b); }

struct Component {
    std::string id;
    std::set<std::string> trusts;
    Process body;
};

inline bool operator==(const Component& a, const Component& b) {
    return a.id == b.id && a.trusts == b.trusts && a.body == b.body;
}

struct System {
    enum class Kind { Empty, Single, Restrict, Par };
    Kind kind = Kind::Empty;
    std::string name;      // Restrict
    Component comp;        // Single
    std::vector<System> kids;

    static System empty() { return {}; }
    static System single(Component c) {
        System s;
        s.kind = Kind::Single;
        s.comp = std::move(c);
        return s;
    }
    static System restrict_name(std::string n, System body) {
        System s;
        s.kind = Kind::Restrict;
        s.name = std::move(n);
        s.kids.push_back(std::move(body));
        return s;
    }
    static System par(System l, System r) {
        System s;
        s.kind = Kind::Par;
        s.kids.push_back(std::move(l));
        s.kids.push_back(std::move(r));
        return s;
    }
};

inline bool operator==(const System& a, const System& b) {
    if (a.kind != b.kind || a.name != b.name || a.kids.size() != b.kids.size()) return false;
    if (a.kind == System::Kind::Single && !(a.comp == b.comp)) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!(a.kids[i] == b.kids[i])) return false;
    return true;
}
inline bool operator!=(const System& a, const System& b) { return !(a == b); }

inline void collect_components(const System& s, std::vector<const Component*>& out) {
    if (s.kind == System::Kind::Single) out.push_back(&s.comp);
    for (const auto& k : s.kids) collect_components(k, out);
}

inline std::vector<const Component*> system_components(const System& s) {
    std::vector<const Component*> out;
    collect_components(s, out);
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace calc_detail {

// Raw terms: every identifier parsed as a Name; resolved in a second pass.
inline Term parse_raw_term(Lexer& lx) {
    std::string id = lx.expect_ident("term");
    if (lx.accept_punct("(")) {
        std::vector<Term> args;
        if (!lx.accept_punct(")")) {
            args.push_back(parse_raw_term(lx));
            while (lx.accept_punct(",")) args.push_back(parse_raw_term(lx));
            lx.expect_punct(")");
        }
        return Term::fun(id, std::move(args));
    }
    return Term::name(id);
}

enum class Universe { NameU, VarU, ChannelU, CompU };

struct Scope {
    std::map<std::string, std::string> vars;         // binder -> resolved name
    std::map<std::string, std::string> bound_names;  // `new` name -> resolved name
};

struct Resolver {
    std::map<std::string, Universe>& universe;  // global, shared by all components
    std::set<std::string> system_bound;         // names bound on the system line
    std::set<std::string> all_new_names;        // every resolved `new` name, globally unique

    void classify(const std::string& id, Universe u, const char* what) {
        auto [it, inserted] = universe.emplace(id, u);
        if (!inserted && it->second != u)
            throw Error("identifier '" + id + "' used both as " + what +
                        " and in another role");
    }

    Term resolve(const Term& raw, const Scope& scope) {
        if (raw.kind == TermKind::Fun) {
            Term out = raw;
            for (auto& a : out.args) a = resolve(a, scope);
            return out;
        }
        auto it = scope.vars.find(raw.id);
        if (it != scope.vars.end()) {
            classify(raw.id, Universe::VarU, "a variable");
            return Term::var(it->second);
        }
        classify(raw.id, Universe::NameU, "a name");
        auto bn = scope.bound_names.find(raw.id);
        if (bn != scope.bound_names.end()) return Term::name(bn->second, true);
        return Term::name(raw.id, system_bound.count(raw.id) != 0);
    }
};

inline Process parse_process(Lexer& lx, Resolver& rs, Scope scope,
                             std::set<std::string>& used_binders) {
    if (lx.peek().kind == Token::Kind::Punct && lx.peek().text == "!")
        lx.fail("replication ('!') is not supported");

    auto bind = [&](const std::string& orig) {
        rs.classify(orig, Universe::VarU, "a variable");
        std::string fresh_name = orig;
        while (!used_binders.insert(fresh_name).second) fresh_name += "'";
        scope.vars[orig] = fresh_name;
        return fresh_name;
    };

    if (lx.accept_ident("nil")) return Process::nil();

    if (lx.peek().kind == Token::Kind::Ident &&
        (lx.peek().text == "let" || lx.peek().text == "fresh")) {
        bool is_fresh = lx.next().text == "fresh";
        std::string x = lx.expect_ident("binder");
        lx.expect_punct("=");
        Term raw = parse_raw_term(lx);
        Term rhs = rs.resolve(raw, scope);  // binder not yet in scope: no self-reference
        if (is_fresh && !rhs.is_name())
            lx.fail("'fresh' requires a plain name on the right-hand side");
        Process p;
        p.kind = Process::Kind::Let;
        p.fresh = is_fresh;
        p.binder = bind(x);
        p.rhs = std::move(rhs);
        lx.expect_keyword("in");
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_ident("new")) {
        std::string n = lx.expect_ident("name");
        rs.classify(n, Universe::NameU, "a name");
        std::string unique = n;
        while (!rs.all_new_names.insert(unique).second) unique += "'";
        scope.bound_names[n] = unique;
        lx.expect_punct(".");
        Process p;
        p.kind = Process::Kind::Restrict;
        p.binder = unique;
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_ident("send")) {
        std::string c = lx.expect_ident("channel");
        rs.classify(c, Universe::ChannelU, "a channel");
        Process p;
        p.kind = Process::Kind::Send;
        p.channel = Term::channel(c);
        p.payload = rs.resolve(parse_raw_term(lx), scope);
        lx.expect_punct(".");
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_ident("sendatt")) {
        std::string c = lx.expect_ident("channel");
        rs.classify(c, Universe::ChannelU, "a channel");
        Process p;
        p.kind = Process::Kind::SendAtt;
        p.channel = Term::channel(c);
        lx.expect_punct("(");
        p.payload = rs.resolve(parse_raw_term(lx), scope);
        lx.expect_punct(",");
        p.payload2 = rs.resolve(parse_raw_term(lx), scope);
        lx.expect_punct(")");
        lx.expect_punct(".");
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_ident("recv")) {
        std::string c = lx.expect_ident("channel");
        rs.classify(c, Universe::ChannelU, "a channel");
        Process p;
        p.kind = Process::Kind::Recv;
        p.channel = Term::channel(c);
        lx.expect_punct("(");
        p.binder = bind(lx.expect_ident("binder"));
        lx.expect_punct(")");
        lx.expect_punct(".");
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_ident("recvatt")) {
        std::string c = lx.expect_ident("channel");
        rs.classify(c, Universe::ChannelU, "a channel");
        Process p;
        p.kind = Process::Kind::RecvAtt;
        p.channel = Term::channel(c);
        lx.expect_punct("(");
        p.binder = bind(lx.expect_ident("message binder"));
        lx.expect_punct(",");
        p.binder2 = bind(lx.expect_ident("signature binder"));
        lx.expect_punct(")");
        lx.expect_punct(".");
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_ident("if")) {
        Process p;
        p.kind = Process::Kind::If;
        p.lhs = rs.resolve(parse_raw_term(lx), scope);
        lx.expect_punct("=");
        p.rhs = rs.resolve(parse_raw_term(lx), scope);
        lx.expect_keyword("then");
        p.kids.push_back(parse_process(lx, rs, scope, used_binders));
        return p;
    }
    if (lx.accept_punct("(")) {
        Process l = parse_process(lx, rs, scope, used_binders);
        lx.expect_punct("|");
        Process r = parse_process(lx, rs, scope, used_binders);
        lx.expect_punct(")");
        Process p;
        p.kind = Process::Kind::Par;
        p.kids.push_back(std::move(l));
        p.kids.push_back(std::move(r));
        return p;
    }
    lx.fail("expected a process, got '" + lx.peek().text + "'");
}

inline System parse_system_expr(Lexer& lx, const std::map<std::string, Component>& defs,
                                Resolver& rs, std::set<std::string>& used) {
    if (lx.accept_ident("empty")) return System::empty();
    if (lx.accept_ident("new")) {
        std::string n = lx.expect_ident("name");
        rs.classify(n, Universe::NameU, "a name");
        rs.system_bound.insert(n);
        lx.expect_punct(".");
        return System::restrict_name(n, parse_system_expr(lx, defs, rs, used));
    }
    if (lx.accept_punct("(")) {
        System l = parse_system_expr(lx, defs, rs, used);
        System s = std::move(l);
        while (lx.accept_punct("|")) {
            System r = parse_system_expr(lx, defs, rs, used);
            s = System::par(std::move(s), std::move(r));
        }
        lx.expect_punct(")");
        return s;
    }
    std::string id = lx.expect_ident("component reference");
    auto it = defs.find(id);
    if (it == defs.end()) throw Error("system references undefined component '" + id + "'");
    if (!used.insert(id).second) throw Error("component '" + id + "' composed twice");
    return System::single(it->second);
}

}  // namespace calc_detail

// A protocol file: `component` definitions, one `system` line, then optional
// `property` lines. Restricted names declared on the system line scope over
// the component bodies, so they are gathered before the bodies are resolved.
inline System parse_system(const std::string& source,
                           std::vector<std::pair<std::string, PropertyFormula>>* props_out =
                               nullptr) {
    using namespace calc_detail;
    std::map<std::string, Universe> universe;
    Resolver rs{universe, {}};

    // Pre-scan `new` binders on the system line so that component bodies see
    // them as bound names.
    {
        Lexer pre(source);
        while (!pre.at_end()) {
            if (pre.accept_ident("system")) {
                pre.expect_ident("system name");
                pre.expect_punct("=");
                while (pre.accept_ident("new")) {
                    std::string n = pre.expect_ident("name");
                    rs.system_bound.insert(n);
                    rs.all_new_names.insert(n);
                    pre.expect_punct(".");
                }
                break;
            }
            pre.next();
        }
    }

    Lexer lx(source);
    std::map<std::string, Component> defs;
    while (lx.peek().kind == Token::Kind::Ident && lx.peek().text == "component") {
        Token at = lx.peek();
        lx.next();
        Component c;
        c.id = lx.expect_ident("component id");
        rs.classify(c.id, Universe::CompU, "a component id");
        if (defs.count(c.id))
            throw ParseError("duplicate component id '" + c.id + "'", at.line, at.col);
        lx.expect_keyword("trusts");
        lx.expect_punct("{");
        if (!lx.accept_punct("}")) {
            do {
                std::string t = lx.expect_ident("component id");
                if (t == c.id)
                    throw ParseError("component '" + c.id + "' cannot trust itself", at.line,
                                     at.col);
                c.trusts.insert(t);
            } while (lx.accept_punct(","));
            lx.expect_punct("}");
        }
        lx.expect_punct("{");
        std::set<std::string> used_binders;
        c.body = parse_process(lx, rs, {}, used_binders);
        lx.expect_punct("}");
        defs.emplace(c.id, std::move(c));
    }

    lx.expect_keyword("system");
    lx.expect_ident("system name");
    lx.expect_punct("=");
    std::set<std::string> used;
    System s = parse_system_expr(lx, defs, rs, used);

    std::map<std::string, PropertyFormula> named;
    while (lx.accept_ident("property")) {
        std::string pname = lx.expect_ident("property name");
        lx.expect_punct("=");
        std::string head = lx.expect_ident("property form");
        PropertyFormula f;
        if (head == "hasall" || head == "hasnone") {
            std::string comp = lx.expect_ident("component id");
            std::string var = lx.expect_ident("variable");
            f = head == "hasall" ? PropertyFormula::has_all(comp, var)
                                 : PropertyFormula::has_none(comp, var);
        } else if (head == "knows") {
            std::string comp = lx.expect_ident("component id");
            lx.expect_punct("(");
            Term l = parse_raw_term(lx);
            lx.expect_punct("=");
            Term r = parse_raw_term(lx);
            lx.expect_punct(")");
            // identifiers already classified as binders become variables
            auto fix = [&](Term& t, auto&& self) -> void {
                if (t.is_name() && universe.count(t.id) && universe.at(t.id) == Universe::VarU)
                    t = Term::var(t.id);
                for (auto& a : t.args) self(a, self);
            };
            fix(l, fix);
            fix(r, fix);
            f = PropertyFormula::knows(comp, std::move(l), std::move(r));
        } else {  // conjunction of two earlier properties
            lx.expect_keyword("and");
            std::string second = lx.expect_ident("property name");
            auto a = named.find(head);
            auto b = named.find(second);
            if (a == named.end() || b == named.end())
                throw Error("property conjunction references unknown property");
            f = PropertyFormula::conj(a->second, b->second);
        }
        lx.expect_punct(";");
        named[pname] = f;
        if (props_out) props_out->emplace_back(pname, std::move(f));
    }
    if (!lx.at_end()) lx.fail("unexpected trailing input after system definition");

    // trust sets must reference declared components
    for (const auto& [id, c] : defs)
        for (const auto& t : c.trusts)
            if (!defs.count(t))
                throw Error("component '" + id + "' trusts undeclared component '" + t + "'");
    return s;
}

// ---------------------------------------------------------------------------
// Pretty-printing (inverse of the parser, used by the round-trip tests)

inline std::string render_process(const Process& p) {
    switch (p.kind) {
        case Process::Kind::Nil: return "nil";
        case Process::Kind::Let:
            return std::string(p.fresh ? "fresh " : "let ") + p.binder + " = " + to_string(p.rhs) +
                   " in " + render_process(p.kids[0]);
        case Process::Kind::Restrict:
            return "new " + p.binder + " . " + render_process(p.kids[0]);
        case Process::Kind::Send:
            return "send " + p.channel.id + " " + to_string(p.payload) + " . " +
                   render_process(p.kids[0]);
        case Process::Kind::SendAtt:
            return "sendatt " + p.channel.id + " (" + to_string(p.payload) + ", " +
                   to_string(p.payload2) + ") . " + render_process(p.kids[0]);
        case Process::Kind::Recv:
            return "recv " + p.channel.id + " (" + p.binder + ") . " + render_process(p.kids[0]);
        case Process::Kind::RecvAtt:
            return "recvatt " + p.channel.id + " (" + p.binder + ", " + p.binder2 + ") . " +
                   render_process(p.kids[0]);
        case Process::Kind::If:
            return "if " + to_string(p.lhs) + " = " + to_string(p.rhs) + " then " +
                   render_process(p.kids[0]);
        case Process::Kind::Par:
            return "( " + render_process(p.kids[0]) + " | " + render_process(p.kids[1]) + " )";
    }
    return "nil";
}

namespace calc_detail {

inline void render_system_expr(const System& s, std::string& out) {
    switch (s.kind) {
        case System::Kind::Empty: out += "empty"; break;
        case System::Kind::Single: out += s.comp.id; break;
        case System::Kind::Restrict:
            out += "new " + s.name + " . ";
            render_system_expr(s.kids[0], out);
            break;
        case System::Kind::Par:
            out += "( ";
            render_system_expr(s.kids[0], out);
            out += " | ";
            render_system_expr(s.kids[1], out);
            out += " )";
            break;
    }
}

}  // namespace calc_detail

inline std::string render_system(const System& s) {
    std::string out;
    for (const Component* c : system_components(s)) {
        out += "component " + c->id + " trusts { ";
        bool first = true;
        for (const auto& t : c->trusts) {
            if (!first) out += ", ";
            first = false;
            out += t;
        }
        out += first ? "} {\n  " : " } {\n  ";
        out += render_process(c->body);
        out += "\n}\n\n";
    }
    out += "system S = ";
    calc_detail::render_system_expr(s, out);
    out += "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Queries

namespace calc_detail {

inline void free_names_term(const Term& t, std::set<std::string>& out) {
    if (t.is_name() && !t.bound && !t.id.empty()) out.insert(t.id);
    for (const auto& a : t.args) free_names_term(a, out);
}

inline void free_names_process(const Process& p, std::set<std::string>& out) {
    free_names_term(p.payload, out);
    free_names_term(p.payload2, out);
    free_names_term(p.lhs, out);
    free_names_term(p.rhs, out);
    for (const auto& k : p.kids) free_names_process(k, out);
}

}  // namespace calc_detail

// Names not captured by any restriction. Channels are not names and are
// reported by free_channels instead.
inline std::set<std::string> free_names(const System& s) {
    std::set<std::string> out;
    for (const Component* c : system_components(s)) calc_detail::free_names_process(c->body, out);
    return out;
}

inline std::set<std::string> free_channels(const System& s) {
    std::set<std::string> out;
    struct Walk {
        std::set<std::string>& out;
        void run(const Process& p) {
            if (p.channel.kind == TermKind::Channel) out.insert(p.channel.id);
            for (const auto& k : p.kids) run(k);
        }
    } w{out};
    for (const Component* c : system_components(s)) w.run(c->body);
    return out;
}

// The syntactic trust relations: one Trust(l_i, l_j) per l_j in rho_i.
inline std::set<Relation> initial_trust(const System& s) {
    std::set<Relation> out;
    for (const Component* c : system_components(s))
        for (const auto& t : c->trusts) out.insert(Relation::trust(c->id, t));
    return out;
}

// Theory enriched with every function symbol the system applies.
inline void observe_system(const System& s, EquationalTheory& E) {
    struct Walk {
        EquationalTheory& E;
        void run(const Process& p) {
            E.observe(p.payload);
            E.observe(p.payload2);
            E.observe(p.lhs);
            E.observe(p.rhs);
            for (const auto& k : p.kids) run(k);
        }
    } w{E};
    for (const Component* c : system_components(s)) w.run(c->body);
}

}  // namespace picon
