#pragma once

// Theory file parser. One declaration or rule per statement:
//
//   type key;
//   fun sign/2 : (msg, key) -> sig;
//   fst(pair(x, y)) -> x;
//
// Statements end at ';' or end of line. Comments start with '#'.
// The built-in attestation rules (sign/checksign/pk) are always present.

#include <string>

#include "picon/lexer.hpp"
#include "picon/term.hpp"

namespace picon {

namespace detail {

// In rule terms every non-function identifier is a rule variable.
inline Term parse_rule_term(Lexer& lx) {
    std::string id = lx.expect_ident("term");
    if (lx.accept_punct("(")) {
        std::vector<Term> args;
        if (!lx.accept_punct(")")) {
            args.push_back(parse_rule_term(lx));
            while (lx.accept_punct(",")) args.push_back(parse_rule_term(lx));
            lx.expect_punct(")");
        }
        return Term::fun(id, std::move(args));
    }
    return Term::var(id);
}

}  // namespace detail

inline EquationalTheory parse_theory(const std::string& source) {
    EquationalTheory E = EquationalTheory::builtins();
    Lexer lx(source);
    while (!lx.at_end()) {
        if (lx.accept_punct(";")) continue;
        if (lx.accept_ident("type")) {
            E.type_tags.insert(lx.expect_ident("type tag"));
            lx.accept_punct(";");
            continue;
        }
        if (lx.accept_ident("fun")) {
            std::string sym = lx.expect_ident("function symbol");
            lx.expect_punct("/");
            Token n = lx.next();
            if (n.kind != Token::Kind::Number)
                throw ParseError("expected arity after '/'", n.line, n.col);
            std::size_t arity = static_cast<std::size_t>(std::stoul(n.text));
            std::vector<std::string> arg_tags(arity);
            std::string result_tag;
            if (lx.accept_punct(":")) {
                lx.expect_punct("(");
                for (std::size_t i = 0; i < arity; ++i) {
                    if (i) lx.expect_punct(",");
                    arg_tags[i] = lx.expect_ident("argument type tag");
                }
                lx.expect_punct(")");
                lx.expect_punct("->");
                result_tag = lx.expect_ident("result type tag");
            }
            E.declare(sym, arity, result_tag, arg_tags);
            lx.accept_punct(";");
            continue;
        }
        // rewrite rule: term -> term
        Term lhs = detail::parse_rule_term(lx);
        lx.expect_punct("->");
        Term rhs = detail::parse_rule_term(lx);
        lx.accept_punct(";");
        std::set<std::string> lv, rv;
        collect_vars(lhs, lv);
        collect_vars(rhs, rv);
        for (const auto& v : rv)
            if (!lv.count(v))
                throw Error("rule variable '" + v + "' appears only on the right-hand side");
        E.observe(lhs);
        E.observe(rhs);
        E.rules.push_back({lhs, rhs});
    }
    return E;
}

}  // namespace picon
