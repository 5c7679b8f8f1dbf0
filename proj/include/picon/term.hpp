#pragma once

// Symbolic term language, the equational theory E as an oriented rewrite
// system, evaluation to normal forms, deduction, and equation entailment.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace picon {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rewrite-step budget hit: the user theory is (or looks) non-terminating.
struct BudgetExceeded : Error {
    using Error::Error;
};

struct StateSpaceBudgetExceeded : Error {
    using Error::Error;
};

struct SearchBudgetExceeded : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, int line, int col)
        : Error(msg + " (line " + std::to_string(line) + ", col " + std::to_string(col) + ")"),
          line(line), col(col) {}
    int line;
    int col;
};

enum class TermKind { Channel, CompId, Name, Var, Fun };

// The shared symbolic value language for both the calculus and PAL.
// A Fun term carries its function symbol in `id` and its arguments in `args`.
struct Term {
    TermKind kind = TermKind::Name;
    std::string id;
    bool bound = false;  // names only: created under a restriction
    std::vector<Term> args;

    static Term channel(std::string s) { return {TermKind::Channel, std::move(s), false, {}}; }
    static Term comp_id(std::string s) { return {TermKind::CompId, std::move(s), false, {}}; }
    static Term name(std::string s, bool is_bound = false) {
        return {TermKind::Name, std::move(s), is_bound, {}};
    }
    static Term var(std::string s) { return {TermKind::Var, std::move(s), false, {}}; }
    static Term fun(std::string sym, std::vector<Term> as) {
        return {TermKind::Fun, std::move(sym), false, std::move(as)};
    }

    bool is_fun(const std::string& sym) const { return kind == TermKind::Fun && id == sym; }
    bool is_var() const { return kind == TermKind::Var; }
    bool is_name() const { return kind == TermKind::Name; }
};

inline int compare(const Term& a, const Term& b) {
    if (a.kind != b.kind) return static_cast<int>(a.kind) < static_cast<int>(b.kind) ? -1 : 1;
    if (int c = a.id.compare(b.id)) return c < 0 ? -1 : 1;
    if (a.bound != b.bound) return a.bound ? 1 : -1;
    for (std::size_t i = 0; i < a.args.size() && i < b.args.size(); ++i)
        if (int c = compare(a.args[i], b.args[i])) return c;
    if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
    return 0;
}

inline bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
inline bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
inline bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

inline std::string to_string(const Term& t) {
    if (t.kind != TermKind::Fun) return t.id;
    std::string out = t.id + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) out += ", ";
        out += to_string(t.args[i]);
    }
    return out + ")";
}

inline void collect_subterms(const Term& t, std::set<Term>& out) {
    out.insert(t);
    for (const auto& a : t.args) collect_subterms(a, out);
}

inline void collect_vars(const Term& t, std::set<std::string>& out) {
    if (t.kind == TermKind::Var) out.insert(t.id);
    for (const auto& a : t.args) collect_vars(a, out);
}

inline bool mentions_var(const Term& t, const std::string& x) {
    if (t.kind == TermKind::Var && t.id == x) return true;
    for (const auto& a : t.args) {
        if (mentions_var(a, x)) return true;
    }
    return false;
}

struct FunctionSig {
    std::string symbol;
    std::size_t arity = 0;
    std::string result_tag;              // empty tag = wildcard
    std::vector<std::string> arg_tags;
};

// Oriented left-to-right; Var terms inside lhs are rule variables.
struct RewriteRule {
    Term lhs;
    Term rhs;
};

class EquationalTheory {
public:
    std::map<std::string, FunctionSig> functions;
    std::vector<RewriteRule> rules;
    std::set<std::string> type_tags;

    // The attestation destructor convention: checksign(sign(m, sk), pk(sk)) -> m.
    static EquationalTheory builtins() {
        EquationalTheory e;
        e.declare("sign", 2, "sig", {"", "key"});
        e.declare("checksign", 2, "", {"sig", ""});
        e.declare("pk", 1, "", {"key"});
        Term m = Term::var("m"), sk = Term::var("sk");
        e.rules.push_back({Term::fun("checksign", {Term::fun("sign", {m, sk}), Term::fun("pk", {sk})}), m});
        return e;
    }

    void declare(std::string sym, std::size_t arity, std::string result_tag = "",
                 std::vector<std::string> arg_tags = {}) {
        if (arg_tags.empty()) arg_tags.resize(arity);
        auto it = functions.find(sym);
        if (it != functions.end()) {
            if (it->second.arity != arity)
                throw Error("function '" + sym + "' redeclared with arity " + std::to_string(arity) +
                            " (was " + std::to_string(it->second.arity) + ")");
            return;
        }
        functions[sym] = FunctionSig{sym, arity, std::move(result_tag), std::move(arg_tags)};
    }

    // Functions appearing in terms are registered with their observed arity.
    void observe(const Term& t) {
        if (t.kind == TermKind::Fun) declare(t.id, t.args.size());
        for (const auto& a : t.args) observe(a);
    }

    void check_arity(const Term& t) const {
        if (t.kind == TermKind::Fun) {
            auto it = functions.find(t.id);
            if (it != functions.end() && it->second.arity != t.args.size())
                throw Error("arity mismatch for '" + t.id + "': got " +
                            std::to_string(t.args.size()) + ", declared " +
                            std::to_string(it->second.arity));
        }
        for (const auto& a : t.args) check_arity(a);
    }
};

namespace detail {

// First-order syntactic matching; no matching modulo E.
inline bool match(const Term& pattern, const Term& t, std::map<std::string, Term>& bind) {
    if (pattern.kind == TermKind::Var) {
        auto it = bind.find(pattern.id);
        if (it == bind.end()) {
            bind.emplace(pattern.id, t);
            return true;
        }
        return it->second == t;
    }
    if (pattern.kind != t.kind || pattern.id != t.id || pattern.args.size() != t.args.size())
        return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match(pattern.args[i], t.args[i], bind)) return false;
    return true;
}

inline Term instantiate(const Term& t, const std::map<std::string, Term>& bind) {
    if (t.kind == TermKind::Var) {
        auto it = bind.find(t.id);
        if (it != bind.end()) return it->second;
        return t;
    }
    Term out = t;
    for (auto& a : out.args) a = instantiate(a, bind);
    return out;
}

}  // namespace detail

constexpr std::size_t kDefaultRewriteBudget = 10000;
constexpr std::size_t kDefaultDeductionDepth = 6;

// Innermost rewriting to a normal form. Throws BudgetExceeded when `budget`
// rule applications are spent without reaching one.
inline Term normal_form(const Term& t, const EquationalTheory& E,
                        std::size_t budget = kDefaultRewriteBudget) {
    std::size_t steps = budget;
    // Iterative outer loop so a rhs that re-enables a rule is renormalized.
    struct Rec {
        const EquationalTheory& E;
        std::size_t& steps;
        Term run(const Term& t) {
            Term cur = t;
            for (auto& a : cur.args) a = run(a);
            bool changed = true;
            while (changed) {
                changed = false;
                for (const auto& rule : E.rules) {
                    std::map<std::string, Term> bind;
                    if (detail::match(rule.lhs, cur, bind)) {
                        if (steps == 0) throw BudgetExceeded("rewrite-step budget exhausted");
                        --steps;
                        cur = detail::instantiate(rule.rhs, bind);
                        for (auto& a : cur.args) a = run(a);
                        changed = true;
                        break;
                    }
                }
            }
            return cur;
        }
    } rec{E, steps};
    return rec.run(t);
}

inline bool equal_in_E(const Term& t1, const Term& t2, const EquationalTheory& E,
                       std::size_t budget = kDefaultRewriteBudget) {
    return normal_form(t1, E, budget) == normal_form(t2, E, budget);
}

// Deduction: closure of `knowledge` under function application and rewriting,
// saturated to `depth` rounds. Each round applies declared functions to
// one-level combinations of known terms; a result is retained as new
// knowledge when a rewrite fired (destructor products), while pure
// constructions are recognized by the final constructibility check.
inline bool deducible(const std::vector<Term>& knowledge, const Term& target,
                      const EquationalTheory& E, std::size_t depth = kDefaultDeductionDepth,
                      std::size_t budget = kDefaultRewriteBudget) {
    std::set<Term> known;
    for (const auto& k : knowledge) known.insert(normal_form(k, E, budget));
    Term goal = normal_form(target, E, budget);

    auto constructible = [&](const Term& t, auto&& self) -> bool {
        if (known.count(t)) return true;
        if (t.kind != TermKind::Fun) return false;
        if (!E.functions.count(t.id)) return false;
        for (const auto& a : t.args)
            if (!self(a, self)) return false;
        return true;
    };

    for (std::size_t round = 0; round < depth; ++round) {
        if (constructible(goal, constructible)) return true;
        std::vector<Term> base(known.begin(), known.end());
        // one construction level feeding the argument positions
        std::vector<Term> pool = base;
        for (const auto& [sym, sig] : E.functions) {
            if (sig.arity == 0) pool.push_back(Term::fun(sym, {}));
        }
        std::set<Term> fresh;
        for (const auto& [sym, sig] : E.functions) {
            if (sig.arity == 0 || sig.arity > 3) continue;
            std::vector<std::size_t> idx(sig.arity, 0);
            // argument tuples over base terms, with at most one argument being a
            // one-level construction over base
            auto try_apply = [&](const std::vector<Term>& args) {
                // normalize the arguments first so that only head-level
                // rewrites (genuine destructor products) are retained
                std::vector<Term> nargs;
                nargs.reserve(args.size());
                for (const auto& a : args) nargs.push_back(normal_form(a, E, budget));
                Term applied = Term::fun(sym, std::move(nargs));
                Term nf = normal_form(applied, E, budget);
                if (nf != applied && !known.count(nf)) fresh.insert(nf);
            };
            std::vector<Term> args(sig.arity);
            std::size_t n = base.size();
            if (n == 0) continue;
            // plain tuples
            std::vector<std::size_t> od(sig.arity, 0);
            while (true) {
                for (std::size_t i = 0; i < sig.arity; ++i) args[i] = base[od[i]];
                try_apply(args);
                // also try replacing each position with every one-level construction
                for (std::size_t pos = 0; pos < sig.arity; ++pos) {
                    for (const auto& [s2, g2] : E.functions) {
                        if (g2.arity == 0 || g2.arity > 2) continue;
                        std::vector<std::size_t> od2(g2.arity, 0);
                        while (true) {
                            std::vector<Term> inner(g2.arity);
                            for (std::size_t i = 0; i < g2.arity; ++i) inner[i] = base[od2[i]];
                            Term saved = args[pos];
                            args[pos] = Term::fun(s2, inner);
                            try_apply(args);
                            args[pos] = saved;
                            std::size_t j = 0;
                            for (; j < g2.arity; ++j) {
                                if (++od2[j] < n) break;
                                od2[j] = 0;
                            }
                            if (j == g2.arity) break;
                        }
                    }
                }
                std::size_t j = 0;
                for (; j < sig.arity; ++j) {
                    if (++od[j] < n) break;
                    od[j] = 0;
                }
                if (j == sig.arity) break;
            }
        }
        if (fresh.empty()) break;
        known.insert(fresh.begin(), fresh.end());
    }
    return constructible(goal, constructible);
}

// Equation entailment: congruence closure of the given equations over their
// subterm universe, with both sides taken modulo E. Realizes the Eq' => Eq
// step of the K semantics.
inline bool entails_equation(const std::vector<std::pair<Term, Term>>& equations,
                             const Term& lhs, const Term& rhs, const EquationalTheory& E,
                             std::size_t budget = kDefaultRewriteBudget) {
    std::set<Term> universe;
    auto add = [&](const Term& t) { collect_subterms(normal_form(t, E, budget), universe); };
    for (const auto& [a, b] : equations) {
        add(a);
        add(b);
    }
    add(lhs);
    add(rhs);

    std::vector<Term> terms(universe.begin(), universe.end());
    std::map<Term, std::size_t> index;
    for (std::size_t i = 0; i < terms.size(); ++i) index[terms[i]] = i;

    std::vector<std::size_t> parent(terms.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t i, auto&& self) -> std::size_t {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    auto unite = [&](std::size_t a, std::size_t b) {
        a = find(a, find);
        b = find(b, find);
        if (a != b) parent[a] = b;
    };

    for (const auto& [a, b] : equations)
        unite(index[normal_form(a, E, budget)], index[normal_form(b, E, budget)]);

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            for (std::size_t j = i + 1; j < terms.size(); ++j) {
                const Term &a = terms[i], &b = terms[j];
                if (a.kind != TermKind::Fun || b.kind != TermKind::Fun) continue;
                if (a.id != b.id || a.args.size() != b.args.size()) continue;
                if (find(i, find) == find(j, find)) continue;
                bool all = true;
                for (std::size_t k = 0; k < a.args.size(); ++k) {
                    auto ia = index.find(normal_form(a.args[k], E, budget));
                    auto ib = index.find(normal_form(b.args[k], E, budget));
                    if (ia == index.end() || ib == index.end() ||
                        find(ia->second, find) != find(ib->second, find)) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    unite(i, j);
                    changed = true;
                }
            }
        }
    }
    std::size_t il = index[normal_form(lhs, E, budget)];
    std::size_t ir = index[normal_form(rhs, E, budget)];
    return find(il, find) == find(ir, find);
}

}  // namespace picon
