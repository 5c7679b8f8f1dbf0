#pragma once

// The privacy logic, shared by both levels: Has^all / Has^none / K / And.
// Component and variable references are plain identifiers; at the
// architecture level a variable may denote a declared array, in which case
// it expands over the array's range during evaluation.

#include <string>
#include <vector>

#include "picon/term.hpp"

namespace picon {

struct PropertyFormula {
    enum class Kind { HasAll, HasNone, Knows, And };
    Kind kind = Kind::HasAll;
    std::string comp;
    std::string var;   // HasAll / HasNone
    Term lhs, rhs;     // Knows
    std::vector<PropertyFormula> kids;  // And

    static PropertyFormula has_all(std::string c, std::string v) {
        PropertyFormula f;
        f.kind = Kind::HasAll;
        f.comp = std::move(c);
        f.var = std::move(v);
        return f;
    }
    static PropertyFormula has_none(std::string c, std::string v) {
        PropertyFormula f;
        f.kind = Kind::HasNone;
        f.comp = std::move(c);
        f.var = std::move(v);
        return f;
    }
    static PropertyFormula knows(std::string c, Term l, Term r) {
        PropertyFormula f;
        f.kind = Kind::Knows;
        f.comp = std::move(c);
        f.lhs = std::move(l);
        f.rhs = std::move(r);
        return f;
    }
    static PropertyFormula conj(PropertyFormula a, PropertyFormula b) {
        PropertyFormula f;
        f.kind = Kind::And;
        f.kids.push_back(std::move(a));
        f.kids.push_back(std::move(b));
        return f;
    }
};

inline std::string to_string(const PropertyFormula& f) {
    switch (f.kind) {
        case PropertyFormula::Kind::HasAll: return "hasall " + f.comp + " " + f.var;
        case PropertyFormula::Kind::HasNone: return "hasnone " + f.comp + " " + f.var;
        case PropertyFormula::Kind::Knows:
            return "knows " + f.comp + " (" + to_string(f.lhs) + " = " + to_string(f.rhs) + ")";
        case PropertyFormula::Kind::And:
            return "(" + to_string(f.kids[0]) + " and " + to_string(f.kids[1]) + ")";
    }
    return "";
}

}  // namespace picon
