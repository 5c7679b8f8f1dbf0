#pragma once

// Random protocol generator for the property-test suites. Generated systems
// are small (at most 3 components, a handful of linear steps, at most 3 free
// constructor symbols) and deadlock-free by construction: communication
// steps are appended to both endpoints in one global order.

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "picon/calculus.hpp"

namespace gen {

struct Generator {
    std::mt19937 rng;
    explicit Generator(unsigned seed) : rng(seed) {}

    int ri(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool chance(int percent) { return ri(1, 100) <= percent; }

    struct Comp {
        std::string id;
        std::vector<std::string> lines;
        std::vector<std::string> vars;           // everything bound so far
        std::vector<std::string> computed;       // let-bound with plain rhs (attestable)
        std::set<std::string> trusts;
    };

    int next_var = 0, next_name = 0, next_chan = 0, next_key = 0, next_sig = 0;
    std::string fresh_var() { return "x" + std::to_string(++next_var); }
    std::string fresh_name() { return "n" + std::to_string(++next_name); }
    std::string fresh_chan() { return "ch" + std::to_string(++next_chan); }
    std::string fresh_key() { return "key" + std::to_string(++next_key); }
    std::string fresh_sig() { return "s" + std::to_string(++next_sig); }

    std::string pick(const std::vector<std::string>& v) {
        return v[static_cast<std::size_t>(ri(0, static_cast<int>(v.size()) - 1))];
    }

    // Builds one protocol source. Every run of the result terminates and the
    // extraction of every label kind is reachable with fair probability.
    std::string generate() {
        int nc = ri(1, 3);
        std::vector<Comp> comps(static_cast<std::size_t>(nc));
        for (int i = 0; i < nc; ++i) comps[static_cast<std::size_t>(i)].id = "c" + std::to_string(i + 1);

        // fixed trust topology, decided up front
        for (auto& a : comps)
            for (auto& b : comps)
                if (a.id != b.id && chance(50)) a.trusts.insert(b.id);

        std::vector<std::string> funs;
        int nf = ri(1, 3);
        for (int i = 0; i < nf; ++i) funs.push_back("f" + std::to_string(i + 1));

        auto comp_with_vars = [&]() -> Comp* {
            std::vector<Comp*> cands;
            for (auto& c : comps)
                if (!c.vars.empty()) cands.push_back(&c);
            if (cands.empty()) return nullptr;
            return cands[static_cast<std::size_t>(ri(0, static_cast<int>(cands.size()) - 1))];
        };

        int steps = ri(2, 6);
        for (int s = 0; s < steps; ++s) {
            switch (ri(0, 4)) {
                case 0: {  // environment input
                    Comp& c = comps[static_cast<std::size_t>(ri(0, nc - 1))];
                    std::string x = fresh_var();
                    c.lines.push_back("fresh " + x + " = " + fresh_name() + " in");
                    c.vars.push_back(x);
                    break;
                }
                case 1: {  // computation over existing knowledge
                    Comp* c = comp_with_vars();
                    if (!c) break;
                    std::string x = fresh_var();
                    std::string rhs;
                    int shape = ri(0, 2);
                    if (shape == 0) {
                        rhs = pick(c->vars);  // alias
                    } else if (shape == 1 || funs.size() < 2) {
                        rhs = funs[0] + "(" + pick(c->vars) + ")";
                    } else {
                        rhs = funs[1] + "(" + pick(c->vars) + ", " + pick(c->vars) + ")";
                    }
                    c->lines.push_back("let " + x + " = " + rhs + " in");
                    c->vars.push_back(x);
                    c->computed.push_back(x);
                    break;
                }
                case 2: {  // plain message; the receiver shares the sender's spelling
                    if (nc < 2) break;
                    Comp* snd = comp_with_vars();
                    if (!snd) break;
                    Comp* rcv = &comps[static_cast<std::size_t>(ri(0, nc - 1))];
                    if (rcv == snd) break;
                    std::string ch = fresh_chan();
                    std::string v = pick(snd->vars);
                    if (std::find(rcv->vars.begin(), rcv->vars.end(), v) != rcv->vars.end())
                        break;
                    snd->lines.push_back("send " + ch + " " + v + " .");
                    rcv->lines.push_back("recv " + ch + " (" + v + ") .");
                    rcv->vars.push_back(v);
                    break;
                }
                case 3: {  // attested message, optionally verified
                    if (nc < 2) break;
                    Comp* snd = nullptr;
                    for (auto& c : comps)
                        if (!c.computed.empty() && (!snd || chance(50))) snd = &c;
                    if (!snd) break;
                    Comp* rcv = &comps[static_cast<std::size_t>(ri(0, nc - 1))];
                    if (rcv == snd) break;
                    std::string ch = fresh_chan();
                    std::string key = fresh_key();
                    std::string v = pick(snd->computed);
                    if (std::find(rcv->vars.begin(), rcv->vars.end(), v) != rcv->vars.end())
                        break;
                    std::string sig = fresh_sig();
                    std::string wsig = fresh_sig();
                    snd->lines.push_back("let " + sig + " = sign(" + v + ", " + key + ") in");
                    snd->lines.push_back("sendatt " + ch + " (" + v + ", " + sig + ") .");
                    rcv->lines.push_back("recvatt " + ch + " (" + v + ", " + wsig + ") .");
                    rcv->vars.push_back(v);
                    if (chance(70))
                        rcv->lines.push_back("if " + v + " = checksign(" + wsig + ", pk(" + key +
                                             ")) then");
                    break;
                }
                case 4: {  // always-true check
                    Comp* c = comp_with_vars();
                    if (!c) break;
                    std::string v = pick(c->vars);
                    c->lines.push_back("if " + v + " = " + v + " then");
                    break;
                }
            }
        }

        std::ostringstream out;
        for (const auto& c : comps) {
            out << "component " << c.id << " trusts { ";
            bool first = true;
            for (const auto& t : c.trusts) {
                if (!first) out << ", ";
                first = false;
                out << t;
            }
            out << (first ? "}" : " }") << " {\n";
            for (const auto& l : c.lines) out << "  " << l << "\n";
            out << "  nil\n}\n\n";
        }
        out << "system S = ";
        if (nc == 1) {
            out << comps[0].id << "\n";
        } else {
            out << "( " << comps[0].id;
            for (int i = 1; i < nc; ++i) out << " | " << comps[static_cast<std::size_t>(i)].id;
            out << " )\n";
        }
        return out.str();
    }
};

inline picon::System generate_system(unsigned seed, std::string* source_out = nullptr) {
    Generator g(seed);
    std::string src = g.generate();
    if (source_out) *source_out = src;
    return picon::parse_system(src);
}

}  // namespace gen
