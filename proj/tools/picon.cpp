// picon: trace, state, extraction, property, and conformance queries over
// protocol (.pi) and architecture (.pal) files.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "picon/conformance.hpp"
#include "picon/theory.hpp"

using nlohmann::json;
using namespace picon;

namespace {

constexpr int kExitBudget = 2;
constexpr int kExitUsage = 64;
constexpr int kExitParse = 65;

struct Options {
    std::size_t rewrite_budget = kDefaultRewriteBudget;
    std::size_t deduction_depth = kDefaultDeductionDepth;
    std::size_t max_nodes = 100000;
    std::vector<std::string> range_overrides;  // NAME=N
    std::string format = "text";
    std::string theory_file;
    bool strict_subset = false;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--rewrite-budget", o.rewrite_budget,
                    "Maximum rewrite steps per normalization (default 10000)");
    cmd->add_option("--deduction-depth", o.deduction_depth,
                    "Deduction closure depth (default 6)");
    cmd->add_option("--max-nodes", o.max_nodes,
                    "State-space node budget (default 100000; env PICON_BUDGET)");
    cmd->add_option("--range", o.range_overrides,
                    "Override an array/index range, e.g. --range i=3")
        ->take_all();
    cmd->add_option("--theory", o.theory_file, "Extra equational-theory file");
    cmd->add_option("--format", o.format, "Output format: text or json")
        ->check(CLI::IsMember({"text", "json"}));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file '" + path + "'", 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::map<std::string, std::size_t> parse_ranges(const Options& o) {
    std::map<std::string, std::size_t> out;
    for (const auto& spec : o.range_overrides) {
        auto eq = spec.find('=');
        if (eq == std::string::npos)
            throw ParseError("range override must look like NAME=N: '" + spec + "'", 0, 0);
        out[spec.substr(0, eq)] = static_cast<std::size_t>(std::stoul(spec.substr(eq + 1)));
    }
    return out;
}

ReductionConfig reduction_config(const Options& o) {
    ReductionConfig rc;
    rc.rewrite_budget = o.rewrite_budget;
    rc.max_nodes = o.max_nodes;
    if (!o.theory_file.empty()) rc.theory = parse_theory(slurp(o.theory_file));
    return rc;
}

bool looks_like_architecture(const std::string& src) {
    Lexer lx(src);
    return lx.peek().kind == Token::Kind::Ident && lx.peek().text == "architecture";
}

json state_to_json(const GlobalState& g) {
    json j;
    for (const auto& [id, c] : g.comps) {
        json cj;
        for (const auto& [v, t] : c.var_state) cj["vars"][v] = to_string(t);
        cj["equations"] = json::array();
        for (const auto& [a, b] : c.prop_state)
            cj["equations"].push_back(to_string(a) + " = " + to_string(b));
        cj["trusts"] = json::array();
        for (const auto& t : c.trusted) cj["trusts"].push_back(t);
        cj["error"] = c.error;
        j["components"][id] = cj;
    }
    j["provenance"] = json::object();
    for (const auto& [t, vs] : g.provenance) {
        json vj = json::array();
        for (const auto& v : vs) vj.push_back(v);
        j["provenance"][to_string(t)] = vj;
    }
    return j;
}

json mapping_to_json(const Mapping& m) {
    json j;
    j["components"] = json::object();
    for (const auto& [k, v] : m.id_map) j["components"][k] = v;
    j["variables"] = json::object();
    for (const auto& [k, v] : m.var_map) j["variables"][k] = v;
    j["functions"] = json::object();
    for (const auto& [k, v] : m.fun_map) j["functions"][k] = v;
    return j;
}

int cmd_traces(const std::string& file, const Options& o) {
    auto rc = reduction_config(o);
    System s = parse_system(slurp(file));
    observe_system(s, rc.theory);
    auto traces = all_traces(s, rc);
    if (o.format == "json") {
        json j;
        j["traces"] = json::array();
        for (const auto& tr : traces) {
            json tj = json::array();
            for (const auto& l : tr) tj.push_back(to_string(l));
            j["traces"].push_back(tj);
        }
        std::cout << j.dump(2) << "\n";
    } else {
        std::size_t n = 0;
        for (const auto& tr : traces) {
            std::cout << "trace " << n++ << ":\n";
            for (const auto& l : tr) std::cout << "  " << to_string(l) << "\n";
        }
        std::cout << traces.size() << " maximal trace(s)\n";
    }
    return 0;
}

int cmd_states(const std::string& file, const Options& o) {
    auto rc = reduction_config(o);
    System s = parse_system(slurp(file));
    observe_system(s, rc.theory);
    auto sem = proto_semantics(s, rc);
    if (o.format == "json") {
        json j;
        j["states"] = json::array();
        for (const auto& g : sem.states) j["states"].push_back(state_to_json(g));
        j["endpoints"] = sem.endpoints.size();
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << sem.states.size() << " reachable state(s), " << sem.endpoints.size()
                  << " endpoint(s)\n";
    }
    return 0;
}

int cmd_extract(const std::string& file, const Options& o) {
    auto rc = reduction_config(o);
    System s = parse_system(slurp(file));
    observe_system(s, rc.theory);
    Architecture a = extract_architecture(s, rc);
    if (o.format == "json") {
        json j;
        j["relations"] = json::array();
        for (const auto& r : a.relations) j["relations"].push_back(to_string(r));
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << render_architecture(a);
    }
    return 0;
}

int cmd_eval(const std::string& file, const std::string& prop, const Options& o) {
    std::string src = slurp(file);
    LogicConfig lc{o.deduction_depth, o.rewrite_budget};
    bool value = false;
    bool found = false;
    if (looks_like_architecture(src)) {
        Architecture a = parse_architecture(src, parse_ranges(o));
        if (!o.theory_file.empty()) {
            EquationalTheory user = parse_theory(slurp(o.theory_file));
            for (const auto& [sym, sig] : user.functions)
                a.theory.declare(sym, sig.arity, sig.result_tag, sig.arg_tags);
            for (const auto& r : user.rules) a.theory.rules.push_back(r);
        }
        ExploreConfig ec;
        ec.max_nodes = o.max_nodes;
        ec.rewrite_budget = o.rewrite_budget;
        auto sem = explore_architecture(a, ec);
        for (const auto& [name, f] : a.properties)
            if (name == prop) {
                value = eval_arch(sem, a, f, lc);
                found = true;
            }
    } else {
        std::vector<std::pair<std::string, PropertyFormula>> props;
        System s = parse_system(src, &props);
        auto rc = reduction_config(o);
        observe_system(s, rc.theory);
        auto sem = proto_semantics(s, rc);
        for (const auto& [name, f] : props)
            if (name == prop) {
                value = eval_sys(sem, rc.theory, f, lc);
                found = true;
            }
    }
    if (!found) {
        std::cerr << "error: no property named '" << prop << "' in " << file << "\n";
        return kExitUsage;
    }
    if (o.format == "json") {
        json j;
        j["property"] = prop;
        j["value"] = value;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << prop << " = " << (value ? "true" : "false") << "\n";
    }
    return 0;
}

int cmd_check(const std::string& proto_file, const std::string& arch_file,
              const std::string& mode_str, const Options& o) {
    auto rc = reduction_config(o);
    System s = parse_system(slurp(proto_file));
    observe_system(s, rc.theory);
    Architecture a = parse_architecture(slurp(arch_file), parse_ranges(o));
    ConformanceMode mode =
        mode_str == "weak" ? ConformanceMode::Weak : ConformanceMode::Strong;
    SearchConfig sc;
    sc.strict_subset = o.strict_subset;
    LogicConfig lc{o.deduction_depth, o.rewrite_budget};
    ConformanceVerdict v = check_conformance(s, a, mode, rc, sc, lc);
    if (o.format == "json") {
        json j;
        j["mode"] = mode_str;
        j["holds"] = v.holds;
        if (v.witness) j["witness"] = mapping_to_json(*v.witness);
        j["missing"] = json::array();
        for (const auto& r : v.missing) j["missing"].push_back(to_string(r));
        j["extra"] = json::array();
        for (const auto& r : v.extra) j["extra"].push_back(to_string(r));
        j["hasnone_violations"] = json::array();
        for (const auto& [av, cv] : v.hasnone_violations)
            j["hasnone_violations"].push_back(json{{"architecture", av}, {"protocol", cv}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << (v.holds ? "conforms" : "does not conform") << " (" << mode_str << ")\n";
        for (const auto& r : v.missing) std::cout << "  missing: " << to_string(r) << "\n";
        for (const auto& r : v.extra) std::cout << "  extra:   " << to_string(r) << "\n";
        for (const auto& [av, cv] : v.hasnone_violations)
            std::cout << "  hasnone violated: " << av << " (protocol variable " << cv << ")\n";
        if (v.witness) {
            for (const auto& [k, w] : v.witness->id_map)
                std::cout << "  map component " << k << " -> " << w << "\n";
            for (const auto& [k, w] : v.witness->var_map)
                std::cout << "  map variable  " << k << " -> " << w << "\n";
            for (const auto& [k, w] : v.witness->fun_map)
                std::cout << "  map function  " << k << " -> " << w << "\n";
        }
    }
    return v.holds ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Protocol/architecture conformance checker"};
    app.require_subcommand(1);

    Options o;
    if (const char* env = std::getenv("PICON_BUDGET")) o.max_nodes = std::stoul(env);

    std::string file, arch_file, prop, mode = "strong";

    auto* traces = app.add_subcommand("traces", "Enumerate all maximal label traces");
    traces->add_option("file", file, "protocol file")->required();
    add_common(traces, o);

    auto* states = app.add_subcommand("states", "Dump the reachable knowledge states");
    states->add_option("file", file, "protocol file")->required();
    add_common(states, o);

    auto* extract = app.add_subcommand("extract", "Extract the realized architecture");
    extract->add_option("file", file, "protocol file")->required();
    add_common(extract, o);

    auto* eval = app.add_subcommand("eval", "Evaluate a declared property");
    eval->add_option("file", file, "protocol or architecture file")->required();
    eval->add_option("--property", prop, "property name")->required();
    add_common(eval, o);

    auto* check = app.add_subcommand("check", "Check protocol/architecture conformance");
    check->add_option("protocol", file, "protocol file")->required();
    check->add_option("architecture", arch_file, "architecture file")->required();
    check->add_option("--mode", mode, "strong or weak")
        ->check(CLI::IsMember({"strong", "weak"}));
    check->add_flag("--strict-subset", o.strict_subset,
                    "weak mode: require the containment to be proper");
    add_common(check, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (traces->parsed()) return cmd_traces(file, o);
        if (states->parsed()) return cmd_states(file, o);
        if (extract->parsed()) return cmd_extract(file, o);
        if (eval->parsed()) return cmd_eval(file, prop, o);
        if (check->parsed()) return cmd_check(file, arch_file, mode, o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const StateSpaceBudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const SearchBudgetExceeded& e) {
        std::cerr << "budget exhausted: " << e.what() << "\n";
        return kExitBudget;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    return kExitUsage;
}
