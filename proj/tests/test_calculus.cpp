#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "picon/calculus.hpp"

using namespace picon;

static const char* kMetering = R"(
component lM trusts { } {
  fresh xc1 = k1 in
  let xm1 = xc1 in
  let xsig = sign(xm1, skm) in
  sendatt cmo (xm1, xsig) .
  nil
}

component lO trusts { lM } {
  recvatt cmo (xm1, xsig) .
  nil
}

system S = new skm . ( lM | lO )

property p1 = hasall lO xm1;
property p2 = hasnone lO xc1;
)";

TEST_CASE("the metering protocol parses into the expected shape") {
    std::vector<std::pair<std::string, PropertyFormula>> props;
    System s = parse_system(kMetering, &props);

    REQUIRE(s.kind == System::Kind::Restrict);
    CHECK(s.name == "skm");
    REQUIRE(s.kids.size() == 1);
    CHECK(s.kids[0].kind == System::Kind::Par);

    auto comps = system_components(s);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0]->id == "lM");
    CHECK(comps[1]->id == "lO");
    CHECK(comps[1]->trusts == std::set<std::string>{"lM"});

    const Process& m = comps[0]->body;
    CHECK(m.kind == Process::Kind::Let);
    CHECK(m.fresh);
    CHECK(m.binder == "xc1");
    CHECK(m.rhs == Term::name("k1"));
    const Process& satt = m.kids[0].kids[0].kids[0];
    CHECK(satt.kind == Process::Kind::SendAtt);
    CHECK(satt.channel == Term::channel("cmo"));
    CHECK(satt.payload == Term::var("xm1"));
    CHECK(satt.payload2 == Term::var("xsig"));

    REQUIRE(props.size() == 2);
    CHECK(props[0].first == "p1");
    CHECK(props[0].second.kind == PropertyFormula::Kind::HasAll);
    CHECK(props[1].second.kind == PropertyFormula::Kind::HasNone);
    CHECK(props[1].second.comp == "lO");
    CHECK(props[1].second.var == "xc1");
}

TEST_CASE("rendering a parsed system round-trips") {
    System s = parse_system(kMetering);
    std::string rendered = render_system(s);
    System s2 = parse_system(rendered);
    CHECK(s2 == s);
    CHECK(render_system(s2) == rendered);
}

TEST_CASE("names bound by new are marked bound and alpha-distinct") {
    System s = parse_system(kMetering);
    // skm is bound on the system line, k1 comes from the environment
    auto fn = free_names(s);
    CHECK(fn.count("k1") == 1);
    CHECK(fn.count("skm") == 0);
    CHECK(free_channels(s) == std::set<std::string>{"cmo"});
}

TEST_CASE("component-local new binders with the same spelling stay distinct") {
    const char* src = R"(
component a trusts { } { new n . send ch n . nil }
component b trusts { } { new n . send ch2 n . nil }
system S = ( a | b )
)";
    System s = parse_system(src);
    auto comps = system_components(s);
    const Process& pa = comps[0]->body;
    const Process& pb = comps[1]->body;
    REQUIRE(pa.kind == Process::Kind::Restrict);
    REQUIRE(pb.kind == Process::Kind::Restrict);
    CHECK(pa.binder != pb.binder);  // alpha-renamed apart
    CHECK(free_names(s).empty());
}

TEST_CASE("rebinding a variable shadows via renaming") {
    const char* src = R"(
component a trusts { } {
  recv ch (x) .
  recv ch2 (x) .
  send ch3 x .
  nil
}
component b trusts { } {
  fresh y = k in
  fresh z = k2 in
  send ch y . send ch2 z . recv ch3 (w) . nil
}
system S = ( a | b )
)";
    System s = parse_system(src);
    const Process& p = system_components(s)[0]->body;
    const std::string outer = p.binder;
    const std::string inner = p.kids[0].binder;
    CHECK(outer != inner);
    // the send refers to the innermost binding
    CHECK(p.kids[0].kids[0].payload == Term::var(inner));
}

TEST_CASE("ill-formed systems are rejected") {
    // replication was removed from the calculus
    CHECK_THROWS(parse_system("component a trusts { } { !nil }\nsystem S = a"));
    // components cannot trust themselves
    CHECK_THROWS(parse_system("component a trusts { a } { nil }\nsystem S = a"));
    // duplicate definitions
    CHECK_THROWS(parse_system(
        "component a trusts { } { nil }\ncomponent a trusts { } { nil }\nsystem S = a"));
    // composing the same component twice
    CHECK_THROWS(parse_system("component a trusts { } { nil }\nsystem S = ( a | a )"));
    // a channel identifier cannot reappear as a term
    CHECK_THROWS(parse_system("component a trusts { } { send ch ch . nil }\nsystem S = a"));
    // fresh binds environment names, not computed terms
    CHECK_THROWS(parse_system("component a trusts { } { fresh x = f(k) in nil }\nsystem S = a"));
}

TEST_CASE("the empty system parses") {
    System s = parse_system("system S = empty");
    CHECK(s.kind == System::Kind::Empty);
    CHECK(system_components(s).empty());
}

TEST_CASE("initial trust reflects component declarations") {
    System s = parse_system(kMetering);
    auto tr = initial_trust(s);
    REQUIRE(tr.size() == 1);
    const Relation& r = *tr.begin();
    CHECK(r.kind == Relation::Kind::Trust);
    CHECK(r.comp == "lO");
    CHECK(r.peer == "lM");
}

TEST_CASE("observe_system records every function symbol in use") {
    System s = parse_system(kMetering);
    EquationalTheory E = EquationalTheory::builtins();
    observe_system(s, E);
    CHECK(E.functions.count("sign") == 1);
    System s2 = parse_system(
        "component a trusts { } { fresh x = k in let y = h(x, x) in nil }\nsystem S = a");
    observe_system(s2, E);
    CHECK(E.functions.at("h").arity == 2);
}
