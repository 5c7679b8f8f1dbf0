#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "picon/reduction.hpp"

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
)";

TEST_CASE("the metering protocol has exactly one maximal trace") {
    System s = parse_system(kMetering);
    auto traces = all_traces(s);
    REQUIRE(traces.size() == 1);
    const LabelTrace& tr = traces[0];
    REQUIRE(tr.size() == 4);
    CHECK(to_string(tr[0]) == "has(lM, xc1:k1)");
    CHECK(to_string(tr[1]) == "comp(lM, xm1:xc1)");
    CHECK(tr[2].kind == Label::Kind::Tau);   // the sign let is internal
    CHECK(tr[2].has_binding);
    CHECK(tr[2].var == "xsig");
    CHECK(tr[3].kind == Label::Kind::RcvAtt);
    CHECK(tr[3].comp == "lO");
    CHECK(tr[3].peer == "lM");
    CHECK(tr[3].var == "xm1");
    CHECK(tr[3].value == Term::name("k1"));
    CHECK(tr[3].attester == "lM");
    CHECK(tr[3].att_msg_var == "xm1");
    REQUIRE(tr[3].att_eqs.size() == 1);
    CHECK(tr[3].att_eqs[0].first == Term::var("xm1"));
    CHECK(tr[3].att_eqs[0].second == Term::var("xc1"));
}

TEST_CASE("the empty system only has the empty trace") {
    auto traces = all_traces(parse_system("system S = empty"));
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].empty());
}

TEST_CASE("independent components interleave") {
    const char* src = R"(
component a trusts { } { fresh x = k1 in nil }
component b trusts { } { fresh y = k2 in nil }
system S = ( a | b )
)";
    auto traces = all_traces(parse_system(src));
    CHECK(traces.size() == 2);  // 2! interleavings
    for (const auto& tr : traces) REQUIRE(tr.size() == 2);
}

TEST_CASE("maximal interleaving count is factorial in the components") {
    for (int n = 1; n <= 4; ++n) {
        std::string src;
        for (int i = 1; i <= n; ++i)
            src += "component c" + std::to_string(i) + " trusts { } { fresh x" +
                   std::to_string(i) + " = k" + std::to_string(i) + " in nil }\n";
        src += "system S = ";
        if (n == 1) {
            src += "c1";
        } else {
            src += "( c1";
            for (int i = 2; i <= n; ++i) src += " | c" + std::to_string(i);
            src += " )";
        }
        std::size_t expect = 1;
        for (int i = 2; i <= n; ++i) expect *= static_cast<std::size_t>(i);
        CHECK(all_traces(parse_system(src)).size() == expect);
    }
}

TEST_CASE("a failed check freezes the component") {
    const char* src = R"(
component a trusts { } {
  fresh x = k1 in
  fresh y = k2 in
  if x = y then
  fresh z = k3 in
  nil
}
system S = a
)";
    auto traces = all_traces(parse_system(src));
    REQUIRE(traces.size() == 1);
    const LabelTrace& tr = traces[0];
    REQUIRE(tr.size() == 3);  // has, has, error - no step after the failure
    CHECK(tr[2].kind == Label::Kind::Error);
    CHECK(tr[2].comp == "a");
}

TEST_CASE("a passing check emits a check label and continues") {
    const char* src = R"(
component a trusts { } {
  fresh x = k1 in
  let y = x in
  if x = y then
  fresh z = k3 in
  nil
}
system S = a
)";
    auto traces = all_traces(parse_system(src));
    REQUIRE(traces.size() == 1);
    const LabelTrace& tr = traces[0];
    REQUIRE(tr.size() == 4);
    CHECK(tr[2].kind == Label::Kind::Check);
    CHECK(tr[2].lhs == Term::var("x"));
    CHECK(tr[2].rhs == Term::var("y"));
}

TEST_CASE("plain messages produce rcv labels, same-component ones are silent") {
    const char* src = R"(
component a trusts { } { fresh x = k in send ch x . nil }
component b trusts { } { recv ch (y) . nil }
system S = ( a | b )
)";
    auto traces = all_traces(parse_system(src));
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].size() == 2);
    CHECK(to_string(traces[0][1]) == "rcv(b, a, y:k)");

    const char* self = R"(
component a trusts { } { fresh x = k in ( send ch x . nil | recv ch (y) . nil ) }
system S = a
)";
    auto st = all_traces(parse_system(self));
    REQUIRE(st.size() == 1);
    REQUIRE(st[0].size() == 2);
    CHECK(st[0][1].kind == Label::Kind::Tau);  // intra-component synchronisation
    CHECK(st[0][1].has_binding);
    CHECK(st[0][1].var == "y");
}

TEST_CASE("checksign verification becomes a ver_att label carrying the receipt") {
    const char* src = R"(
component lM trusts { } {
  fresh xc = k1 in
  let xm = xc in
  let xsig = sign(xm, skm) in
  sendatt cmo (xm, xsig) .
  nil
}
component lO trusts { lM } {
  recvatt cmo (ym, ysig) .
  if ym = checksign(ysig, pk(skm)) then
  nil
}
system S = new skm . ( lM | lO )
)";
    auto traces = all_traces(parse_system(src));
    REQUIRE(traces.size() == 1);
    const Label& v = traces[0].back();
    CHECK(v.kind == Label::Kind::VerAtt);
    CHECK(v.comp == "lO");
    CHECK(v.attester == "lM");
    REQUIRE(v.att_eqs.size() == 1);
    CHECK(v.att_eqs[0].first == Term::var("xm"));  // attested in the sender's vocabulary
    CHECK(v.att_eqs[0].second == Term::var("xc"));
}

TEST_CASE("a tampered signature fails verification with an error") {
    const char* src = R"(
component lM trusts { } {
  fresh xc = k1 in
  let xm = xc in
  let xsig = sign(xm, wrongkey) in
  sendatt cmo (xm, xsig) .
  nil
}
component lO trusts { lM } {
  recvatt cmo (ym, ysig) .
  if ym = checksign(ysig, pk(skm)) then
  nil
}
system S = new skm . ( lM | lO )
)";
    auto traces = all_traces(parse_system(src));
    REQUIRE(traces.size() == 1);
    CHECK(traces[0].back().kind == Label::Kind::Error);
}

TEST_CASE("labels order deterministically") {
    System s = parse_system(kMetering);
    auto steps = enabled_steps(s);
    REQUIRE(steps.size() == 1);  // only lM can move initially
    CHECK(steps[0].first.kind == Label::Kind::Has);
}

TEST_CASE("the state-space budget aborts oversized explorations") {
    std::string src;
    for (int i = 1; i <= 8; ++i)
        src += "component c" + std::to_string(i) + " trusts { } { fresh x" + std::to_string(i) +
               " = k" + std::to_string(i) + " in fresh y" + std::to_string(i) + " = m" +
               std::to_string(i) + " in nil }\n";
    src += "system S = ( c1 | c2 | c3 | c4 | c5 | c6 | c7 | c8 )";
    ReductionConfig rc;
    rc.max_nodes = 50;
    CHECK_THROWS_AS(all_traces(parse_system(src), rc), StateSpaceBudgetExceeded);
}
