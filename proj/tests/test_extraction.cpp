#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>

#include "picon/extraction.hpp"

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

static std::set<std::string> rendered_relations(const Architecture& a) {
    std::set<std::string> out;
    for (const auto& r : a.relations) out.insert(to_string(r));
    return out;
}

TEST_CASE("extraction of the metering protocol is exact") {
    Architecture a = extract_architecture(parse_system(kMetering));
    CHECK(rendered_relations(a) ==
          std::set<std::string>{
              "has lM xc1",
              "compute lM (xm1 = xc1)",
              "receive lO from lM attest lM { xm1 = xc1 } var xm1",
              "trust lO lM",
          });
    CHECK(a.components == std::vector<std::string>{"lM", "lO"});
}

TEST_CASE("signature plumbing never becomes a compute relation") {
    Architecture a = extract_architecture(parse_system(kMetering));
    for (const auto& r : a.relations)
        if (r.kind == Relation::Kind::Compute) CHECK(r.var != "xsig");
}

TEST_CASE("verified attestations extract to verifattest under trust") {
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
  let xtf = F(ym) in
  nil
}
system S = new skm . ( lM | lO )
)";
    Architecture a = extract_architecture(parse_system(src));
    CHECK(rendered_relations(a) ==
          std::set<std::string>{
              "has lM xc",
              "compute lM (xm = xc)",
              "receive lO from lM attest lM { xm = xc } var ym",
              "verifattest lO attest lM { xm = xc }",
              "compute lO (xtf = F(ym))",
              "trust lO lM",
          });
}

TEST_CASE("verification without trust extracts no verifattest") {
    const char* src = R"(
component lM trusts { } {
  fresh xc = k1 in
  let xm = xc in
  let xsig = sign(xm, skm) in
  sendatt cmo (xm, xsig) .
  nil
}
component lO trusts { } {
  recvatt cmo (ym, ysig) .
  if ym = checksign(ysig, pk(skm)) then
  nil
}
system S = new skm . ( lM | lO )
)";
    Architecture a = extract_architecture(parse_system(src));
    for (const auto& r : a.relations) CHECK(r.kind != Relation::Kind::VerifAttest);
}

TEST_CASE("plain messages extract to unattested receives") {
    const char* src = R"(
component a trusts { } { fresh x = k in send ch x . nil }
component b trusts { } { recv ch (y) . nil }
system S = ( a | b )
)";
    Architecture arch = extract_architecture(parse_system(src));
    CHECK(rendered_relations(arch) ==
          std::set<std::string>{"has a x", "receive b from a var y"});
}

TEST_CASE("checks extract to check relations") {
    const char* src = R"(
component a trusts { } {
  fresh x = k in
  let y = x in
  if x = y then
  nil
}
system S = a
)";
    Architecture arch = extract_architecture(parse_system(src));
    CHECK(rendered_relations(arch) ==
          std::set<std::string>{"has a x", "compute a (y = x)", "check a (x = y)"});
}

TEST_CASE("error branches contribute nothing") {
    const char* src = R"(
component a trusts { } {
  fresh x = k in
  fresh y = k2 in
  if x = y then
  let z = f(x) in
  nil
}
system S = a
)";
    Architecture arch = extract_architecture(parse_system(src));
    CHECK(rendered_relations(arch) == std::set<std::string>{"has a x", "has a y"});
}

TEST_CASE("extraction is a fixpoint independent of trace order") {
    System s = parse_system(kMetering);
    auto traces = all_traces(s);
    std::vector<Label> labels;
    for (const auto& tr : traces) labels.insert(labels.end(), tr.begin(), tr.end());

    Architecture ref = extract_architecture(s);
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(labels.begin(), labels.end(), rng);
        ExtractionContext ctx;
        ctx.relations = initial_trust(s);
        bool changed = true;
        while (changed) {
            std::size_t before = ctx.relations.size();
            for (const auto& l : labels) extract_label(l, ctx);
            changed = ctx.relations.size() != before;
        }
        CHECK(ctx.relations == ref.relations);
    }
}

TEST_CASE("the extracted theory covers the observed symbols") {
    const char* src = R"(
component a trusts { } { fresh x = k in let y = g(x, x) in nil }
system S = a
)";
    Architecture arch = extract_architecture(parse_system(src));
    CHECK(arch.theory.functions.at("g").arity == 2);
}
