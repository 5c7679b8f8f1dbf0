#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "picon/logic.hpp"

using namespace picon;

static const char* kBilling = R"(
architecture A1 {
  components M, O;
  range i in 1..1;
  has M Xc[i];
  compute M (Xm[i] = Xc[i]);
  receive O from M attest M { Xm[i] = Xc[i] } var Xm[i];
  verifattest O attest M { Xm[i] = Xc[i] };
  compute O (Xtf[i] = F(Xm[i]));
  compute O (Xfee = iter(plus, Xtf));
  trust O M;
}
)";

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

TEST_CASE("the operator obtains the fee but never the raw consumption") {
    for (std::size_t r : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
        Architecture a = parse_architecture(kBilling, {{"i", r}});
        CHECK(eval_arch(a, PropertyFormula::has_all("O", "Xfee")));
        // Xc is derivable from the received Xm values, so privacy fails
        CHECK_FALSE(eval_arch(a, PropertyFormula::has_none("O", "Xc")));
    }
}

TEST_CASE("obfuscating the reading restores privacy") {
    // the operator only ever sees blind(Xc), which no rule can open
    const char* src = R"(
architecture A2 {
  components M, O;
  has M Xc;
  compute M (Xm = blind(Xc));
  receive O from M var Xm;
  compute O (Xfee = F(Xm));
}
)";
    Architecture a = parse_architecture(src);
    CHECK(eval_arch(a, PropertyFormula::has_all("O", "Xfee")));
    CHECK(eval_arch(a, PropertyFormula::has_none("O", "Xc")));
    CHECK_FALSE(eval_arch(a, PropertyFormula::has_none("O", "Xm")));
}

TEST_CASE("hasall needs one reachable state covering every instance") {
    Architecture a = parse_architecture(kBilling, {{"i", 2}});
    CHECK(eval_arch(a, PropertyFormula::has_all("O", "Xm")));   // both received
    CHECK(eval_arch(a, PropertyFormula::has_all("M", "Xc")));
    // M holds the raw readings, so it can construct the fee on its own
    CHECK(eval_arch(a, PropertyFormula::has_all("M", "Xfee")));
    CHECK_FALSE(eval_arch(a, PropertyFormula::has_all("O", "Xq")));  // never bound anywhere
}

TEST_CASE("epistemic facts hold when every endpoint entails them") {
    Architecture a = parse_architecture(kBilling);
    // O verified the attestation, so it knows Xm_1 = Xc_1
    CHECK(eval_arch(a, PropertyFormula::knows("O", Term::var("Xm_1"), Term::var("Xc_1"))));
    // ... and by congruence F(Xm_1) = F(Xc_1)
    CHECK(eval_arch(a, PropertyFormula::knows("O", Term::fun("F", {Term::var("Xm_1")}),
                                              Term::fun("F", {Term::var("Xc_1")}))));
    CHECK_FALSE(eval_arch(a, PropertyFormula::knows("O", Term::var("Xfee"), Term::var("Xc_1"))));
    // M performed the computation itself, so it too knows the equation
    CHECK(eval_arch(a, PropertyFormula::knows("M", Term::var("Xm_1"), Term::var("Xc_1"))));
    // ... but learns nothing about O's tariff function
    CHECK_FALSE(eval_arch(a, PropertyFormula::knows("M", Term::var("Xtf_1"),
                                                    Term::fun("F", {Term::var("Xm_1")}))));
}

TEST_CASE("conjunction evaluates both sides") {
    Architecture a = parse_architecture(kBilling);
    auto t = PropertyFormula::has_all("O", "Xfee");
    auto f = PropertyFormula::has_none("O", "Xc");
    CHECK_FALSE(eval_arch(a, PropertyFormula::conj(t, f)));
    CHECK(eval_arch(a, PropertyFormula::conj(t, t)));
}

TEST_CASE("protocol-level properties mirror the architecture reading") {
    System s = parse_system(kMetering);
    CHECK(eval_sys(s, PropertyFormula::has_all("lO", "xm1")));
    CHECK_FALSE(eval_sys(s, PropertyFormula::has_none("lO", "xc1")));  // same value as xm1
    CHECK(eval_sys(s, PropertyFormula::has_none("lO", "xsig")));
    CHECK(eval_sys(s, PropertyFormula::has_all("lM", "xsig")));
    CHECK(eval_sys(s, PropertyFormula::knows("lM", Term::var("xm1"), Term::var("xc1"))));
}

TEST_CASE("protocol knowledge accounts for verification") {
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
    System s = parse_system(src);
    // verification establishes the equation in the sender's vocabulary
    CHECK(eval_sys(s, PropertyFormula::knows("lO", Term::var("xm"), Term::var("xc"))));
    CHECK_FALSE(eval_sys(s, PropertyFormula::knows("lO", Term::var("xm"), Term::var("xsig"))));
}
