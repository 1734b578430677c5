// Rule file round trips, pattern matching modulo symmetry, and rewrite cascades.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "bklab/errors.hpp"
#include "bklab/rules.hpp"
#include "bklab/weyl.hpp"

#include <random>

using namespace bklab;

namespace {

Slot hs(int l) { return {VType::Holo, l}; }
Slot as(int l) { return {VType::Anti, l}; }

Atom atom(AtomHead h, std::vector<Slot> ss) { return {h, std::move(ss)}; }

RawTerm raw_of(Coefficient c, std::vector<Atom> atoms,
               std::vector<ELetter> exts = {}) {
  RawTerm r;
  r.c = std::move(c);
  r.atoms = std::move(atoms);
  r.exts = std::move(exts);
  return r;
}

Expr expr_of(std::vector<RawTerm> raws) { return to_expr(raws); }

bool has_head(const Expr& e, AtomHead h) {
  for (auto& t : e.terms)
    for (auto& a : t.atoms)
      if (a.head == h) return true;
  return false;
}

const IdentityRuleSet& ruleset() {
  static IdentityRuleSet rs = load_rules(BKLAB_RULES_FILE);
  return rs;
}

}  // namespace

// ===== FILE FORMAT =====

TEST_CASE("rule file round trips bit-exact") {
  const IdentityRuleSet& rs = ruleset();
  CHECK(rs.rules.size() == 14);
  CHECK(format_rules(rs) == rs.source);
  CHECK(rs.hash == fnv1a64(rs.source));

  for (const char* name :
       {"rcliff_expand", "rx_reduce", "trt10_hh", "trt10_pm", "trt10_aa",
        "n2j_hh_mixed_zero", "n2j_aa_mixed_zero", "n2j_pm_hh_zero",
        "n2j_mp_aa_zero", "n2j_pm_product", "n2j_mp_product",
        "n2j_pm_aa_reduce", "n2j_mp_hh_reduce", "d1rl_reduce"}) {
    const IdentityRule* r = rs.find(name);
    REQUIRE(r != nullptr);
    CHECK(r->name == name);
    CHECK(!r->ref.empty());
    CHECK(!r->quote.empty());
    CHECK(r->lhs.atoms.size() == 1);
    CHECK(r->lhs.c == Coefficient::one());
  }
  CHECK(rs.find("no_such_rule") == nullptr);

  // reparsing the printed form is stable
  IdentityRuleSet again = parse_rules(format_rules(rs));
  CHECK(format_rules(again) == rs.source);
  CHECK(again.hash == rs.hash);
}

TEST_CASE("coefficient text round trips") {
  auto roundtrip = [](const Coefficient& c) {
    CAPTURE(c.str());
    CHECK(Coefficient::parse(c.str()) == c);
  };
  roundtrip(Coefficient::zero());
  roundtrip(Coefficient::one());
  roundtrip(-Coefficient::one());
  roundtrip(Coefficient::iunit());
  roundtrip(-Coefficient::iunit());
  roundtrip(Coefficient::frac(1, 2));
  roundtrip(Coefficient::rational(2) * Coefficient::iunit());
  roundtrip(Coefficient::rational(-2) * Coefficient::pi_pow(1) * Coefficient::iunit());
  roundtrip(Coefficient::pi_pow(-1));
  roundtrip(Coefficient::sqrt2() * Coefficient::frac(-3, 4));
  roundtrip(Coefficient::one() + Coefficient::pi_pow(2) * Coefficient::frac(5, 7));

  std::mt19937 rng(911);
  std::uniform_int_distribution<int> num(-6, 6), den(1, 5), piexp(-2, 2), pick(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    Coefficient c = Coefficient::zero();
    int parts = 1 + (trial % 3);
    for (int p = 0; p < parts; ++p) {
      Coefficient piece = Coefficient::pi_pow(piexp(rng), Rational(num(rng), den(rng)));
      int kind = pick(rng);
      if (kind == 1) piece = piece * Coefficient::iunit();
      if (kind == 2) piece = piece * Coefficient::sqrt2();
      if (kind == 3) piece = piece * Coefficient::iunit() * Coefficient::sqrt2();
      c += piece;
    }
    roundtrip(c);
  }

  CHECK_THROWS_AS(Coefficient::parse(""), std::invalid_argument);
  CHECK_THROWS_AS(Coefficient::parse("two"), std::invalid_argument);
  CHECK_THROWS_AS(Coefficient::parse("1 bogus"), std::invalid_argument);
}

TEST_CASE("malformed rule files are rejected") {
  auto bad = [](const std::string& text) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_rules(text), err::InvalidParams);
  };
  bad("lhs [1] RX()\n");
  bad("rule a\nlhs [1] RX()\nend\nend\n");
  bad("rule a\nlhs [1] RX()\n");
  bad("rule a\nlhs [2] RX()\nend\n");
  bad("rule a\nlhs [1] RX() RE(+?u -?v)\nend\n");
  bad("rule a\nlhs [1] BOGUS(+?u)\nend\n");
  bad("rule a\nlhs [1] RE(+?u)\nend\n");
  bad("rule a\nlhs [1] RE(+?u -?v)\nrhs [1] RE(*?u *?x)\nend\n");
  bad("rule a\nlhs [1] RE(+?u -?v)\n\nend\n");
  bad("rule a\nlhs [1] RE(+?u -?v)\nend\n\nrule a\nlhs [1] RX()\nend\n");
  bad("rule a\nlhs [1 RX()\nend\n");
  bad("rule a\nlhs [1] RE(+u -?v)\nend\n");
}

// ===== REWRITING =====

TEST_CASE("mixed second derivative becomes a first derivative product") {
  // anchored instance of the paired-derivative identity
  Expr in = expr_of({raw_of(Coefficient::rational(2) * Coefficient::iunit(),
                            {atom(AtomHead::NABLA2J, {hs(0), as(1), hs(2), as(3)}),
                             atom(AtomHead::D2TAU, {as(0), hs(1)}),
                             atom(AtomHead::D2TAU, {as(2), hs(3)})})});
  Expr want = expr_of({raw_of(Coefficient::rational(2),
                              {atom(AtomHead::NABLAJ, {hs(0), hs(2), hs(4)}),
                               atom(AtomHead::NABLAJ, {as(1), as(3), as(4)}),
                               atom(AtomHead::D2TAU, {as(0), hs(1)}),
                               atom(AtomHead::D2TAU, {as(2), hs(3)})})});
  REQUIRE(!in.is_zero());
  REQUIRE(!want.is_zero());
  CHECK(equal(apply_identities(in, ruleset()), want));
}

TEST_CASE("fiberwise curvature trace expands and cascades") {
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::TRT10, {hs(0), as(1)}),
                             atom(AtomHead::D2TAU, {as(0), hs(1)})})});
  Expr want = expr_of(
      {raw_of(Coefficient::rational(2),
              {atom(AtomHead::RTX, {hs(0), as(1), hs(2), as(2)}),
               atom(AtomHead::D2TAU, {as(0), hs(1)})}),
       raw_of(-Coefficient::one(),
              {atom(AtomHead::NABLAJ, {hs(0), hs(2), hs(3)}),
               atom(AtomHead::NABLAJ, {as(1), as(2), as(3)}),
               atom(AtomHead::D2TAU, {as(0), hs(1)})})});
  REQUIRE(!in.is_zero());
  REQUIRE(!want.is_zero());
  CHECK(equal(apply_identities(in, ruleset()), want));

  // pure-type traces keep only the curvature piece; the anchor pairs the
  // trace arguments into two structurally distinct positions so that the
  // antisymmetry of the trace cannot collapse the whole term
  Expr hh = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::TRT10, {hs(0), hs(1)}),
                             atom(AtomHead::D2RL, {as(0), hs(2), as(1), hs(2)})})});
  Expr hh_want =
      expr_of({raw_of(Coefficient::rational(2),
                      {atom(AtomHead::RTX, {hs(0), hs(1), hs(3), as(3)}),
                       atom(AtomHead::D2RL, {as(0), hs(2), as(1), hs(2)})})});
  REQUIRE(!hh.is_zero());
  REQUIRE(!hh_want.is_zero());
  CHECK(equal(apply_identities(hh, ruleset()), hh_want));
}

TEST_CASE("scalar curvature reduces to curvature and torsion contractions") {
  Expr in = expr_of({raw_of(Coefficient::one(), {atom(AtomHead::RX, {})})});
  Expr want = expr_of(
      {raw_of(Coefficient::rational(8),
              {atom(AtomHead::RTX, {hs(0), as(1), hs(1), as(0)})}),
       raw_of(Coefficient::rational(-4),
              {atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)}),
               atom(AtomHead::NABLAJ, {as(0), as(1), as(2)})})});
  REQUIRE(!want.is_zero());
  CHECK(equal(apply_identities(in, ruleset()), want));
}

TEST_CASE("line bundle derivative reduces to the torsion tensor") {
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::D1RL, {as(0), as(1), as(2)}),
                             atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)})})});
  Expr want = expr_of(
      {raw_of(Coefficient::rational(-2) * Coefficient::pi_pow(1) * Coefficient::iunit(),
              {atom(AtomHead::NABLAJ, {as(0), as(1), as(2)}),
               atom(AtomHead::NABLAJ, {hs(0), hs(1), hs(2)})})});
  REQUIRE(!in.is_zero());
  REQUIRE(!want.is_zero());
  CHECK(equal(apply_identities(in, ruleset()), want));
}

TEST_CASE("clifford curvature expansion cancels its scalar piece") {
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::RCLIFF, {hs(0), as(1)}),
                             atom(AtomHead::D2TAU, {as(0), hs(1)})})});
  Atom anchor = atom(AtomHead::D2TAU, {as(0), hs(1)});
  Expr want = expr_of(
      {raw_of(Coefficient::one(),
              {atom(AtomHead::RTX, {hs(0), as(1), hs(2), hs(3)}), anchor},
              {{EKind::AN, 2}, {EKind::AN, 3}}),
       raw_of(Coefficient::one(),
              {atom(AtomHead::RTX, {hs(0), as(1), as(2), as(3)}), anchor},
              {{EKind::CR, 2}, {EKind::CR, 3}}),
       raw_of(Coefficient::rational(2),
              {atom(AtomHead::RTX, {hs(0), as(1), hs(2), as(3)}), anchor},
              {{EKind::CR, 3}, {EKind::AN, 2}}),
       raw_of(Coefficient::frac(-1, 2),
              {atom(AtomHead::NABLAJ, {hs(0), hs(2), hs(3)}),
               atom(AtomHead::NABLAJ, {as(1), as(2), as(3)}), anchor})});
  REQUIRE(!in.is_zero());
  REQUIRE(!want.is_zero());
  Expr got = apply_identities(in, ruleset());
  CHECK(equal(got, want));
  CHECK(!has_head(got, AtomHead::RCLIFF));
  CHECK(!has_head(got, AtomHead::TRT10));
}

TEST_CASE("type vanishing rules erase whole terms") {
  // pure last pairs are anchored into structurally distinct positions of an
  // opaque head, so the inputs survive canonicalization and only the rules
  // can erase them
  struct Case {
    std::vector<Slot> n2j;
    Atom a1, a2;
  };
  std::vector<Case> cases = {
      {{hs(0), hs(1), hs(2), as(3)},
       atom(AtomHead::D2TAU, {as(0), as(1)}),
       atom(AtomHead::D2TAU, {as(2), hs(3)})},
      {{hs(0), hs(1), as(2), hs(3)},
       atom(AtomHead::D2TAU, {as(0), as(1)}),
       atom(AtomHead::D2TAU, {hs(2), as(3)})},
      {{as(0), as(1), hs(2), as(3)},
       atom(AtomHead::D2TAU, {hs(0), hs(1)}),
       atom(AtomHead::D2TAU, {as(2), hs(3)})},
      {{as(0), as(1), as(2), hs(3)},
       atom(AtomHead::D2TAU, {hs(0), hs(1)}),
       atom(AtomHead::D2TAU, {hs(2), as(3)})},
      {{hs(0), as(1), hs(2), hs(3)},
       atom(AtomHead::D2TAU, {as(0), hs(1)}),
       atom(AtomHead::D2RL, {as(2), hs(4), as(3), hs(4)})},
      {{as(0), hs(1), as(2), as(3)},
       atom(AtomHead::D2TAU, {hs(0), as(1)}),
       atom(AtomHead::D2RL, {hs(2), as(4), hs(3), as(4)})},
  };
  for (auto& k : cases) {
    Expr in = expr_of({raw_of(Coefficient::one(),
                              {atom(AtomHead::NABLA2J, k.n2j), k.a1, k.a2})});
    CAPTURE(to_string(in));
    REQUIRE(!in.is_zero());
    Expr got = apply_identities(in, ruleset());
    CHECK(got.terms.empty());
  }
}

TEST_CASE("patterns match through the symmetry orbit with the right sign") {
  // swapping the last argument pair flips the sign before the product rule fires
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::NABLA2J, {hs(0), as(1), as(2), hs(3)}),
                             atom(AtomHead::D2TAU, {as(0), hs(1)}),
                             atom(AtomHead::D2TAU, {hs(2), as(3)})})});
  Expr want = expr_of({raw_of(Coefficient::iunit(),
                              {atom(AtomHead::NABLAJ, {hs(0), hs(3), hs(4)}),
                               atom(AtomHead::NABLAJ, {as(1), as(2), as(4)}),
                               atom(AtomHead::D2TAU, {as(0), hs(1)}),
                               atom(AtomHead::D2TAU, {hs(2), as(3)})})});
  REQUIRE(!in.is_zero());
  REQUIRE(!want.is_zero());
  CHECK(equal(apply_identities(in, ruleset()), want));

  // the first-pair difference reduces to the curvature commutator: the
  // direct order hits the reduce rule, the swapped order hits a zero rule
  Atom danchor = atom(AtomHead::D2RL, {hs(2), as(4), hs(3), hs(4)});
  Expr diff = expr_of(
      {raw_of(Coefficient::one(),
              {atom(AtomHead::NABLA2J, {hs(0), as(1), as(2), as(3)}),
               atom(AtomHead::D2TAU, {as(0), hs(1)}), danchor}),
       raw_of(-Coefficient::one(),
              {atom(AtomHead::NABLA2J, {as(1), hs(0), as(2), as(3)}),
               atom(AtomHead::D2TAU, {as(0), hs(1)}), danchor})});
  Expr dwant = expr_of({raw_of(Coefficient::rational(-2) * Coefficient::iunit(),
                               {atom(AtomHead::RTX, {hs(0), as(1), as(2), as(3)}),
                                atom(AtomHead::D2TAU, {as(0), hs(1)}), danchor})});
  REQUIRE(!diff.is_zero());
  REQUIRE(!dwant.is_zero());
  CHECK(equal(apply_identities(diff, ruleset()), dwant));
}

TEST_CASE("rewriting cascades to a fixpoint with no reducible heads left") {
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::RCLIFF, {hs(0), as(0)}),
                             atom(AtomHead::RX, {}),
                             atom(AtomHead::D1RL, {as(1), as(2), as(3)}),
                             atom(AtomHead::NABLAJ, {hs(1), hs(2), hs(3)})})});
  Expr got = apply_identities(in, ruleset());
  CHECK(!got.terms.empty());
  for (AtomHead h : {AtomHead::RCLIFF, AtomHead::RX, AtomHead::TRT10,
                     AtomHead::NABLA2J, AtomHead::D1RL})
    CHECK(!has_head(got, h));
  CHECK(equal(apply_identities(got, ruleset()), got));
}

TEST_CASE("rule name filters select a subset") {
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::TRT10, {hs(0), as(1)}),
                             atom(AtomHead::NABLA2J, {hs(2), as(3), hs(4), as(5)}),
                             atom(AtomHead::D2TAU, {as(0), hs(1)}),
                             atom(AtomHead::D2TAU, {as(2), hs(3)}),
                             atom(AtomHead::D2TAU, {as(4), hs(5)})})});
  REQUIRE(!in.is_zero());

  Expr only_tr = apply_identities(in, ruleset(), {"trt10_pm"});
  CHECK(!has_head(only_tr, AtomHead::TRT10));
  CHECK(has_head(only_tr, AtomHead::NABLA2J));

  Expr untouched = apply_identities(in, ruleset(), {});
  CHECK(equal(untouched, canonicalize(in)));

  CHECK_THROWS_AS(apply_identities(in, ruleset(), {"nope"}), err::InvalidParams);
}

TEST_CASE("a non-terminating ruleset hits the step budget") {
  IdentityRuleSet loop = parse_rules(
      "rule re_loop\n"
      "lhs [1] RE(*?u *?v)\n"
      "rhs [2] RE(*?u *?v)\n"
      "ref none\n"
      "quote synthetic loop for the budget check\n"
      "end\n");
  Expr in = expr_of({raw_of(Coefficient::one(),
                            {atom(AtomHead::RE, {hs(0), as(1)}),
                             atom(AtomHead::D2TAU, {as(0), hs(1)})})});
  CHECK_THROWS_AS(apply_identities(in, loop), err::NonTerminating);
}
