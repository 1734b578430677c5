#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bklab/fock.hpp"
#include "bklab/poly_kernel.hpp"
#include "bklab/weyl.hpp"

#include <random>

using namespace bklab;

namespace {

Expr word_expr(std::vector<Gen> gens, Coefficient c = Coefficient::one()) {
  RawTerm r;
  r.c = std::move(c);
  r.gens = std::move(gens);
  return to_expr({r});
}

Expr hand(std::vector<Term> terms) {
  Expr e;
  e.terms = std::move(terms);
  return canonicalize(e);
}

Term gen_term(Coefficient c, GenWord g, bool proj = false) {
  Term t;
  t.c = std::move(c);
  t.gen = std::move(g);
  t.ext.proj = proj;
  return t;
}

// columns whose degree leaves room for `len` raising letters are exact
bool matrices_agree(const FockSpace& F, const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                    int len, double tol = 1e-9) {
  double scale = 1.0;
  for (int c = 0; c < F.dim(); ++c) {
    if (F.degree(c) + len > F.cutoff) continue;
    scale = std::max(scale, A.col(c).cwiseAbs().maxCoeff());
  }
  for (int c = 0; c < F.dim(); ++c) {
    if (F.degree(c) + len > F.cutoff) continue;
    if ((A.col(c) - B.col(c)).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

std::vector<Gen> random_word(std::mt19937& rng, int maxlen = 5) {
  std::uniform_int_distribution<int> len(1, maxlen), kind(0, 3), lab(0, 1);
  GKind kinds[4] = {GKind::B, GKind::Z, GKind::ZB, GKind::BP};
  std::vector<Gen> w;
  int L = len(rng);
  for (int i = 0; i < L; ++i) w.push_back({kinds[kind(rng)], lab(rng)});
  return w;
}

std::string word_str(const std::vector<Gen>& w) {
  const char* names[] = {"b", "z", "zb", "zp", "zbp", "bp"};
  std::string s;
  for (auto& g : w) {
    s += names[static_cast<int>(g.k)];
    s += "(" + std::to_string(g.label) + ") ";
  }
  return s;
}

}  // namespace

// ===== normal ordering =====

namespace {

// anchor two once-used labels with a tensor so the delta branch keeps a home
Term anchored_pair(Coefficient c, GenWord g) {
  Term t = gen_term(std::move(c), std::move(g));
  t.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}}}};
  return t;
}

}  // namespace

TEST_CASE("frozen commutation branches") {
  // z_u b_v T_uv = b_v z_u T_uv + 2 T_uu
  auto rel = [](GKind x, GKind y, Coefficient delta) {
    RawTerm r;
    r.c = Coefficient::one();
    r.gens = {{x, 0}, {y, 1}};
    r.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}}}};
    Expr e = to_expr({r});
    GenWord flat;
    flat.list(y).push_back(1);
    flat.list(x).push_back(0);
    Term contracted = gen_term(std::move(delta), GenWord{});
    contracted.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 0}}}};
    contracted.ndum = 1;
    Expr want = hand({anchored_pair(Coefficient::one(), flat), contracted});
    CHECK(equal(e, want));
  };
  rel(GKind::Z, GKind::B, Coefficient::rational(2));
  rel(GKind::BP, GKind::B, Coefficient::pi_pow(1, Rational(4)));
  rel(GKind::BP, GKind::ZB, Coefficient::rational(2));

  // flat pairs commute with no contraction branch
  RawTerm r;
  r.c = Coefficient::one();
  r.gens = {{GKind::ZB, 0}, {GKind::B, 1}};
  r.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}}}};
  GenWord flat;
  flat.b = {1};
  flat.zb = {0};
  CHECK(equal(to_expr({r}), hand({anchored_pair(Coefficient::one(), flat)})));

  // an unanchored contraction would emit a bare dimension factor
  CHECK_THROWS_AS(word_expr({{GKind::Z, 0}, {GKind::B, 0}}), err::NeedExplicitDimension);
  CHECK_THROWS_AS(word_expr({{GKind::Z, 0}, {GKind::B, 1}}), err::NeedExplicitDimension);
}

TEST_CASE("normal ordering against the matrix model") {
  FockSpace F(2, 6);
  std::mt19937 rng(923);
  int done = 0, skipped = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto w = random_word(rng, 4);
    RawTerm raw;
    raw.c = Coefficient::one();
    raw.gens = w;
    Expr nf;
    try {
      nf = to_expr({raw});
    } catch (const err::NeedExplicitDimension&) {
      ++skipped;
      continue;
    }
    // Einstein-sum the input word directly
    std::vector<int> labels;
    for (auto& g : w) labels.push_back(g.label);
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    Eigen::MatrixXcd lhs = Eigen::MatrixXcd::Zero(F.dim(), F.dim());
    int nl = static_cast<int>(labels.size());
    std::vector<int> dirs(static_cast<size_t>(std::max(nl, 1)), 0);
    std::vector<int> dir_of_label(2, 0);
    while (true) {
      for (int i = 0; i < nl; ++i)
        dir_of_label[static_cast<size_t>(labels[static_cast<size_t>(i)])] =
            dirs[static_cast<size_t>(i)];
      lhs += word_matrix(F, w, dir_of_label);
      int q = 0;
      for (; q < nl; ++q) {
        if (++dirs[static_cast<size_t>(q)] < F.n) break;
        dirs[static_cast<size_t>(q)] = 0;
      }
      if (q == nl) break;
    }
    Eigen::MatrixXcd rhs = expr_matrix(F, nf);
    REQUIRE(matrices_agree(F, lhs, rhs, static_cast<int>(w.size())));
    ++done;
  }
  CHECK(done >= 35);
  CHECK(done + skipped == 60);
}

TEST_CASE("normal ordering confluence") {
  // all insertion orders of a word agree after canonicalization
  std::mt19937 rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    auto w = random_word(rng, 8);
    RawTerm raw;
    raw.c = Coefficient::one();
    raw.gens = w;
    Expr direct;
    try {
      direct = to_expr({raw});
    } catch (const err::NeedExplicitDimension&) {
      continue;
    }
    // split the word at every point and multiply the halves
    for (size_t cut = 1; cut + 1 < w.size(); ++cut) {
      RawTerm a, b;
      a.c = b.c = Coefficient::one();
      a.gens.assign(w.begin(), w.begin() + static_cast<long>(cut));
      b.gens.assign(w.begin() + static_cast<long>(cut), w.end());
      // keep each label wholly on one side: multiply() relabels the sides
      std::map<int, int> left, right;
      bool split_ok = true;
      for (auto& g : a.gens) left[g.label] = 1;
      for (auto& g : b.gens) right[g.label] = 1;
      for (auto& [l, _] : left)
        if (right.count(l)) split_ok = false;
      if (!split_ok) continue;
      // compact labels per side so multiply's shift keeps them distinct
      std::map<int, int> ra, rb;
      for (auto& g : a.gens) {
        if (!ra.count(g.label)) ra[g.label] = static_cast<int>(ra.size());
        g.label = ra[g.label];
      }
      for (auto& g : b.gens) {
        if (!rb.count(g.label)) rb[g.label] = static_cast<int>(rb.size());
        g.label = rb[g.label];
      }
      try {
        Expr ea = to_expr({a}), eb = to_expr({b});
        Expr prod = multiply(ea, eb);
        INFO("word: ", word_str(w), " cut: ", cut);
        INFO("direct:  ", to_string(direct));
        INFO("product: ", to_string(prod));
        CHECK(equal(direct, prod));
      } catch (const err::NeedExplicitDimension&) {
        // a contraction order pinned a dimension factor; compare nothing
      }
    }
  }
}

// ===== adjoints =====

TEST_CASE("adjoint is an involutive antihomomorphism") {
  std::mt19937 rng(4711);
  FockSpace F(2, 6);
  int done = 0;
  for (int trial = 0; trial < 60 && done < 25; ++trial) {
    RawTerm ra, rb;
    ra.c = Coefficient::frac(1, 2);
    rb.c = Coefficient::iunit();
    ra.gens = random_word(rng, 3);
    rb.gens = random_word(rng, 3);
    Expr A, B, AB, adjA, adjB;
    try {
      A = to_expr({ra});
      B = to_expr({rb});
      AB = multiply(A, B);
      adjA = formal_adjoint(A);
      adjB = formal_adjoint(B);
      INFO("wa: ", word_str(ra.gens), " wb: ", word_str(rb.gens));
      INFO("adj(AB):      ", to_string(formal_adjoint(AB)));
      INFO("adjB * adjA:  ", to_string(multiply(adjB, adjA)));
      CHECK(equal(formal_adjoint(AB), multiply(adjB, adjA)));
      CHECK(equal(formal_adjoint(adjA), A));
      // matrix check: adjoint = conjugate transpose in the orthonormal basis
      Eigen::MatrixXcd MA = expr_matrix(F, A);
      Eigen::MatrixXcd MAd = expr_matrix(F, adjA);
      int len = static_cast<int>(ra.gens.size());
      double scale = 1.0 + MA.cwiseAbs().maxCoeff();
      for (int r = 0; r < F.dim(); ++r)
        for (int c = 0; c < F.dim(); ++c) {
          if (F.degree(r) + len > F.cutoff || F.degree(c) + len > F.cutoff) continue;
          REQUIRE(std::abs(MAd(r, c) - std::conj(MA(c, r))) < 1e-9 * scale);
        }
      ++done;
    } catch (const err::NeedExplicitDimension&) {
      continue;
    }
  }
  CHECK(done >= 25);
}

// ===== state calculus =====

TEST_CASE("ground kernel rules") {
  // b+ kills the ground kernel
  CHECK(apply_to_PN(word_expr({{GKind::BP, 0}})).is_zero());
  // zb_u P = (1/2pi) b_u P + zb'_u P
  Expr e = apply_to_PN(word_expr({{GKind::ZB, 0}}));
  Expr want = hand({gen_term(Coefficient::pi_pow(-1, Rational::frac(1, 2)),
                             GenWord{{0}, {}, {}, {}, {}, {}}, true),
                    gen_term(Coefficient::one(), GenWord{{}, {}, {}, {}, {0}, {}}, true)});
  CHECK(equal(e, want));
  // level counting and eigenvalue: (b b+) acting on b P gives 4 pi b P
  Expr state = hand({gen_term(Coefficient::one(), GenWord{{0}, {}, {}, {}, {}, {}}, true)});
  Expr L0like = word_expr({{GKind::B, 0}, {GKind::BP, 0}});
  CHECK(equal(apply_to_state(L0like, state), state.scaled(Coefficient::pi_pow(1, Rational(4)))));
  // on a two-quantum state the eigenvalue doubles
  Expr st2 = hand({gen_term(Coefficient::one(), GenWord{{0, 1}, {}, {}, {}, {}, {}}, true)});
  CHECK(equal(apply_to_state(L0like, st2), st2.scaled(Coefficient::pi_pow(1, Rational(8)))));
  CHECK(state_level(st2.terms[0]) == 2);
}

TEST_CASE("projections and resolvent") {
  Expr mixed = hand({gen_term(Coefficient::one(), GenWord{{0}, {0}, {}, {}, {}, {}}, true),
                     gen_term(Coefficient::rational(3), GenWord{}, true)});
  CHECK(project_kernel(mixed).terms.size() == 1);
  CHECK(project_excited(mixed).terms.size() == 1);
  Expr ex = project_excited(mixed);
  Expr res = resolvent_apply(ex);
  CHECK(equal(res, ex.scaled(Coefficient::pi_pow(-1, Rational::frac(1, 4)))));
  CHECK_THROWS_AS(resolvent_apply(mixed), err::DivisionByZeroEigenvalue);

  Expr lvl2 = hand({gen_term(Coefficient::one(), GenWord{{0, 1}, {0, 1}, {}, {}, {}, {}}, true)});
  CHECK(equal(resolvent_apply(lvl2), lvl2.scaled(Coefficient::pi_pow(-1, Rational::frac(1, 8)))));
}

namespace {

// state term with every generator label anchored on a symmetric tensor slot
Term tensor_state(Coefficient c, GenWord g, std::vector<std::pair<int, int>> anchors) {
  Term t = gen_term(std::move(c), std::move(g), true);
  for (auto [p, q] : anchors)
    t.atoms.push_back(Atom{AtomHead::D2TAU, {Slot{VType::Holo, p}, Slot{VType::Holo, q}}});
  return t;
}

}  // namespace

TEST_CASE("frozen evaluations") {
  // one cross pairing: b_u z_v T_uv -> -2 T_uu
  Expr bz = hand({tensor_state(Coefficient::one(), GenWord{{0}, {1}, {}, {}, {}, {}}, {{0, 1}})});
  CHECK(equal(eval_origin(bz),
              hand({tensor_state(Coefficient::rational(-2), GenWord{}, {{0, 0}})})));

  // two raising and two holomorphic letters: both matchings land on the same
  // canonical tensor chain, 2 * (-2)^2
  Expr b2z2 = hand({tensor_state(Coefficient::one(), GenWord{{0, 1}, {2, 3}, {}, {}, {}, {}},
                                 {{0, 1}, {2, 3}})});
  CHECK(equal(eval_origin(b2z2),
              hand({tensor_state(Coefficient::rational(8), GenWord{}, {{0, 1}, {0, 1}})})));

  // unmatched letters keep the origin value at zero
  Expr bpair = hand({tensor_state(Coefficient::one(), GenWord{{0, 1}, {}, {}, {}, {}, {}},
                                  {{0, 1}})});
  CHECK(eval_origin(bpair).is_zero());

  // a pairing that would erase its label entirely carries a dimension sum
  Expr loose = hand({gen_term(Coefficient::one(), GenWord{{0}, {0}, {}, {}, {}, {}}, true)});
  CHECK_THROWS_AS(eval_origin(loose), err::NeedExplicitDimension);

  // left evaluation turns leftover raising letters into -2 pi zbar'
  CHECK(equal(eval_left_origin(bpair),
              hand({tensor_state(Coefficient::pi_pow(2, Rational(4)),
                                 GenWord{{}, {}, {}, {}, {0, 1}, {}}, {{0, 1}})})));
  // mixed: one letter pairs, one survives; both choices stay distinct terms
  Expr b2z1 = hand({tensor_state(Coefficient::one(), GenWord{{0, 1}, {2}, {}, {}, {3}, {}},
                                 {{0, 2}, {1, 3}})});
  CHECK(equal(eval_left_origin(b2z1),
              hand({tensor_state(Coefficient::pi_pow(1, Rational(4)),
                                 GenWord{{}, {}, {}, {}, {1, 3}, {}}, {{2, 2}, {1, 3}}),
                    tensor_state(Coefficient::pi_pow(1, Rational(4)),
                                 GenWord{{}, {}, {}, {}, {0, 3}, {}}, {{0, 2}, {2, 3}})})));

  // right evaluation branches over partial pairings
  CHECK(equal(eval_right_origin(bz),
              hand({tensor_state(Coefficient::pi_pow(1, Rational(2)),
                                 GenWord{{}, {1}, {0}, {}, {}, {}}, {{0, 1}}),
                    tensor_state(Coefficient::rational(-2), GenWord{}, {{0, 0}})})));
  CHECK(equal(eval_right_origin(bpair),
              hand({tensor_state(Coefficient::pi_pow(2, Rational(4)),
                                 GenWord{{}, {}, {0, 1}, {}, {}, {}}, {{0, 1}})})));
}

TEST_CASE("state calculus against the polynomial model") {
  std::mt19937 rng(2718);
  const int n = 2;

  // random numeric values for the anchor tensors, symmetric in the slots
  std::map<std::vector<int>, std::complex<double>> vals;
  std::mt19937 vrng(99);
  auto atom_value = [&](const Atom& a, const std::vector<int>& dir) {
    std::vector<int> key{static_cast<int>(a.head)};
    std::vector<int> ds;
    for (auto& s : a.slots) ds.push_back(dir[static_cast<size_t>(s.label)]);
    std::sort(ds.begin(), ds.end());
    key.insert(key.end(), ds.begin(), ds.end());
    auto it = vals.find(key);
    if (it == vals.end()) {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      it = vals.emplace(key, std::complex<double>(u(vrng), u(vrng))).first;
    }
    return it->second;
  };
  auto apply_letters = [&](const std::vector<Gen>& letters, const std::vector<int>& dir) {
    PolyKernel p = PolyKernel::unit(n);
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
      p = pk::act_gen(p, it->k, dir[static_cast<size_t>(it->label)]);
    return p;
  };
  // Einstein sum over directions with numeric anchor values
  auto nv = [&](const Expr& e) {
    PolyKernel acc(n);
    for (auto& t : e.terms) {
      int nl = t.ndum;
      std::vector<int> dir(static_cast<size_t>(std::max(nl, 1)), 0);
      while (true) {
        std::complex<double> w = t.c.to_complex();
        for (auto& a : t.atoms) w *= atom_value(a, dir);
        std::vector<Gen> letters;
        for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
          for (int l : t.gen.list(k)) letters.push_back({k, l});
        acc = acc.plus(apply_letters(letters, dir).scaled(w));
        int q = 0;
        for (; q < nl; ++q) {
          if (++dir[static_cast<size_t>(q)] < n) break;
          dir[static_cast<size_t>(q)] = 0;
        }
        if (q == nl) break;
      }
    }
    return acc;
  };

  std::uniform_int_distribution<int> halflen(1, 2), kind(0, 3);
  GKind kinds[4] = {GKind::B, GKind::Z, GKind::ZB, GKind::BP};
  for (int trial = 0; trial < 40; ++trial) {
    // a random word of fresh labels, every label anchored on a tensor slot
    int L = 2 * halflen(rng);
    RawTerm raw;
    raw.c = Coefficient::frac(1, 3);
    for (int i = 0; i < L; ++i) raw.gens.push_back({kinds[kind(rng)], i});
    for (int i = 0; i < L; i += 2)
      raw.atoms.push_back(
          Atom{AtomHead::D2TAU, {Slot{VType::Holo, i}, Slot{VType::Holo, i + 1}}});
    std::shuffle(raw.gens.begin(), raw.gens.end(), rng);

    Expr op = to_expr({raw});
    Expr st = apply_to_PN(op);

    // the same word acting on the unit kernel, letter by letter
    PolyKernel direct(n);
    {
      std::vector<int> dir(static_cast<size_t>(L), 0);
      while (true) {
        std::complex<double> w = raw.c.to_complex();
        for (auto& a : raw.atoms) w *= atom_value(a, dir);
        direct = direct.plus(apply_letters(raw.gens, dir).scaled(w));
        int q = 0;
        for (; q < L; ++q) {
          if (++dir[static_cast<size_t>(q)] < n) break;
          dir[static_cast<size_t>(q)] = 0;
        }
        if (q == L) break;
      }
    }
    INFO("word: ", word_str(raw.gens));
    REQUIRE(nv(st).max_abs_diff(direct) < 1e-9);

    // evaluations agree with restrictions of the polynomial
    CHECK(std::abs(pk::const_coeff(nv(eval_origin(st))) - pk::const_coeff(direct)) < 1e-9);
    REQUIRE(nv(eval_left_origin(st)).max_abs_diff(pk::restrict_left(direct)) < 1e-9);
    REQUIRE(nv(eval_right_origin(st)).max_abs_diff(pk::restrict_right(direct)) < 1e-9);
  }
}

TEST_CASE("composition over the gaussian measure") {
  CHECK(gaussian_moment(2, 2) == Coefficient::pi_pow(-2, Rational(2)));
  CHECK(gaussian_moment(1, 2).is_zero());
  CHECK(gaussian_moment(0, 0) == Coefficient::one());

  // atom-anchored pair: two pairings of 1/pi each
  Expr f = hand({[] {
    Term t = gen_term(Coefficient::one(), GenWord{{}, {0, 1}, {}, {}, {}, {}}, true);
    t.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}}}};
    return t;
  }()});
  Expr g = hand({[] {
    Term t = gen_term(Coefficient::one(), GenWord{{}, {}, {0, 1}, {}, {}, {}}, true);
    t.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Anti, 0}, Slot{VType::Anti, 1}}}};
    return t;
  }()});
  Expr comp = compose_at_origin(g, f);
  Expr want = hand({[] {
    Term t = gen_term(Coefficient::pi_pow(-2, Rational(2)), GenWord{}, true);
    t.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Anti, 0}, Slot{VType::Anti, 1}}},
               Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}}}};
    return t;
  }()});
  CHECK(equal(comp, want));

  // a mutual pairing that erases its label carries a dimension sum
  Expr zs = hand({gen_term(Coefficient::one(), GenWord{{}, {0, 0}, {}, {}, {}, {}}, true)});
  Expr zbs = hand({gen_term(Coefficient::one(), GenWord{{}, {}, {0, 0}, {}, {}, {}}, true)});
  CHECK_THROWS_AS(compose_at_origin(zbs, zs), err::NeedExplicitDimension);

  // four letters, two anchors on each side: pairings group into two
  // topologies, bubble pairs (8 matchings) and a single 4-cycle (16)
  auto anchored = [](bool bar, std::vector<std::pair<int, int>> atom_labels) {
    GenWord w;
    std::vector<Atom> atoms;
    for (auto [p, q] : atom_labels) {
      (bar ? w.zb : w.z).push_back(p);
      (bar ? w.zb : w.z).push_back(q);
      VType vt = bar ? VType::Anti : VType::Holo;
      atoms.push_back(Atom{AtomHead::D2TAU, {Slot{vt, p}, Slot{vt, q}}});
    }
    Term t = gen_term(Coefficient::one(), w, true);
    t.atoms = std::move(atoms);
    return t;
  };
  Expr f4 = hand({anchored(false, {{0, 1}, {2, 3}})});
  Expr g4 = hand({anchored(true, {{0, 1}, {2, 3}})});
  Expr comp4 = compose_at_origin(g4, f4);
  Expr want4 = hand({[] {
                       Term t = gen_term(Coefficient::pi_pow(-4, Rational(8)), GenWord{}, true);
                       t.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Anti, 0}, Slot{VType::Anti, 1}}},
                                  Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 1}}},
                                  Atom{AtomHead::D2TAU, {Slot{VType::Anti, 2}, Slot{VType::Anti, 3}}},
                                  Atom{AtomHead::D2TAU, {Slot{VType::Holo, 2}, Slot{VType::Holo, 3}}}};
                       return t;
                     }(),
                     [] {
                       Term t = gen_term(Coefficient::pi_pow(-4, Rational(16)), GenWord{}, true);
                       t.atoms = {Atom{AtomHead::D2TAU, {Slot{VType::Anti, 0}, Slot{VType::Anti, 1}}},
                                  Atom{AtomHead::D2TAU, {Slot{VType::Anti, 2}, Slot{VType::Anti, 3}}},
                                  Atom{AtomHead::D2TAU, {Slot{VType::Holo, 0}, Slot{VType::Holo, 2}}},
                                  Atom{AtomHead::D2TAU, {Slot{VType::Holo, 1}, Slot{VType::Holo, 3}}}};
                       return t;
                     }()});
  CHECK(equal(comp4, want4));
}
