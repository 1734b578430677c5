#pragma once

// Identity rewrite rules over tensor atoms, loaded from a data file.
//
// Each rule rewrites one atom (matched modulo its slot symmetry group, with
// sign) into a sum of replacement terms that may introduce fresh contraction
// labels and exterior letters.  Every rule strictly lowers a rank on the atom
// multiset, so repeated application terminates; a step budget guards against
// a bad rule file.
//
// File format, one record per rule, blocks separated by a blank line:
//
//   rule <name>
//   lhs [<coefficient>] HEAD(<slot> <slot> ...)
//   rhs [<coefficient>] HEAD(...) ... w^?x i_?y I     (one line per term)
//   ref <tag>
//   quote <source anchor, single line>
//   end
//
// Slots are +?x (holomorphic), -?x (antiholomorphic) or *?x (either type,
// bound by the match).  Variables unbound by the lhs denote fresh contraction
// labels on the rhs.  w^?x / i_?x / I are wedge, contraction and projector
// letters.  The coefficient grammar is exactly Coefficient::str().

#include "bklab/term.hpp"
#include "bklab/weyl.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bklab {

enum class PType : uint8_t { Holo, Anti, Wild };

struct PatternSlot {
  PType type;
  int var;
};

struct PatternAtom {
  AtomHead head;
  std::vector<PatternSlot> slots;
};

struct PatternExt {
  EKind k;
  int var = -1;
};

struct RuleTerm {
  Coefficient c;
  std::vector<PatternAtom> atoms;
  std::vector<PatternExt> exts;
};

struct IdentityRule {
  std::string name;
  std::string ref;
  std::string quote;
  RuleTerm lhs;                 // single atom, unit coefficient
  std::vector<RuleTerm> rhs;
  std::vector<std::string> vars;  // variable names in binding order
};

struct IdentityRuleSet {
  std::vector<IdentityRule> rules;
  std::string source;  // verbatim file text
  uint64_t hash = 0;   // FNV-1a 64 of source

  const IdentityRule* find(const std::string& name) const;
};

IdentityRuleSet parse_rules(const std::string& text);
IdentityRuleSet load_rules(const std::string& path);
std::string format_rules(const IdentityRuleSet& rs);

uint64_t fnv1a64(const std::string& s);

// Rewrites until no rule applies; deterministic.  The optional name list
// restricts to a subset of rules (unknown names are an error).  Throws
// err::NonTerminating when the step budget is exceeded.
Expr apply_identities(const Expr& e, const IdentityRuleSet& rs);
Expr apply_identities(const Expr& e, const IdentityRuleSet& rs,
                      const std::vector<std::string>& names);

}  // namespace bklab
