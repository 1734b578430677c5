// Identity rule file: parsing, printing, and fixpoint rewriting.

#include "bklab/rules.hpp"

#include "bklab/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace bklab {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// ===== PARSING =====

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw err::InvalidParams("rule file: " + what);
}

// splits a term body into tokens, keeping parenthesized slot lists together
std::vector<std::string> body_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ' ' && depth == 0) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) fail("unbalanced parentheses in '" + s + "'");
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct VarTable {
  std::vector<std::string> names;
  int id(const std::string& name) {
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return static_cast<int>(i);
    names.push_back(name);
    return static_cast<int>(names.size() - 1);
  }
};

PatternSlot parse_slot(const std::string& s, VarTable& vars) {
  if (s.size() < 3 || s[1] != '?') fail("bad slot '" + s + "'");
  PType t;
  switch (s[0]) {
    case '+': t = PType::Holo; break;
    case '-': t = PType::Anti; break;
    case '*': t = PType::Wild; break;
    default: fail("bad slot type in '" + s + "'");
  }
  return {t, vars.id(s.substr(2))};
}

RuleTerm parse_term(const std::string& line, VarTable& vars) {
  if (line.empty() || line[0] != '[') fail("term must start with a coefficient: " + line);
  size_t close = line.find(']');
  if (close == std::string::npos) fail("unterminated coefficient in: " + line);
  RuleTerm rt;
  try {
    rt.c = Coefficient::parse(line.substr(1, close - 1));
  } catch (const std::invalid_argument& ex) {
    fail(ex.what());
  }
  std::string body = close + 1 < line.size() ? line.substr(close + 2) : "";
  if (close + 1 < line.size() && line[close + 1] != ' ')
    fail("expected space after coefficient in: " + line);
  for (auto& tok : body_tokens(body)) {
    if (tok == "I") {
      rt.exts.push_back({EKind::PROJ, -1});
      continue;
    }
    if (tok.rfind("w^?", 0) == 0) {
      rt.exts.push_back({EKind::CR, vars.id(tok.substr(3))});
      continue;
    }
    if (tok.rfind("i_?", 0) == 0) {
      rt.exts.push_back({EKind::AN, vars.id(tok.substr(3))});
      continue;
    }
    size_t open = tok.find('(');
    if (open == std::string::npos || tok.back() != ')')
      fail("bad token '" + tok + "'");
    auto head = atom_head_by_name(tok.substr(0, open));
    if (!head) fail("unknown atom head in '" + tok + "'");
    PatternAtom pa{*head, {}};
    std::string inner = tok.substr(open + 1, tok.size() - open - 2);
    std::istringstream is(inner);
    for (std::string w; is >> w;) pa.slots.push_back(parse_slot(w, vars));
    if (static_cast<int>(pa.slots.size()) != atom_arity(*head))
      fail("wrong slot count for " + tok);
    rt.atoms.push_back(std::move(pa));
  }
  return rt;
}

void validate(const IdentityRule& r) {
  if (r.lhs.atoms.size() != 1 || !r.lhs.exts.empty())
    fail("rule " + r.name + ": lhs must be a single atom");
  if (!(r.lhs.c == Coefficient::one()))
    fail("rule " + r.name + ": lhs coefficient must be 1");
  std::vector<bool> bound(r.vars.size(), false);
  for (auto& p : r.lhs.atoms[0].slots) bound[static_cast<size_t>(p.var)] = true;
  for (auto& rt : r.rhs)
    for (auto& pa : rt.atoms)
      for (auto& p : pa.slots)
        if (p.type == PType::Wild && !bound[static_cast<size_t>(p.var)])
          fail("rule " + r.name + ": fresh variable with wildcard type");
}

}  // namespace

IdentityRuleSet parse_rules(const std::string& text) {
  IdentityRuleSet rs;
  rs.source = text;
  rs.hash = fnv1a64(text);

  std::istringstream is(text);
  std::string line;
  IdentityRule cur;
  VarTable vars;
  bool open = false;
  auto strip_tag = [&](const std::string& tag) {
    return line.substr(tag.size() + 1);
  };
  while (std::getline(is, line)) {
    if (line.empty()) {
      if (open) fail("blank line inside rule " + cur.name);
      continue;
    }
    if (line.rfind("rule ", 0) == 0) {
      if (open) fail("nested rule " + strip_tag("rule"));
      cur = IdentityRule{};
      vars = VarTable{};
      cur.name = strip_tag("rule");
      open = true;
    } else if (line.rfind("lhs ", 0) == 0) {
      if (!open) fail("lhs outside a rule");
      cur.lhs = parse_term(strip_tag("lhs"), vars);
    } else if (line.rfind("rhs ", 0) == 0) {
      if (!open) fail("rhs outside a rule");
      cur.rhs.push_back(parse_term(strip_tag("rhs"), vars));
    } else if (line.rfind("ref ", 0) == 0) {
      if (!open) fail("ref outside a rule");
      cur.ref = strip_tag("ref");
    } else if (line.rfind("quote ", 0) == 0) {
      if (!open) fail("quote outside a rule");
      cur.quote = strip_tag("quote");
    } else if (line == "end") {
      if (!open) fail("end outside a rule");
      cur.vars = vars.names;
      validate(cur);
      for (auto& r : rs.rules)
        if (r.name == cur.name) fail("duplicate rule " + cur.name);
      rs.rules.push_back(std::move(cur));
      open = false;
    } else {
      fail("unrecognized line '" + line + "'");
    }
  }
  if (open) fail("unterminated rule " + cur.name);
  return rs;
}

IdentityRuleSet load_rules(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw err::InvalidParams("cannot open rule file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_rules(buf.str());
}

// ===== PRINTING =====

namespace {

std::string format_term(const RuleTerm& rt, const std::vector<std::string>& vars) {
  std::ostringstream os;
  os << "[" << rt.c.str() << "]";
  auto slot_str = [&](const PatternSlot& p) {
    char t = p.type == PType::Holo ? '+' : p.type == PType::Anti ? '-' : '*';
    return std::string(1, t) + "?" + vars[static_cast<size_t>(p.var)];
  };
  for (auto& pa : rt.atoms) {
    os << " " << atom_name(pa.head) << "(";
    for (size_t i = 0; i < pa.slots.size(); ++i)
      os << (i ? " " : "") << slot_str(pa.slots[i]);
    os << ")";
  }
  for (auto& pe : rt.exts) {
    switch (pe.k) {
      case EKind::CR: os << " w^?" << vars[static_cast<size_t>(pe.var)]; break;
      case EKind::PROJ: os << " I"; break;
      case EKind::AN: os << " i_?" << vars[static_cast<size_t>(pe.var)]; break;
    }
  }
  return os.str();
}

}  // namespace

std::string format_rules(const IdentityRuleSet& rs) {
  std::ostringstream os;
  bool first = true;
  for (auto& r : rs.rules) {
    if (!first) os << "\n";
    first = false;
    os << "rule " << r.name << "\n";
    os << "lhs " << format_term(r.lhs, r.vars) << "\n";
    for (auto& rt : r.rhs) os << "rhs " << format_term(rt, r.vars) << "\n";
    os << "ref " << r.ref << "\n";
    os << "quote " << r.quote << "\n";
    os << "end\n";
  }
  return os.str();
}

const IdentityRule* IdentityRuleSet::find(const std::string& name) const {
  for (auto& r : rules)
    if (r.name == name) return &r;
  return nullptr;
}

// ===== REWRITING =====

namespace {

struct Binding {
  bool bound = false;
  VType type = VType::Holo;
  int label = -1;
};

bool bind_slots(const std::vector<PatternSlot>& ps, const std::vector<Slot>& cs,
                std::vector<Binding>& b) {
  for (size_t i = 0; i < ps.size(); ++i) {
    const PatternSlot& p = ps[i];
    const Slot& s = cs[i];
    if (p.type == PType::Holo && s.type != VType::Holo) return false;
    if (p.type == PType::Anti && s.type != VType::Anti) return false;
    Binding& bb = b[static_cast<size_t>(p.var)];
    if (bb.bound) {
      if (bb.type != s.type || bb.label != s.label) return false;
    } else {
      bb = {true, s.type, s.label};
    }
  }
  return true;
}

// Matches the pattern against the atom modulo its symmetry group; returns the
// relating sign, or 0 when nothing matches.
int match_atom(const PatternAtom& pa, const Atom& a, size_t nvars,
               std::vector<Binding>& out) {
  if (pa.head != a.head) return 0;
  for (auto& op : atom_symmetries(a.head)) {
    std::vector<Slot> img(a.slots.size());
    for (size_t i = 0; i < img.size(); ++i)
      img[i] = a.slots[static_cast<size_t>(op.perm[i])];
    std::vector<Binding> b(nvars);
    if (bind_slots(pa.slots, img, b)) {
      out = std::move(b);
      return op.sign;
    }
  }
  return 0;
}

std::vector<RawTerm> instantiate(const Term& t, size_t ai, const IdentityRule& r,
                                 const std::vector<Binding>& bind, int sign) {
  Term rest = t;
  rest.atoms.erase(rest.atoms.begin() + static_cast<long>(ai));
  RawTerm base = to_raw(rest);
  std::vector<RawTerm> out;
  for (auto& rt : r.rhs) {
    RawTerm raw = base;
    raw.c = base.c * rt.c;
    if (sign < 0) raw.c = -raw.c;
    std::vector<Binding> local = bind;
    int fresh = t.ndum;
    auto resolve = [&](int var, VType fallback) -> Binding& {
      Binding& b = local[static_cast<size_t>(var)];
      if (!b.bound) {
        b.bound = true;
        b.label = fresh++;
        b.type = fallback;
      }
      return b;
    };
    for (auto& pa : rt.atoms) {
      Atom a{pa.head, {}};
      for (auto& p : pa.slots) {
        VType declared = p.type == PType::Anti ? VType::Anti : VType::Holo;
        Binding& b = resolve(p.var, declared);
        a.slots.push_back({p.type == PType::Wild ? b.type : declared, b.label});
      }
      raw.atoms.push_back(std::move(a));
    }
    // replacement letters act on the fiber before the term's own word
    std::vector<ELetter> pre;
    for (auto& pe : rt.exts) {
      if (pe.k == EKind::PROJ) {
        pre.push_back({EKind::PROJ, -1});
        continue;
      }
      pre.push_back({pe.k, resolve(pe.var, VType::Holo).label});
    }
    raw.exts.insert(raw.exts.begin(), pre.begin(), pre.end());
    out.push_back(std::move(raw));
  }
  return out;
}

Expr apply_filtered(const Expr& e0, const std::vector<const IdentityRule*>& active) {
  Expr cur = canonicalize(e0);
  const int budget = 20000;
  int steps = 0;
  for (;;) {
    bool changed = false;
    Expr keep;
    std::vector<RawTerm> grown;
    for (auto& t : cur.terms) {
      bool done = false;
      for (auto* r : active) {
        for (size_t ai = 0; ai < t.atoms.size() && !done; ++ai) {
          std::vector<Binding> bind;
          int sg = match_atom(r->lhs.atoms[0], t.atoms[ai], r->vars.size(), bind);
          if (sg == 0) continue;
          if (++steps > budget)
            throw err::NonTerminating("identity rewriting exceeded the step budget");
          auto raws = instantiate(t, ai, *r, bind, sg);
          grown.insert(grown.end(), raws.begin(), raws.end());
          done = true;
        }
        if (done) break;
      }
      if (done)
        changed = true;
      else
        keep.terms.push_back(t);
    }
    if (!changed) return cur;
    cur = canonicalize(keep + to_expr(grown));
  }
}

}  // namespace

Expr apply_identities(const Expr& e, const IdentityRuleSet& rs) {
  std::vector<const IdentityRule*> active;
  for (auto& r : rs.rules) active.push_back(&r);
  return apply_filtered(e, active);
}

Expr apply_identities(const Expr& e, const IdentityRuleSet& rs,
                      const std::vector<std::string>& names) {
  std::vector<const IdentityRule*> active;
  for (auto& n : names) {
    const IdentityRule* r = rs.find(n);
    if (!r) throw err::InvalidParams("unknown rule name: " + n);
    active.push_back(r);
  }
  return apply_filtered(e, active);
}

}  // namespace bklab
