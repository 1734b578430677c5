#include "bklab/term.hpp"

#include "bklab/errors.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bklab {

namespace {

struct HeadInfo {
  const char* name;
  int arity;
  int conj_sign;
};

const HeadInfo& head_info(AtomHead h) {
  static const std::map<AtomHead, HeadInfo> k = {
      {AtomHead::RTX, {"RTX", 4, +1}},      {AtomHead::RE, {"RE", 2, -1}},
      {AtomHead::NABLAJ, {"NJ", 3, +1}},    {AtomHead::NABLA2J, {"N2J", 4, +1}},
      {AtomHead::RX, {"RX", 0, +1}},        {AtomHead::TRT10, {"TRT10", 2, -1}},
      {AtomHead::RCLIFF, {"RCLIFF", 2, -1}},{AtomHead::D1RL, {"D1RL", 3, -1}},
      {AtomHead::D2RL, {"D2RL", 4, -1}},    {AtomHead::D2TAU, {"D2TAU", 2, +1}},
  };
  return k.at(h);
}

std::vector<SymOp> make_group(int arity, const std::vector<SymOp>& gens) {
  // Closure of the generator set; groups here are tiny.
  std::vector<SymOp> group;
  SymOp id;
  id.perm.resize(arity);
  std::iota(id.perm.begin(), id.perm.end(), 0);
  id.sign = 1;
  group.push_back(id);
  auto find = [&](const std::vector<int>& p) {
    for (auto& g : group)
      if (g.perm == p) return true;
    return false;
  };
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<SymOp> next = group;
    for (auto& g : group)
      for (auto& h : gens) {
        SymOp c;
        c.perm.resize(arity);
        for (int i = 0; i < arity; ++i) c.perm[i] = g.perm[h.perm[i]];
        c.sign = g.sign * h.sign;
        if (!find(c.perm)) {
          next.push_back(c);
          grew = true;
        }
      }
    group = next;
  }
  return group;
}

}  // namespace

int atom_arity(AtomHead h) { return head_info(h).arity; }
const char* atom_name(AtomHead h) { return head_info(h).name; }
int atom_conj_sign(AtomHead h) { return head_info(h).conj_sign; }

std::optional<AtomHead> atom_head_by_name(const std::string& s) {
  for (AtomHead h : {AtomHead::RTX, AtomHead::RE, AtomHead::NABLAJ, AtomHead::NABLA2J,
                     AtomHead::RX, AtomHead::TRT10, AtomHead::RCLIFF, AtomHead::D1RL,
                     AtomHead::D2RL, AtomHead::D2TAU})
    if (s == atom_name(h)) return h;
  return std::nullopt;
}

const std::vector<SymOp>& atom_symmetries(AtomHead h) {
  static const std::map<AtomHead, std::vector<SymOp>> groups = [] {
    std::map<AtomHead, std::vector<SymOp>> m;
    m[AtomHead::RTX] = make_group(
        4, {{{1, 0, 2, 3}, -1}, {{0, 1, 3, 2}, -1}, {{2, 3, 0, 1}, +1}});
    m[AtomHead::RE] = make_group(2, {{{1, 0}, -1}});
    m[AtomHead::NABLAJ] = make_group(3, {{{0, 2, 1}, -1}});
    m[AtomHead::NABLA2J] = make_group(4, {{{0, 1, 3, 2}, -1}});
    m[AtomHead::RX] = make_group(0, {});
    m[AtomHead::TRT10] = make_group(2, {{{1, 0}, -1}});
    m[AtomHead::RCLIFF] = make_group(2, {{{1, 0}, -1}});
    m[AtomHead::D1RL] = make_group(3, {{{0, 2, 1}, -1}});
    m[AtomHead::D2RL] = make_group(4, {{{1, 0, 2, 3}, +1}, {{0, 1, 3, 2}, -1}});
    m[AtomHead::D2TAU] = make_group(2, {{{1, 0}, +1}});
    return m;
  }();
  return groups.at(h);
}

bool atom_type_zero(const Atom& a) {
  if (a.head != AtomHead::NABLAJ) return false;
  return !(a.slots[0].type == a.slots[1].type && a.slots[1].type == a.slots[2].type);
}

std::vector<int>& GenWord::list(GKind k) {
  switch (k) {
    case GKind::B: return b;
    case GKind::Z: return z;
    case GKind::ZB: return zb;
    case GKind::ZP: return zp;
    case GKind::ZBP: return zbp;
    case GKind::BP: return bp;
  }
  throw std::logic_error("GenWord::list");
}

const std::vector<int>& GenWord::list(GKind k) const {
  return const_cast<GenWord*>(this)->list(k);
}

Expr Expr::operator+(const Expr& o) const {
  Expr r = *this;
  r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
  return canonicalize(r);
}

Expr Expr::operator-(const Expr& o) const { return *this + (-o); }

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& t : r.terms) t.c = -t.c;
  return r;
}

Expr Expr::scaled(const Coefficient& k) const {
  Expr r = *this;
  for (auto& t : r.terms) t.c = t.c * k;
  return canonicalize(r);
}

void remap_labels(Term& t, const std::vector<int>& map) {
  auto m = [&](int l) { return map.at(static_cast<size_t>(l)); };
  for (auto& a : t.atoms)
    for (auto& s : a.slots) s.label = m(s.label);
  for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
    for (auto& l : t.gen.list(k)) l = m(l);
  for (auto& l : t.ext.cr) l = m(l);
  for (auto& l : t.ext.an) l = m(l);
}

namespace {

// Visit every label occurrence in the fixed traversal order.
template <typename F>
void visit_labels(const Term& t, F&& f) {
  for (auto& a : t.atoms)
    for (auto& s : a.slots) f(s.label);
  for (int l : t.ext.cr) f(l);
  for (int l : t.ext.an) f(l);
  for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
    for (int l : t.gen.list(k)) f(l);
}

// Sorts v ascending, returns the permutation parity sign; nullopt on repeats.
std::optional<int> sort_sign(std::vector<int>& v) {
  int sign = 1;
  for (size_t i = 1; i < v.size(); ++i)
    for (size_t j = i; j > 0 && v[j] < v[j - 1]; --j) {
      std::swap(v[j], v[j - 1]);
      sign = -sign;
    }
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] == v[i - 1]) return std::nullopt;
  return sign;
}

void sort_gen(GenWord& g) {
  for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP})
    std::sort(g.list(k).begin(), g.list(k).end());
}

}  // namespace

void compact_labels(Term& t) {
  int mx = -1;
  visit_labels(t, [&](int l) { mx = std::max(mx, l); });
  std::vector<int> map(static_cast<size_t>(mx + 1), -1);
  int next = 0;
  visit_labels(t, [&](int l) {
    if (map.at(static_cast<size_t>(l)) < 0) map[static_cast<size_t>(l)] = next++;
  });
  remap_labels(t, map);
  t.ndum = next;
}

bool labels_paired(const Term& t) {
  std::map<int, int> count;
  visit_labels(t, [&](int l) { count[l]++; });
  for (auto& [l, c] : count)
    if (c != 2) return false;
  return true;
}

int occurrences_of(const Term& t, int label) {
  int left = 0;
  visit_labels(t, [&](int l) {
    if (l == label) ++left;
  });
  return left;
}

void unify_pair(Term& t, int u, int v, int ndum_hint) {
  if (u == v) {
    if (occurrences_of(t, u) == 0)
      throw err::NeedExplicitDimension(
          "mutual pairing erased a dummy label, leaving a dimension factor");
    return;
  }
  if (occurrences_of(t, u) + occurrences_of(t, v) == 0)
    throw err::NeedExplicitDimension(
        "pairing erased a dummy label, leaving a dimension factor");
  std::vector<int> map(static_cast<size_t>(std::max({u + 1, v + 1, ndum_hint})));
  for (size_t i = 0; i < map.size(); ++i) map[i] = static_cast<int>(i);
  map[static_cast<size_t>(u)] = v;
  remap_labels(t, map);
}

Term canonicalize_term(const Term& t0) {
  Term zero;
  zero.c = Coefficient::zero();
  if (t0.c.is_zero()) return zero;
  for (auto& a : t0.atoms) {
    if (static_cast<int>(a.slots.size()) != atom_arity(a.head))
      throw std::logic_error("atom arity mismatch");
    if (atom_type_zero(a)) return zero;
  }

  Term base = t0;
  // Stable head order first; equal-head blocks get permuted below.
  std::stable_sort(base.atoms.begin(), base.atoms.end(),
                   [](const Atom& a, const Atom& b) { return a.head < b.head; });

  // Enumerate permutations within equal-head blocks.
  std::vector<std::pair<size_t, size_t>> blocks;
  for (size_t i = 0; i < base.atoms.size();) {
    size_t j = i;
    while (j < base.atoms.size() && base.atoms[j].head == base.atoms[i].head) ++j;
    if (j - i > 1) blocks.emplace_back(i, j);
    i = j;
  }

  std::vector<std::vector<size_t>> atom_orders;
  {
    std::vector<size_t> order(base.atoms.size());
    std::iota(order.begin(), order.end(), 0);
    atom_orders.push_back(order);
    for (auto [lo, hi] : blocks) {
      std::vector<std::vector<size_t>> next;
      std::vector<size_t> idx(hi - lo);
      std::iota(idx.begin(), idx.end(), lo);
      std::sort(idx.begin(), idx.end());
      do {
        for (auto base_order : atom_orders) {
          for (size_t p = lo; p < hi; ++p) base_order[p] = idx[p - lo];
          next.push_back(base_order);
        }
      } while (std::next_permutation(idx.begin(), idx.end()));
      atom_orders = std::move(next);
    }
  }

  struct Candidate {
    Term t;
    int sign;
  };
  std::optional<Candidate> best;
  bool killed = false;

  // Iterate symmetry choices per atom via mixed-radix counter.
  std::vector<size_t> radix(base.atoms.size());
  for (size_t i = 0; i < base.atoms.size(); ++i)
    radix[i] = atom_symmetries(base.atoms[i].head).size();

  for (const auto& order : atom_orders) {
    std::vector<size_t> ctr(base.atoms.size(), 0);
    while (true) {
      Term cand = base;
      cand.atoms.clear();
      int sign = 1;
      for (size_t pos = 0; pos < order.size(); ++pos) {
        const Atom& src = base.atoms[order[pos]];
        const SymOp& op = atom_symmetries(src.head)[ctr[order[pos]]];
        Atom a;
        a.head = src.head;
        a.slots.resize(src.slots.size());
        for (size_t s = 0; s < src.slots.size(); ++s)
          a.slots[s] = src.slots[static_cast<size_t>(op.perm[s])];
        sign *= op.sign;
        cand.atoms.push_back(std::move(a));
      }
      // Canonical labeling: labels touching an atom slot are fixed by the
      // slot traversal order; floating labels are ordered by their occurrence
      // signature, and every order inside an equal-signature group is tried.
      int mx = -1;
      visit_labels(cand, [&](int l) { mx = std::max(mx, l); });
      std::vector<int> anchor_map(static_cast<size_t>(mx + 1), -1);
      int next_id = 0;
      for (auto& a : cand.atoms)
        for (auto& s : a.slots)
          if (anchor_map[static_cast<size_t>(s.label)] < 0)
            anchor_map[static_cast<size_t>(s.label)] = next_id++;
      std::vector<std::vector<int>> groups;
      {
        std::map<int, std::array<int, 8>> sig;
        auto bump = [&](int l, size_t slot) {
          if (anchor_map[static_cast<size_t>(l)] >= 0) return;
          sig.try_emplace(l, std::array<int, 8>{}).first->second[slot]++;
        };
        size_t gi = 0;
        for (auto k : {GKind::B, GKind::Z, GKind::ZB, GKind::ZP, GKind::ZBP, GKind::BP}) {
          for (int l : cand.gen.list(k)) bump(l, gi);
          ++gi;
        }
        for (int l : cand.ext.cr) bump(l, 6);
        for (int l : cand.ext.an) bump(l, 7);
        std::map<std::array<int, 8>, std::vector<int>> by_sig;
        for (auto& [l, v] : sig) by_sig[v].push_back(l);
        for (auto& [v, ls] : by_sig) groups.push_back(ls);
      }
      std::function<void(size_t, std::vector<int>&, int)> assign = [&](size_t gidx,
                                                                       std::vector<int>& map,
                                                                       int start) {
        if (gidx == groups.size()) {
          Term c2 = cand;
          remap_labels(c2, map);
          c2.ndum = start;
          sort_gen(c2.gen);
          auto s1 = sort_sign(c2.ext.cr);
          auto s2 = sort_sign(c2.ext.an);
          if (!s1 || !s2) return;
          int sg = sign * *s1 * *s2;
          if (!best || c2.key() < best->t.key())
            best = Candidate{c2, sg};
          else if (c2.key() == best->t.key() && sg != best->sign)
            killed = true;
          return;
        }
        std::vector<int> g = groups[gidx];
        std::sort(g.begin(), g.end());
        do {
          for (size_t i = 0; i < g.size(); ++i)
            map[static_cast<size_t>(g[i])] = start + static_cast<int>(i);
          assign(gidx + 1, map, start + static_cast<int>(g.size()));
        } while (std::next_permutation(g.begin(), g.end()));
      };
      std::vector<int> label_map = anchor_map;
      assign(0, label_map, next_id);
      // mixed-radix increment over per-atom symmetry choices
      size_t i = 0;
      for (; i < ctr.size(); ++i) {
        if (++ctr[i] < radix[i]) break;
        ctr[i] = 0;
      }
      if (i == ctr.size()) break;
    }
  }

  if (!best) return zero;  // exterior letter repeats in every image
  if (killed) return zero;
  Term out = best->t;
  out.c = t0.c;
  if (best->sign < 0) out.c = -out.c;
  return out;
}

Expr canonicalize(const Expr& e) {
  std::map<std::tuple<std::vector<Atom>, GenWord, ExtWord>, Coefficient> acc;
  for (const auto& t : e.terms) {
    Term c = canonicalize_term(t);
    if (c.c.is_zero()) continue;
    auto k = std::make_tuple(c.atoms, c.gen, c.ext);
    auto it = acc.find(k);
    if (it == acc.end())
      acc.emplace(std::move(k), c.c);
    else {
      it->second += c.c;
      if (it->second.is_zero()) acc.erase(it);
    }
  }
  Expr out;
  for (auto& [k, c] : acc) {
    Term t;
    t.c = c;
    t.atoms = std::get<0>(k);
    t.gen = std::get<1>(k);
    t.ext = std::get<2>(k);
    int mx = -1;
    visit_labels(t, [&](int l) { mx = std::max(mx, l); });
    t.ndum = mx + 1;
    out.terms.push_back(std::move(t));
  }
  return out;
}

bool equal(const Expr& a, const Expr& b) {
  return canonicalize(a - b).is_zero();
}

Expr conjugate_tensors(const Expr& e) {
  Expr r;
  for (auto t : e.terms) {
    t.c = t.c.conj();
    for (auto& a : t.atoms) {
      if (atom_conj_sign(a.head) < 0) t.c = -t.c;
      for (auto& s : a.slots) s.type = flip(s.type);
    }
    r.terms.push_back(std::move(t));
  }
  return canonicalize(r);
}

std::string to_string(const Term& t) {
  std::ostringstream os;
  os << "[" << t.c.str() << "]";
  for (auto& a : t.atoms) {
    os << " " << atom_name(a.head) << "(";
    for (size_t i = 0; i < a.slots.size(); ++i) {
      if (i) os << ",";
      os << (a.slots[i].type == VType::Holo ? "+" : "-") << a.slots[i].label;
    }
    os << ")";
  }
  auto dump = [&](const char* nm, const std::vector<int>& v) {
    for (int l : v) os << " " << nm << "(" << l << ")";
  };
  dump("b", t.gen.b);
  dump("z", t.gen.z);
  dump("zb", t.gen.zb);
  dump("zp", t.gen.zp);
  dump("zbp", t.gen.zbp);
  dump("bp", t.gen.bp);
  dump("cr", t.ext.cr);
  if (t.ext.proj) os << " I";
  dump("an", t.ext.an);
  return os.str();
}

std::string to_string(const Expr& e) {
  if (e.terms.empty()) return "0";
  std::string s;
  for (size_t i = 0; i < e.terms.size(); ++i) {
    if (i) s += "\n";
    s += to_string(e.terms[i]);
  }
  return s;
}

}  // namespace bklab
