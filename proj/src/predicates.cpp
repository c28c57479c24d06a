#include "invcomp/predicates.hpp"

#include <algorithm>
#include <map>

#include "invcomp/util.hpp"
#include "invcomp/zones.hpp"

namespace invcomp {

Partition Partition::from_starts(const std::vector<std::int64_t>& starts) {
  if (starts.empty()) throw ConfigError("partition needs at least one start");
  for (std::size_t i = 1; i < starts.size(); ++i)
    if (starts[i - 1] >= starts[i])
      throw ConfigError("partition starts must be strictly ascending");
  Partition p;
  p.blocks.push_back(IntInterval{std::nullopt, checked_sub(starts[0], 1)});
  for (std::size_t i = 0; i + 1 < starts.size(); ++i)
    p.blocks.push_back(IntInterval{starts[i], checked_sub(starts[i + 1], 1)});
  p.blocks.push_back(IntInterval{starts.back(), std::nullopt});
  return p;
}

Partition Partition::standard() {
  return from_starts({-4, -1, 0, 1, 2, 5});
}

std::size_t Partition::block_of(std::int64_t v) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (blocks[i].contains(v)) return i;
  throw ContractError("partition does not tile the integers");
}

std::set<std::size_t> Partition::covering(const IntInterval& range) const {
  std::set<std::size_t> out;
  if (range.empty()) return out;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const IntInterval& b = blocks[i];
    bool below = b.hi && range.lo && *b.hi < *range.lo;
    bool above = b.lo && range.hi && *b.lo > *range.hi;
    if (!below && !above) out.insert(i);
  }
  return out;
}

std::set<std::size_t> Partition::full_set() const {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < blocks.size(); ++i) out.insert(i);
  return out;
}

PredState PredState::top(Partition p, std::vector<std::string> vs) {
  PredState s;
  s.partition = std::move(p);
  s.vars = std::move(vs);
  s.blocksets.assign(s.vars.size(), s.partition.full_set());
  return s;
}

PredState PredState::bot(Partition p, std::vector<std::string> vs) {
  PredState s = top(std::move(p), std::move(vs));
  s.bottom = true;
  for (auto& bs : s.blocksets) bs.clear();
  s.rel.clear();
  return s;
}

std::size_t PredState::index_of(const std::string& v) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return i;
  throw ContractError("predicate state does not carry variable '" + v + "'");
}

namespace {

// Keeps one atom per (plus, minus) shape, at the tightest bound.
void normalize_rel(std::vector<DiffAtom>& rel) {
  std::map<std::pair<std::optional<std::string>, std::optional<std::string>>,
           std::int64_t>
      best;
  for (const DiffAtom& a : rel) {
    auto key = std::make_pair(a.plus, a.minus);
    auto it = best.find(key);
    if (it == best.end() || a.bound < it->second) best[key] = a.bound;
  }
  rel.clear();
  for (const auto& [key, bound] : best)
    rel.push_back(DiffAtom{key.first, key.second, bound});
  std::sort(rel.begin(), rel.end());
}

// Interval hull of a blockset within the partition.
IntInterval hull(const Partition& p, const std::set<std::size_t>& bs) {
  IntInterval h{std::nullopt, std::nullopt};
  if (bs.empty()) return IntInterval{1, 0};  // empty
  h.lo = p.blocks[*bs.begin()].lo;
  h.hi = p.blocks[*bs.rbegin()].hi;
  return h;
}

// Unsatisfiability of rel together with the blockset hulls, via a
// difference-bound closure over the same variables.
bool hull_unsat(const PredState& s) {
  ZoneState z = ZoneState::top(s.vars);
  for (std::size_t i = 0; i < s.vars.size(); ++i) {
    IntInterval h = hull(s.partition, s.blocksets[i]);
    if (h.empty()) return true;
    if (h.hi) z.at(i + 1, 0) = Weight::of(*h.hi);
    if (h.lo) z.at(0, i + 1) = Weight::of(checked_neg(*h.lo));
  }
  for (const DiffAtom& a : s.rel) {
    std::size_t i = a.plus ? s.index_of(*a.plus) + 1 : 0;
    std::size_t j = a.minus ? s.index_of(*a.minus) + 1 : 0;
    Weight b = Weight::of(a.bound);
    if (b < z.at(i, j)) z.at(i, j) = b;
  }
  z.closed = false;
  return closure(z).bottom;
}

void recheck_bottom(PredState& s) {
  if (s.bottom) return;
  for (const auto& bs : s.blocksets)
    if (bs.empty()) {
      s.bottom = true;
      break;
    }
  if (!s.bottom && hull_unsat(s)) s.bottom = true;
  if (s.bottom) {
    for (auto& bs : s.blocksets) bs.clear();
    s.rel.clear();
  }
}

void drop_atoms_on(PredState& s, const std::string& v) {
  std::erase_if(s.rel, [&](const DiffAtom& a) {
    return (a.plus && *a.plus == v) || (a.minus && *a.minus == v);
  });
}

// Image of a blockset under value translation by c.
std::set<std::size_t> shift_image(const Partition& p,
                                  const std::set<std::size_t>& bs,
                                  std::int64_t c) {
  std::set<std::size_t> out;
  for (std::size_t i : bs) {
    IntInterval shifted = p.blocks[i];
    if (shifted.lo) shifted.lo = checked_add(*shifted.lo, c);
    if (shifted.hi) shifted.hi = checked_add(*shifted.hi, c);
    auto cover = p.covering(shifted);
    out.insert(cover.begin(), cover.end());
  }
  return out;
}

}  // namespace

PredState pred_guard(const PredState& s, const Condition& c, bool polarity) {
  if (s.bottom) return s;
  GuardAtoms g = guard_atoms(c, polarity);
  if (g.infeasible) return PredState::bot(s.partition, s.vars);
  PredState r = s;
  for (const DiffAtom& a : g.atoms) {
    if (a.plus && a.minus) {
      r.rel.push_back(a);
      continue;
    }
    // Unary atom: filter the variable's blockset by the implied range.
    std::size_t vi;
    IntInterval range{std::nullopt, std::nullopt};
    if (a.plus) {
      vi = r.index_of(*a.plus);
      range.hi = a.bound;  // v <= c
    } else {
      vi = r.index_of(*a.minus);
      range.lo = checked_neg(a.bound);  // -v <= c, i.e. v >= -c
    }
    std::set<std::size_t> keep = r.partition.covering(range);
    std::set<std::size_t> filtered;
    for (std::size_t b : r.blocksets[vi])
      if (keep.count(b)) filtered.insert(b);
    r.blocksets[vi] = std::move(filtered);
    r.rel.push_back(a);
  }
  normalize_rel(r.rel);
  recheck_bottom(r);
  return r;
}

PredState pred_transfer(const PredState& s, const Statement& st) {
  if (s.bottom) return s;
  switch (st.kind) {
    case Statement::Kind::Skip:
      return s;
    case Statement::Kind::Assume:
      return pred_guard(s, st.cond, true);
    case Statement::Kind::Assign:
      break;
  }

  PredState r = s;
  const std::string& t = st.target;
  const std::size_t ti = r.index_of(t);
  drop_atoms_on(r, t);
  const LinearExpr& e = st.rhs;

  if (e.kind == LinearExpr::Kind::Const) {
    r.blocksets[ti] = {r.partition.block_of(e.constant)};
    return r;
  }
  if (e.kind == LinearExpr::Kind::Linear && !e.t2 && !e.t1->negated) {
    const std::size_t vi = r.index_of(e.t1->var);
    r.blocksets[ti] = shift_image(r.partition, r.blocksets[vi], e.constant);
    if (vi != ti) {
      r.rel.push_back(difference(t, e.t1->var, e.constant));
      r.rel.push_back(difference(e.t1->var, t, checked_neg(e.constant)));
      normalize_rel(r.rel);
    }
    return r;
  }
  // Nondet, negated or two-variable right-hand sides: nothing expressible
  // survives for the target.
  r.blocksets[ti] = r.partition.full_set();
  return r;
}

PredState pred_join(const PredState& a, const PredState& b) {
  if (a.bottom) return b;
  if (b.bottom) return a;
  PredState r = a;
  for (std::size_t i = 0; i < r.blocksets.size(); ++i)
    r.blocksets[i].insert(b.blocksets[i].begin(), b.blocksets[i].end());
  std::vector<DiffAtom> joined;
  for (const DiffAtom& x : a.rel)
    for (const DiffAtom& y : b.rel)
      if (x.plus == y.plus && x.minus == y.minus)
        joined.push_back(DiffAtom{x.plus, x.minus, std::max(x.bound, y.bound)});
  r.rel = std::move(joined);
  normalize_rel(r.rel);
  return r;
}

PredState pred_widen(const PredState& a, const PredState& b) {
  if (a.bottom) return b;
  if (b.bottom) return a;
  PredState r = a;
  for (std::size_t i = 0; i < r.blocksets.size(); ++i)
    r.blocksets[i].insert(b.blocksets[i].begin(), b.blocksets[i].end());
  std::vector<DiffAtom> kept;
  for (const DiffAtom& x : a.rel) {
    for (const DiffAtom& y : b.rel) {
      if (x.plus == y.plus && x.minus == y.minus && y.bound <= x.bound) {
        kept.push_back(x);
        break;
      }
    }
  }
  r.rel = std::move(kept);
  normalize_rel(r.rel);
  return r;
}

bool pred_includes(const PredState& a, const PredState& b) {
  if (a.bottom) return true;
  if (b.bottom) return false;
  for (std::size_t i = 0; i < a.blocksets.size(); ++i)
    for (std::size_t blk : a.blocksets[i])
      if (!b.blocksets[i].count(blk)) return false;
  for (const DiffAtom& y : b.rel) {
    bool entailed = false;
    for (const DiffAtom& x : a.rel) {
      if (x.plus == y.plus && x.minus == y.minus && x.bound <= y.bound) {
        entailed = true;
        break;
      }
    }
    if (!entailed) return false;
  }
  return true;
}

Formula pred_to_formula(const PredState& p, const VarSet& s) {
  if (p.bottom) return Formula::ff();
  Formula f;
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    if (!s.count(p.vars[i])) continue;
    if (p.blocksets[i].size() == p.partition.size()) continue;  // top
    BlockConstraint bc{p.vars[i], {}};
    for (std::size_t b : p.blocksets[i]) bc.blocks.push_back(p.partition.blocks[b]);
    f.blocks.push_back(std::move(bc));
  }
  for (const DiffAtom& a : p.rel) {
    bool inside = true;
    for (const auto& v : vars_of(a))
      if (!s.count(v)) inside = false;
    if (inside) f.atoms.push_back(a);
  }
  f.normalize();
  return f;
}

}  // namespace invcomp
