#include "invcomp/zones.hpp"

#include <algorithm>
#include <numeric>

namespace invcomp {

namespace {

// Applies one difference atom as a bound tightening.  Returns false when
// the atom mentions a variable the state does not carry (contract error).
void add_atom(ZoneState& z, const DiffAtom& a) {
  std::size_t i = a.plus ? z.index_of(*a.plus) : 0;
  std::size_t j = a.minus ? z.index_of(*a.minus) : 0;
  Weight b = Weight::of(a.bound);
  if (b < z.at(i, j)) {
    z.at(i, j) = b;
    z.closed = false;
  }
}

// Removes every constraint on variable index k (row and column to +inf).
// On a closed matrix this preserves closure: relations among the remaining
// variables are already explicit.
void forget(ZoneState& z, std::size_t k) {
  for (std::size_t i = 0; i < z.dim(); ++i) {
    if (i == k) continue;
    z.at(k, i) = Weight::infinity();
    z.at(i, k) = Weight::infinity();
  }
}

}  // namespace

ZoneState ZoneState::top(std::vector<std::string> vs) {
  ZoneState z;
  z.vars = std::move(vs);
  z.m.assign(z.dim() * z.dim(), Weight::infinity());
  for (std::size_t i = 0; i < z.dim(); ++i) z.at(i, i) = Weight::of(0);
  z.closed = true;
  return z;
}

ZoneState ZoneState::bot(std::vector<std::string> vs) {
  ZoneState z = top(std::move(vs));
  z.bottom = true;
  z.closed = true;
  return z;
}

std::size_t ZoneState::index_of(const std::string& v) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == v) return i + 1;
  throw ContractError("zone state does not carry variable '" + v + "'");
}

ZoneState closure(const ZoneState& z) {
  if (z.bottom) return z;
  if (z.closed) return z;
  ZoneState r = z;
  const std::size_t n = r.dim();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const Weight ik = r.at(i, k);
      if (ik.inf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        Weight via = ik + r.at(k, j);
        if (via < r.at(i, j)) r.at(i, j) = via;
      }
    }
  for (std::size_t i = 0; i < n; ++i) {
    if (r.at(i, i) < Weight::of(0)) {
      ZoneState b = ZoneState::bot(r.vars);
      return b;
    }
    r.at(i, i) = Weight::of(0);
  }
  r.closed = true;
  return r;
}

ZoneState zone_guard(const ZoneState& z, const Condition& c, bool polarity) {
  if (z.bottom) return z;
  GuardAtoms g = guard_atoms(c, polarity);
  if (g.infeasible) return ZoneState::bot(z.vars);
  ZoneState r = closure(z);
  for (const DiffAtom& a : g.atoms) add_atom(r, a);
  return closure(r);
}

ZoneState zone_transfer(const ZoneState& z, const Statement& s) {
  if (z.bottom) return z;
  switch (s.kind) {
    case Statement::Kind::Skip:
      return z;
    case Statement::Kind::Assume:
      return zone_guard(z, s.cond, true);
    case Statement::Kind::Assign:
      break;
  }

  ZoneState r = closure(z);
  if (r.bottom) return r;
  const std::size_t t = r.index_of(s.target);
  const LinearExpr& e = s.rhs;

  switch (e.kind) {
    case LinearExpr::Kind::Nondet:
      forget(r, t);
      return r;

    case LinearExpr::Kind::Const:
      forget(r, t);
      r.at(t, 0) = Weight::of(e.constant);
      r.at(0, t) = Weight::of(checked_neg(e.constant));
      r.closed = false;
      return closure(r);

    case LinearExpr::Kind::Linear:
      break;
  }

  if (e.t2) {
    // v1 ± v2 + c is not a difference; only the target's old value dies.
    forget(r, t);
    return r;
  }

  const std::size_t v = r.index_of(e.t1->var);
  const std::int64_t c = e.constant;

  if (!e.t1->negated) {
    if (v == t) {
      // t := t + c — shift every bound involving t.
      for (std::size_t j = 0; j < r.dim(); ++j) {
        if (j == t) continue;
        if (!r.at(t, j).inf) r.at(t, j).v = checked_add(r.at(t, j).v, c);
        if (!r.at(j, t).inf) r.at(j, t).v = checked_sub(r.at(j, t).v, c);
      }
      return r;  // shifting preserves closure
    }
    // t := v + c — t becomes an exact translate of v.
    for (std::size_t j = 0; j < r.dim(); ++j) {
      if (j == t || j == v) continue;
      r.at(t, j) = Weight::of(c) + r.at(v, j);
      r.at(j, t) = r.at(j, v) + Weight::of(checked_neg(c));
    }
    r.at(t, v) = Weight::of(c);
    r.at(v, t) = Weight::of(checked_neg(c));
    return closure(r);
  }

  // t := -v + c — only unary bounds transfer (t + v = c is not a zone
  // relation).  hi(t) = c - lo(v), lo(t) = c - hi(v).
  Weight vlo = r.at(0, v);  // -v <= vlo
  Weight vhi = r.at(v, 0);  //  v <= vhi
  forget(r, t);             // bounds of v were read before t's old value dies
  r.at(t, 0) = vlo.inf ? Weight::infinity()
                       : Weight::of(checked_add(c, vlo.v));
  r.at(0, t) = vhi.inf ? Weight::infinity()
                       : Weight::of(checked_sub(vhi.v, c));
  r.closed = false;
  return closure(r);
}

ZoneState zone_join(const ZoneState& a, const ZoneState& b) {
  if (a.bottom) return closure(b);
  if (b.bottom) return closure(a);
  ZoneState ca = closure(a);
  ZoneState cb = closure(b);
  ZoneState r = ca;
  for (std::size_t i = 0; i < r.m.size(); ++i)
    if (r.m[i] < cb.m[i]) r.m[i] = cb.m[i];
  r.closed = true;  // pointwise max of closed matrices is closed
  return r;
}

ZoneState zone_widen(const ZoneState& a, const ZoneState& b,
                     const WideningPolicy& p, int visit_count) {
  if (a.bottom) return closure(b);
  if (b.bottom) return a;
  if (visit_count < p.delay) return zone_join(closure(a), b);

  ZoneState cb = closure(b);
  if (cb.bottom) return a;
  ZoneState r = a;  // NOT closed on purpose; see header
  for (std::size_t i = 0; i < r.dim(); ++i)
    for (std::size_t j = 0; j < r.dim(); ++j) {
      if (i == j) continue;
      const Weight& old_w = a.at(i, j);
      const Weight& new_w = cb.at(i, j);
      if (new_w <= old_w) continue;  // stable bound survives
      if (p.kind == WideningPolicy::Kind::Threshold && !new_w.inf) {
        Weight chosen = Weight::infinity();
        for (std::int64_t t : p.thresholds) {
          if (new_w.v <= t) {
            chosen = Weight::of(t);
            break;
          }
        }
        r.at(i, j) = chosen;
      } else {
        r.at(i, j) = Weight::infinity();
      }
    }
  r.closed = false;
  return r;
}

std::vector<DiffAtom> reduce_redundant(const ZoneState& closed_z) {
  const ZoneState z = closure(closed_z);
  std::vector<DiffAtom> out;
  if (z.bottom) return out;
  const std::size_t n = z.dim();

  // Zero-weight cycles identify equality classes: i ~ j when the bounds in
  // both directions are finite and cancel.  On a closed matrix this relation
  // is transitive, so the smallest equivalent index is the representative.
  std::vector<std::size_t> cls(n);
  std::iota(cls.begin(), cls.end(), 0);
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      if (z.at(i, j).inf || z.at(j, i).inf) continue;
      if (checked_add(z.at(i, j).v, z.at(j, i).v) == 0) {
        cls[i] = j;
        break;
      }
    }

  auto emit = [&](std::size_t i, std::size_t j) {
    const Weight& w = z.at(i, j);
    if (w.inf) return;
    if (i == 0)
      out.push_back(lower_bound(z.vars[j - 1], w.v));
    else if (j == 0)
      out.push_back(upper_bound(z.vars[i - 1], w.v));
    else
      out.push_back(difference(z.vars[i - 1], z.vars[j - 1], w.v));
  };

  // Exact chains inside each equality class.
  for (std::size_t rep = 0; rep < n; ++rep) {
    if (cls[rep] != rep) continue;
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (cls[i] == rep) members.push_back(i);
    if (members.size() < 2) continue;
    for (std::size_t k = 0; k + 1 < members.size(); ++k)
      emit(members[k], members[k + 1]);
    emit(members.back(), members.front());
  }

  // Two-step-path redundancy between class representatives.
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < n; ++i)
    if (cls[i] == i) reps.push_back(i);
  for (std::size_t i : reps)
    for (std::size_t j : reps) {
      if (i == j || z.at(i, j).inf) continue;
      bool redundant = false;
      for (std::size_t k : reps) {
        if (k == i || k == j) continue;
        if (z.at(i, k).inf || z.at(k, j).inf) continue;
        if (z.at(i, k) + z.at(k, j) <= z.at(i, j)) {
          redundant = true;
          break;
        }
      }
      if (!redundant) emit(i, j);
    }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool zone_includes(const ZoneState& a, const ZoneState& b, const VarSet& s) {
  if (a.bottom) return true;
  if (b.bottom) return false;
  ZoneState ca = closure(a);
  ZoneState cb = closure(b);
  if (ca.bottom) return true;
  if (cb.bottom) return false;
  std::vector<std::size_t> idx{0};
  for (const auto& v : s) {
    for (std::size_t i = 0; i < ca.vars.size(); ++i)
      if (ca.vars[i] == v) idx.push_back(i + 1);
  }
  for (std::size_t i : idx)
    for (std::size_t j : idx)
      if (!(ca.at(i, j) <= cb.at(i, j))) return false;
  return true;
}

Formula zone_to_formula(const ZoneState& z, const VarSet& s) {
  ZoneState c = closure(z);
  if (c.bottom) return Formula::ff();
  Formula f;
  for (DiffAtom& a : reduce_redundant(c)) {
    bool inside = true;
    for (const auto& v : vars_of(a))
      if (!s.count(v)) inside = false;
    if (inside) f.atoms.push_back(std::move(a));
  }
  f.normalize();
  return f;
}

bool zone_equal(const ZoneState& a, const ZoneState& b) {
  VarSet all(a.vars.begin(), a.vars.end());
  return zone_includes(a, b, all) && zone_includes(b, a, all);
}

}  // namespace invcomp
