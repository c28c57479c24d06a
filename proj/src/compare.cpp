#include "invcomp/compare.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "invcomp/solver_client.hpp"
#include "invcomp/util.hpp"
#include "invcomp/zones.hpp"

namespace invcomp {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Equivalent: return "Equivalent";
    case Outcome::LeftMorePrecise: return "LeftMorePrecise";
    case Outcome::RightMorePrecise: return "RightMorePrecise";
    case Outcome::Incomparable: return "Incomparable";
    case Outcome::Unknown: return "Unknown";
  }
  throw ContractError("unhandled outcome");
}

const std::vector<Outcome>& all_outcomes() {
  static const std::vector<Outcome> k = {
      Outcome::Equivalent, Outcome::LeftMorePrecise,
      Outcome::RightMorePrecise, Outcome::Incomparable, Outcome::Unknown};
  return k;
}

// ---------------------------------------------------------------------------
// Oracle backend: exhaustive model enumeration inside [-box, box]^n.
// ---------------------------------------------------------------------------

namespace {

// A formula unit compiled against a fixed variable ordering.
struct Unit {
  bool is_block = false;
  int i = -1;  // position of the positive / block variable, -1 if absent
  int j = -1;  // position of the negated variable, -1 if absent
  std::int64_t c = 0;
  const BlockConstraint* bc = nullptr;
  int max_pos = -1;  // deepest variable position referenced
};

bool unit_holds(const Unit& u, const std::vector<std::int64_t>& vals) {
  if (u.is_block) return u.bc->contains(vals[static_cast<size_t>(u.i)]);
  std::int64_t lhs = 0;
  if (u.i >= 0) lhs += vals[static_cast<size_t>(u.i)];
  if (u.j >= 0) lhs -= vals[static_cast<size_t>(u.j)];
  return lhs <= u.c;
}

std::vector<Unit> compile_units(const Formula& f,
                                const std::map<std::string, int>& pos) {
  std::vector<Unit> out;
  for (const auto& a : f.atoms) {
    Unit u;
    if (a.plus) u.i = pos.at(*a.plus);
    if (a.minus) u.j = pos.at(*a.minus);
    u.c = a.bound;
    u.max_pos = std::max(u.i, u.j);
    out.push_back(u);
  }
  for (const auto& b : f.blocks) {
    Unit u;
    u.is_block = true;
    u.i = pos.at(b.var);
    u.bc = &b;
    u.max_pos = u.i;
    out.push_back(u);
  }
  return out;
}

}  // namespace

OracleBackend::OracleBackend(std::int64_t box, std::int64_t max_points)
    : box_(box), max_points_(max_points) {
  if (box_ < 0) throw ConfigError("oracle box must be non-negative");
  if (max_points_ <= 0) throw ConfigError("oracle point cap must be positive");
}

EntailResult OracleBackend::entails(const Formula& a, const Formula& b) {
  if (a.is_false) return {Entail::Yes, std::nullopt};
  if (b.is_true() || a == b) return {Entail::Yes, std::nullopt};

  VarSet vs = vars_of(a);
  for (const auto& v : vars_of(b)) vs.insert(v);
  const std::vector<std::string> vars(vs.begin(), vs.end());
  const size_t n = vars.size();

  const std::int64_t side = 2 * box_ + 1;
  std::int64_t volume = 1;
  for (size_t k = 0; k < n; ++k) {
    if (volume > max_points_ / side)
      throw ConfigError("oracle enumeration over " + std::to_string(n) +
                        " variables in [-" + std::to_string(box_) + ", " +
                        std::to_string(box_) + "] exceeds the point cap of " +
                        std::to_string(max_points_));
    volume *= side;
  }

  std::map<std::string, int> pos;
  for (size_t k = 0; k < n; ++k) pos[vars[k]] = static_cast<int>(k);

  const std::vector<Unit> a_units = compile_units(a, pos);
  const std::vector<Unit> b_units = compile_units(b, pos);

  // Units of `a` become checkable once their deepest variable is assigned.
  std::vector<std::vector<const Unit*>> a_at(n);
  for (const auto& u : a_units)
    if (u.max_pos >= 0) a_at[static_cast<size_t>(u.max_pos)].push_back(&u);

  // Static per-variable range narrowing from the one-variable atoms of `a`.
  std::vector<std::int64_t> lo(n, -box_), hi(n, box_);
  for (const auto& u : a_units) {
    if (u.is_block) continue;
    if (u.i >= 0 && u.j < 0) {
      auto& h = hi[static_cast<size_t>(u.i)];
      h = std::min(h, u.c);
    } else if (u.j >= 0 && u.i < 0) {
      auto& l = lo[static_cast<size_t>(u.j)];
      l = std::max(l, -u.c);
    }
  }
  for (size_t k = 0; k < n; ++k)
    if (lo[k] > hi[k]) return {Entail::Yes, std::nullopt};  // a has no models

  std::vector<std::int64_t> vals(n, 0);
  std::optional<Model> counter;

  std::function<bool(size_t)> search = [&](size_t k) -> bool {
    if (k == n) {
      for (const auto& u : b_units)
        if (!unit_holds(u, vals)) {
          Model m;
          for (size_t t = 0; t < n; ++t) m[vars[t]] = vals[t];
          counter = std::move(m);
          return true;
        }
      if (b.is_false) {  // any model of `a` refutes entailment into false
        Model m;
        for (size_t t = 0; t < n; ++t) m[vars[t]] = vals[t];
        counter = std::move(m);
        return true;
      }
      return false;
    }
    for (std::int64_t v = lo[k]; v <= hi[k]; ++v) {
      vals[k] = v;
      bool ok = true;
      for (const Unit* u : a_at[k])
        if (!unit_holds(*u, vals)) {
          ok = false;
          break;
        }
      if (ok && search(k + 1)) return true;
    }
    return false;
  };

  if (search(0)) return {Entail::No, std::move(counter)};
  return {Entail::Yes, std::nullopt};
}

// ---------------------------------------------------------------------------
// Native backend: difference-bound reasoning, block constraints rejected.
// ---------------------------------------------------------------------------

namespace {

// Builds the closed difference-bound state of a block-free formula over the
// given variables.  Returns a bottom state when the formula is unsatisfiable.
ZoneState zone_of_formula(const Formula& f, const VarSet& vars) {
  const std::vector<std::string> order(vars.begin(), vars.end());
  if (f.is_false) return ZoneState::bot(order);
  ZoneState z = ZoneState::top(order);
  for (const auto& a : f.atoms) {
    const size_t i = a.plus ? z.index_of(*a.plus) : 0;
    const size_t j = a.minus ? z.index_of(*a.minus) : 0;
    if (i == j) {
      if (a.bound < 0) return ZoneState::bot(order);
      continue;
    }
    Weight& cell = z.at(i, j);
    cell = std::min(cell, Weight::of(a.bound));
    z.closed = false;
  }
  return closure(z);
}

// Extracts a concrete model from a consistent closed state by boxing any
// unbounded variables far outside every finite bound and taking the lower
// corner of the re-closed state.
Model corner_model(const ZoneState& z) {
  const size_t d = z.dim();
  std::int64_t w = 1;
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j)
      if (!z.at(i, j).inf) w = std::max(w, std::abs(z.at(i, j).v));
  const std::int64_t big = (static_cast<std::int64_t>(d) + 2) * (w + 1);

  ZoneState boxed = z;
  for (size_t k = 1; k < d; ++k) {
    boxed.at(k, 0) = std::min(boxed.at(k, 0), Weight::of(big));
    boxed.at(0, k) = std::min(boxed.at(0, k), Weight::of(big));
  }
  boxed.closed = false;
  boxed = closure(boxed);
  if (boxed.bottom)
    throw ContractError("boxing a consistent state made it inconsistent");

  Model m;
  for (size_t k = 1; k < d; ++k)
    m[boxed.vars[k - 1]] = -boxed.at(0, k).v;  // v_k >= -m[0][k], take equality
  return m;
}

}  // namespace

EntailResult NativeZoneBackend::entails(const Formula& a, const Formula& b) {
  if (!a.blocks.empty() || !b.blocks.empty())
    throw ConfigError(
        "native backend decides difference constraints only; "
        "block constraints require the oracle or an external solver");
  if (a.is_false) return {Entail::Yes, std::nullopt};

  VarSet vs = vars_of(a);
  for (const auto& v : vars_of(b)) vs.insert(v);

  ZoneState za = zone_of_formula(a, vs);
  if (za.bottom) return {Entail::Yes, std::nullopt};
  if (b.is_false) return {Entail::No, corner_model(za)};

  for (const auto& atom : b.atoms) {
    const size_t i = atom.plus ? za.index_of(*atom.plus) : 0;
    const size_t j = atom.minus ? za.index_of(*atom.minus) : 0;
    if (i == j) {
      if (atom.bound >= 0) continue;
      return {Entail::No, corner_model(za)};
    }
    if (!za.at(i, j).inf && za.at(i, j).v <= atom.bound) continue;
    // The bound is not implied: force v_i - v_j >= bound + 1 and extract a
    // witness of `a` violating this atom.
    ZoneState forced = za;
    Weight& cell = forced.at(j, i);
    cell = std::min(cell, Weight::of(checked_neg(checked_add(atom.bound, 1))));
    forced.closed = false;
    forced = closure(forced);
    if (forced.bottom)
      throw ContractError("unimplied bound could not be violated");
    return {Entail::No, corner_model(forced)};
  }
  return {Entail::Yes, std::nullopt};
}

// ---------------------------------------------------------------------------
// External backend.
// ---------------------------------------------------------------------------

ExternalSolverBackend::ExternalSolverBackend(std::string command,
                                             int timeout_ms)
    : client_(std::make_unique<SolverClient>(std::move(command), timeout_ms)) {
}

ExternalSolverBackend::~ExternalSolverBackend() = default;

EntailResult ExternalSolverBackend::entails(const Formula& a,
                                            const Formula& b) {
  VarSet vs = vars_of(a);
  for (const auto& v : vars_of(b)) vs.insert(v);
  const std::vector<std::string> vars(vs.begin(), vs.end());

  const auto reply = client_->query(entailment_query(a, b), vars);
  if (reply.status == "unsat") return {Entail::Yes, std::nullopt};
  if (reply.status == "sat") {
    Model m(reply.values.begin(), reply.values.end());
    return {Entail::No, std::move(m)};
  }
  return {Entail::Unknown, std::nullopt};
}

// ---------------------------------------------------------------------------
// Classification and comparison drivers.
// ---------------------------------------------------------------------------

ClassifyResult classify_detail(const Formula& left, const Formula& right,
                               EntailmentBackend& backend) {
  EntailResult lr = backend.entails(left, right);
  EntailResult rl = backend.entails(right, left);
  ClassifyResult out;
  if (lr.countermodel)
    out.countermodel = std::move(lr.countermodel);
  else if (rl.countermodel)
    out.countermodel = std::move(rl.countermodel);
  if (lr.value == Entail::Unknown || rl.value == Entail::Unknown)
    out.outcome = Outcome::Unknown;
  else if (lr.value == Entail::Yes && rl.value == Entail::Yes)
    out.outcome = Outcome::Equivalent;
  else if (lr.value == Entail::Yes)
    out.outcome = Outcome::LeftMorePrecise;
  else if (rl.value == Entail::Yes)
    out.outcome = Outcome::RightMorePrecise;
  else
    out.outcome = Outcome::Incomparable;
  return out;
}

Outcome classify(const Formula& left, const Formula& right,
                 EntailmentBackend& backend) {
  return classify_detail(left, right, backend).outcome;
}

ClassifyResult compare_full_detail(const Invariant& left,
                                   const Invariant& right,
                                   EntailmentBackend& backend) {
  if (left.universe != right.universe)
    throw ContractError("compared invariants must share one universe");
  return classify_detail(left.formula, right.formula, backend);
}

Outcome compare_full(const Invariant& left, const Invariant& right,
                     EntailmentBackend& backend) {
  return compare_full_detail(left, right, backend).outcome;
}

MinimalComparison compare_minimal(const PointInvariant& left,
                                  const PointInvariant& right,
                                  const DeltaFn& dl, const DeltaFn& dr,
                                  EntailmentBackend& backend) {
  const auto& li = left.invariant;
  const auto& ri = right.invariant;
  if (li.universe != ri.universe)
    throw ContractError("compared invariants must share one universe");

  MinimalComparison out;
  if (li.formula == ri.formula) {
    // Identical invariants need no minimization and no solver: they are
    // equivalent over the empty variable set.
    out.outcome = Outcome::Equivalent;
    out.cvs.s = {};
    out.cvs.iterations = 0;
    out.cvs.numerator = 0;
    out.cvs.denominator = li.universe.size();
    out.left_sub = li.formula;
    out.right_sub = ri.formula;
    return out;
  }

  out.cvs = common_var_set(left.dv, right.dv, li, ri, dl, dr);
  out.left_sub = dl(li, out.cvs.s).formula;
  out.right_sub = dr(ri, out.cvs.s).formula;
  if (out.left_sub == out.right_sub) {
    out.outcome = Outcome::Equivalent;
  } else {
    ClassifyResult c = classify_detail(out.left_sub, out.right_sub, backend);
    out.outcome = c.outcome;
    out.countermodel = std::move(c.countermodel);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SMT-LIB rendering.
// ---------------------------------------------------------------------------

namespace {

std::string smt_int(std::int64_t v) {
  if (v < 0) return "(- " + std::to_string(-v) + ")";
  return std::to_string(v);
}

std::string smt_atom(const DiffAtom& a) {
  std::string lhs;
  if (a.plus && a.minus)
    lhs = "(- " + *a.plus + " " + *a.minus + ")";
  else if (a.plus)
    lhs = *a.plus;
  else if (a.minus)
    lhs = "(- " + *a.minus + ")";
  else
    lhs = "0";
  return "(<= " + lhs + " " + smt_int(a.bound) + ")";
}

std::string smt_interval(const std::string& var, const IntInterval& iv) {
  if (iv.lo && iv.hi) {
    if (*iv.lo == *iv.hi) return "(= " + var + " " + smt_int(*iv.lo) + ")";
    return "(and (<= " + smt_int(*iv.lo) + " " + var + ") (<= " + var + " " +
           smt_int(*iv.hi) + "))";
  }
  if (iv.lo) return "(<= " + smt_int(*iv.lo) + " " + var + ")";
  if (iv.hi) return "(<= " + var + " " + smt_int(*iv.hi) + ")";
  return "true";
}

std::string smt_block(const BlockConstraint& b) {
  if (b.blocks.empty()) return "false";
  if (b.blocks.size() == 1) return smt_interval(b.var, b.blocks.front());
  std::string out = "(or";
  for (const auto& iv : b.blocks) out += " " + smt_interval(b.var, iv);
  return out + ")";
}

}  // namespace

std::string smtlib_term(const Formula& f) {
  if (f.is_false) return "false";
  std::vector<std::string> parts;
  for (const auto& a : f.atoms) parts.push_back(smt_atom(a));
  for (const auto& b : f.blocks) parts.push_back(smt_block(b));
  if (parts.empty()) return "true";
  if (parts.size() == 1) return parts.front();
  std::string out = "(and";
  for (const auto& p : parts) out += " " + p;
  return out + ")";
}

std::string export_smtlib(const Formula& f, const VarSet& universe) {
  for (const auto& v : vars_of(f))
    if (!universe.count(v))
      throw ContractError("formula variable '" + v +
                          "' missing from the declared universe");
  std::ostringstream os;
  for (const auto& v : universe) os << "(declare-const " << v << " Int)\n";
  os << "(assert " << smtlib_term(f) << ")\n";
  return os.str();
}

std::string entailment_query(const Formula& a, const Formula& b) {
  VarSet vs = vars_of(a);
  for (const auto& v : vars_of(b)) vs.insert(v);
  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic QF_LIA)\n";
  for (const auto& v : vs) os << "(declare-const " << v << " Int)\n";
  os << "(assert " << smtlib_term(a) << ")\n";
  os << "(assert (not " << smtlib_term(b) << "))\n";
  return os.str();
}

}  // namespace invcomp
