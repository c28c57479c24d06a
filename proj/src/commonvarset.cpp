#include "invcomp/commonvarset.hpp"

#include <algorithm>

#include "invcomp/util.hpp"

namespace invcomp {

namespace {

VarSet set_diff(const VarSet& a, const VarSet& b) {
  VarSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

bool superset(const VarSet& a, const VarSet& b) {
  return std::includes(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

CvsResult common_var_set(const VarSet& dv1, const VarSet& dv2,
                         const Invariant& i1, const Invariant& i2,
                         const DeltaFn& d1, const DeltaFn& d2) {
  if (i1.universe != i2.universe)
    throw ContractError("common_var_set requires equal variable universes ('" +
                        i1.id + "' vs '" + i2.id + "')");
  const VarSet& universe = i1.universe;

  auto covered = [&](const DeltaFn& d, const Invariant& inv, const VarSet& dv) {
    SubInvariant sub = d(inv, dv);
    for (const auto& v : sub.vars)
      if (!universe.count(v))
        throw ContractError("delta '" + d.name + "' escaped the universe at '" +
                            inv.id + "' (variable '" + v + "')");
    return sub.vars;
  };

  CvsResult r;
  VarSet s1 = covered(d1, i1, dv1);
  VarSet s2 = covered(d2, i2, dv2);

  while (s1 != s2) {
    if (static_cast<std::size_t>(r.iterations) >= universe.size())
      throw ContractError(
          "common variable set failed to stabilize within |universe| passes; "
          "the minimization function is not monotone");
    ++r.iterations;
    if (superset(s1, s2)) {
      VarSet grow2 = set_diff(s1, s2);
      VarSet add = covered(d2, i2, grow2);
      s2.insert(add.begin(), add.end());
    } else if (superset(s2, s1)) {
      VarSet grow1 = set_diff(s2, s1);
      VarSet add = covered(d1, i1, grow1);
      s1.insert(add.begin(), add.end());
    } else {
      VarSet grow1 = set_diff(s2, s1);
      VarSet grow2 = set_diff(s1, s2);
      VarSet add1 = covered(d1, i1, grow1);
      VarSet add2 = covered(d2, i2, grow2);
      s1.insert(add1.begin(), add1.end());
      s2.insert(add2.begin(), add2.end());
    }
  }

  r.s = std::move(s1);
  r.numerator = r.s.size();
  r.denominator = universe.size();
  return r;
}

}  // namespace invcomp
