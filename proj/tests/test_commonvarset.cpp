#include "doctest.h"

#include <random>

#include "invcomp/commonvarset.hpp"
#include "invcomp/util.hpp"
#include "support.hpp"

using namespace invcomp;

namespace {

Invariant make_inv(const std::string& id, const std::string& formula,
                   const VarSet& universe) {
  Invariant inv;
  inv.id = id;
  inv.formula = parse_formula(formula);
  inv.universe = universe;
  return inv;
}

}  // namespace

TEST_CASE("already-agreeing selections finish without growth passes") {
  const VarSet universe = {"x", "y", "z"};
  const Invariant i1 = make_inv("a", "x-y<=0", universe);
  const Invariant i2 = make_inv("b", "y-x<=1", universe);
  const CvsResult r =
      common_var_set({"x"}, {"y"}, i1, i2, delta_cc(), delta_cc());
  CHECK(r.s == VarSet{"x", "y"});
  CHECK(r.iterations == 0);
  CHECK(r.numerator == 2);
  CHECK(r.denominator == 3);
  CHECK(r.proportion() == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("a lagging side is re-minimized against the surplus") {
  // Side 1 covers {x,y,z} at once; side 2 starts at {x,y} and must be fed
  // the surplus {z}, which drags in nothing new on a chain-free formula.
  const VarSet universe = {"x", "y", "z"};
  const Invariant i1 = make_inv("a", "x-y<=0 & y-z<=0", universe);
  const Invariant i2 = make_inv("b", "x-y<=0 & z<=5", universe);
  const CvsResult r =
      common_var_set({"x"}, {"x"}, i1, i2, delta_cc(), delta_nn());
  CHECK(r.s == universe);
  CHECK(r.iterations == 1);
}

TEST_CASE("incomparable sides both grow in one pass") {
  // nn from {x} covers {x,y} on side 1 and {x,z} on side 2; each side then
  // absorbs the other's surplus.
  const VarSet universe = {"w", "x", "y", "z"};
  const Invariant i1 = make_inv("a", "x-y<=0 & z<=1", universe);
  const Invariant i2 = make_inv("b", "x-z<=0 & y<=1", universe);
  const CvsResult r =
      common_var_set({"x"}, {"x"}, i1, i2, delta_nn(), delta_nn());
  CHECK(r.s == VarSet{"x", "y", "z"});
  CHECK(r.iterations >= 1);
  CHECK(r.s.count("w") == 0);
}

TEST_CASE("scripted growth example stabilizes after one pass") {
  const VarSet universe = {"w", "x", "y", "z"};
  ScriptTrace t1, t2;
  script_entry(t1, "left", {"x", "y"}, parse_formula("y-x<=0"));
  script_entry(t1, "left", {"w"}, Formula::tt(), VarSet{"w"});
  script_entry(t1, "left", {"w", "x", "y"}, parse_formula("y-x<=0"),
               VarSet{"w", "x", "y"});
  script_entry(t2, "right", {"x", "y"}, parse_formula("y-x<=0 & w-y<=0"));
  script_entry(t2, "right", {"w", "x", "y"},
               parse_formula("y-x<=0 & w-y<=0"));

  const Invariant i1 = make_inv("left", "z-x<=0 & y-x<=0", universe);
  const Invariant i2 = make_inv("right", "z-x<=0 & y-x<=0 & w-y<=0",
                                universe);
  const CvsResult r = common_var_set({"x", "y"}, {"x", "y"}, i1, i2,
                                     delta_scripted(t1), delta_scripted(t2));
  CHECK(r.s == VarSet{"w", "x", "y"});
  CHECK(r.iterations == 1);
  CHECK(r.numerator == 3);
  CHECK(r.denominator == 4);
}

TEST_CASE("universe mismatches and escapes are contract errors") {
  const Invariant i1 = make_inv("a", "x<=0", {"x", "y"});
  const Invariant i2 = make_inv("b", "x<=0", {"x", "z"});
  CHECK_THROWS_AS(
      common_var_set({"x"}, {"x"}, i1, i2, delta_cc(), delta_cc()),
      ContractError);

  // A delta returning variables outside the universe is rejected even
  // though the sets would otherwise converge.
  const VarSet universe = {"x", "y"};
  const Invariant a = make_inv("a", "x<=0", universe);
  const Invariant b = make_inv("b", "x<=0", universe);
  const DeltaFn escaping{"esc", [](const Invariant&, const VarSet&) {
    SubInvariant s;
    s.vars = {"x", "ghost"};
    s.source = "esc";
    return s;
  }};
  CHECK_THROWS_AS(common_var_set({"x"}, {"x"}, a, b, escaping, delta_cc()),
                  ContractError);

  // dv outside the universe is rejected by the delta itself.
  CHECK_THROWS_AS(
      common_var_set({"ghost"}, {"x"}, a, b, delta_cc(), delta_cc()),
      ContractError);
}

TEST_CASE("a delta that never covers its surplus is cut off, not looped") {
  // A pathological delta that ignores dv and always answers {x}: the side
  // it drives can never catch up with {x, y}, so the pass budget trips.
  const VarSet universe = {"x", "y"};
  const Invariant i1 = make_inv("a", "true", universe);
  const Invariant i2 = make_inv("b", "true", universe);
  const DeltaFn stubborn{"st", [](const Invariant&, const VarSet&) {
    SubInvariant s;
    s.source = "st";
    s.vars = VarSet{"x"};
    return s;
  }};
  const DeltaFn fixed{"fx", [](const Invariant&, const VarSet&) {
    SubInvariant s;
    s.source = "fx";
    s.vars = VarSet{"x", "y"};
    return s;
  }};
  CHECK_THROWS_AS(
      common_var_set({"x"}, {"x"}, i1, i2, stubborn, fixed),
      ContractError);
}

TEST_CASE("results satisfy the re-minimization fixed point for cc") {
  std::mt19937_64 rng(2718);
  const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f", "g"};
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::uniform_int_distribution<int> natoms(0, 7);
  std::uniform_int_distribution<std::int64_t> bound(-9, 9);

  const auto random_inv = [&](const std::string& id) {
    Invariant inv;
    inv.id = id;
    inv.universe = VarSet(pool.begin(), pool.end());
    const int na = natoms(rng);
    for (int i = 0; i < na; ++i) {
      const auto p = pick(rng);
      const auto m = pick(rng);
      if (p == m)
        inv.formula.atoms.push_back(upper_bound(pool[p], bound(rng)));
      else
        inv.formula.atoms.push_back(difference(pool[p], pool[m], bound(rng)));
    }
    inv.formula.normalize();
    return inv;
  };

  for (int trial = 0; trial < 500; ++trial) {
    const Invariant i1 = random_inv("l");
    const Invariant i2 = random_inv("r");
    VarSet dv1 = {pool[pick(rng)]};
    VarSet dv2 = {pool[pick(rng)]};
    if (trial % 2) dv1.insert(pool[pick(rng)]);

    const CvsResult r =
        common_var_set(dv1, dv2, i1, i2, delta_cc(), delta_cc());
    CHECK(r.iterations <= static_cast<int>(pool.size()));
    CHECK(r.numerator == r.s.size());
    CHECK(r.denominator == pool.size());

    // Fixed point: re-minimizing either side over s covers exactly s.
    CHECK(delta_cc()(i1, r.s).vars == r.s);
    CHECK(delta_cc()(i2, r.s).vars == r.s);

    // s contains both starting points.
    for (const auto& v : dv1) CHECK(r.s.count(v) == 1);
    for (const auto& v : dv2) CHECK(r.s.count(v) == 1);
  }
}

TEST_CASE("mixed fs versus cc converges to the full side quickly") {
  const VarSet universe = {"x", "y", "z"};
  const Invariant i1 = make_inv("a", "x-y<=0 & z<=2", universe);
  const Invariant i2 = make_inv("b", "x-y<=0 & z<=3", universe);
  // fs covers everything immediately; cc must be fed z.
  const CvsResult r =
      common_var_set({"x"}, {"x"}, i1, i2, delta_fs(), delta_cc());
  CHECK(r.s == universe);
  CHECK(r.iterations <= 1);
}
