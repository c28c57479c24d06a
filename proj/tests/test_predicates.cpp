#include "doctest.h"

#include <random>

#include "invcomp/predicates.hpp"
#include "invcomp/util.hpp"
#include "support.hpp"

using namespace invcomp;
using testsupport::Env;
using testsupport::for_each_point;
using testsupport::formula_holds;

namespace {

// Concrete truth of a predicate state at a point: every variable lies in
// the union of its blocks, and all relational atoms hold.
bool pred_holds(const PredState& p, const Env& env) {
  const VarSet all(p.vars.begin(), p.vars.end());
  return formula_holds(pred_to_formula(p, all), env);
}

Condition cond(std::string lhs, RelOp op, std::int64_t c) {
  return Condition{std::move(lhs), op, std::nullopt, c};
}
Condition condv(std::string lhs, RelOp op, std::string rhs, std::int64_t c) {
  return Condition{std::move(lhs), op, std::move(rhs), c};
}

Statement assign_const(std::string t, std::int64_t c) {
  Statement s;
  s.kind = Statement::Kind::Assign;
  s.target = std::move(t);
  s.rhs = LinearExpr{LinearExpr::Kind::Const, {}, {}, c};
  return s;
}

Statement assign_copy(std::string t, std::string v, std::int64_t c,
                      bool negated = false) {
  Statement s;
  s.kind = Statement::Kind::Assign;
  s.target = std::move(t);
  s.rhs = LinearExpr{LinearExpr::Kind::Linear,
                     LinearExpr::Term{negated, std::move(v)}, {}, c};
  return s;
}

}  // namespace

TEST_CASE("the default partition tiles the integers") {
  const Partition p = Partition::standard();
  REQUIRE(p.size() == 7);
  CHECK(p.blocks.front() == IntInterval{std::nullopt, -5});
  CHECK(p.blocks.back() == IntInterval{5, std::nullopt});

  // Every integer in a wide range belongs to exactly one block.
  for (std::int64_t v = -50; v <= 50; ++v) {
    int owners = 0;
    for (const auto& b : p.blocks) owners += b.contains(v);
    CHECK(owners == 1);
    CHECK(p.blocks[p.block_of(v)].contains(v));
  }

  // Adjacent blocks meet without gaps.
  for (std::size_t i = 1; i < p.size(); ++i) {
    REQUIRE(p.blocks[i - 1].hi.has_value());
    REQUIRE(p.blocks[i].lo.has_value());
    CHECK(*p.blocks[i - 1].hi + 1 == *p.blocks[i].lo);
  }
}

TEST_CASE("from_starts validates its input") {
  CHECK_THROWS_AS(Partition::from_starts({}), ConfigError);
  CHECK_THROWS_AS(Partition::from_starts({1, 1}), ConfigError);
  CHECK_THROWS_AS(Partition::from_starts({2, 1}), ConfigError);

  const Partition single = Partition::from_starts({0});
  REQUIRE(single.size() == 2);
  CHECK(single.block_of(-1) == 0);
  CHECK(single.block_of(0) == 1);
}

TEST_CASE("covering finds every intersecting block") {
  const Partition p = Partition::standard();
  CHECK(p.covering(IntInterval{0, 0}) == std::set<std::size_t>{3});
  CHECK(p.covering(IntInterval{0, 3}) == std::set<std::size_t>{3, 4, 5});
  CHECK(p.covering(IntInterval{std::nullopt, -5}) == std::set<std::size_t>{0});
  CHECK(p.covering(IntInterval{6, std::nullopt}) == std::set<std::size_t>{6});
  CHECK(p.covering(IntInterval{std::nullopt, std::nullopt}) == p.full_set());
  CHECK(p.covering(IntInterval{3, 1}).empty());  // empty range
}

TEST_CASE("top and bottom construction") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  CHECK_FALSE(top.bottom);
  REQUIRE(top.blocksets.size() == 2);
  CHECK(top.blocksets[0] == top.partition.full_set());
  CHECK(top.rel.empty());
  CHECK(top.index_of("y") == 1);
  CHECK_THROWS_AS(top.index_of("nope"), ContractError);

  const PredState bot = PredState::bot(Partition::standard(), {"x", "y"});
  CHECK(bot.bottom);
  CHECK(bot.blocksets[0].empty());
}

TEST_CASE("constant assignment pins the target to one block") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  const PredState s = pred_transfer(top, assign_const("x", 3));
  CHECK(s.blocksets[0] == std::set<std::size_t>{5});  // [2,4]
  CHECK(s.blocksets[1] == top.partition.full_set());
  CHECK(s.rel.empty());
}

TEST_CASE("copy assignment shifts blocks and records the equality") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  const PredState y0 = pred_transfer(top, assign_const("y", 0));

  const PredState copy = pred_transfer(y0, assign_copy("x", "y", 0));
  CHECK(copy.blocksets[0] == std::set<std::size_t>{3});
  REQUIRE(copy.rel.size() == 2);
  CHECK(copy.rel[0] == difference("x", "y", 0));
  CHECK(copy.rel[1] == difference("y", "x", 0));

  const PredState shifted = pred_transfer(y0, assign_copy("x", "y", 2));
  CHECK(shifted.blocksets[0] == std::set<std::size_t>{5});  // 0 + 2 in [2,4]
  REQUIRE(shifted.rel.size() == 2);
  CHECK(shifted.rel[0] == difference("x", "y", 2));
  CHECK(shifted.rel[1] == difference("y", "x", -2));

  // Self-increment keeps no stale relation and shifts the blockset image.
  const PredState x1 = pred_transfer(top, assign_const("x", 1));
  const PredState inc = pred_transfer(x1, assign_copy("x", "x", 1));
  CHECK(inc.blocksets[0] == std::set<std::size_t>{5});  // 1 + 1 = 2
  CHECK(inc.rel.empty());
}

TEST_CASE("inexpressible assignments reset the target to top") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  const PredState pinned = pred_guard(
      pred_transfer(top, assign_const("x", 1)), condv("x", RelOp::Le, "y", 0),
      true);
  REQUIRE_FALSE(pinned.rel.empty());

  Statement nondet;
  nondet.kind = Statement::Kind::Assign;
  nondet.target = "x";
  nondet.rhs = LinearExpr{LinearExpr::Kind::Nondet, {}, {}, 0};
  const PredState after = pred_transfer(pinned, nondet);
  CHECK(after.blocksets[0] == after.partition.full_set());
  for (const DiffAtom& a : after.rel) {
    CHECK(a.plus != "x");
    CHECK(a.minus != "x");
  }

  const PredState negated = pred_transfer(pinned, assign_copy("x", "y", 0,
                                                              true));
  CHECK(negated.blocksets[0] == negated.partition.full_set());
}

TEST_CASE("guards filter blocksets and record atoms") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});

  const PredState le0 = pred_guard(top, cond("x", RelOp::Le, 0), true);
  CHECK(le0.blocksets[0] == std::set<std::size_t>{0, 1, 2, 3});
  REQUIRE(le0.rel.size() == 1);
  CHECK(le0.rel[0] == upper_bound("x", 0));

  const PredState gt0 = pred_guard(top, cond("x", RelOp::Le, 0), false);
  CHECK(gt0.blocksets[0] == std::set<std::size_t>{4, 5, 6});

  const PredState rel = pred_guard(top, condv("x", RelOp::Lt, "y", 0), true);
  CHECK(rel.blocksets[0] == rel.partition.full_set());  // no unary info
  REQUIRE(rel.rel.size() == 1);
  CHECK(rel.rel[0] == difference("x", "y", -1));

  // Equality contributes both directions.
  const PredState eq = pred_guard(top, condv("x", RelOp::Eq, "y", 0), true);
  REQUIRE(eq.rel.size() == 2);

  // `!=` cannot be represented: no refinement, no new atoms.
  const PredState ne = pred_guard(top, condv("x", RelOp::Ne, "y", 0), true);
  CHECK(ne.blocksets[0] == ne.partition.full_set());
  CHECK(ne.rel.empty());
}

TEST_CASE("bottom arises from empty blocksets and from contradictions") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});

  // Blockset route: x == 0 then x >= 1.
  const PredState x0 = pred_transfer(top, assign_const("x", 0));
  CHECK(pred_guard(x0, cond("x", RelOp::Ge, 1), true).bottom);

  // Relational route: x < y and y < x with unconstrained blocksets.
  const PredState half = pred_guard(top, condv("x", RelOp::Lt, "y", 0), true);
  CHECK(pred_guard(half, condv("y", RelOp::Lt, "x", 0), true).bottom);

  // Hull route: blocksets force x >= 5, y <= -5, but x <= y.
  PredState hulls = pred_guard(top, cond("x", RelOp::Ge, 5), true);
  hulls = pred_guard(hulls, cond("y", RelOp::Le, -5), true);
  CHECK_FALSE(hulls.bottom);
  CHECK(pred_guard(hulls, condv("x", RelOp::Le, "y", 0), true).bottom);

  // Infeasible self-comparison collapses immediately.
  CHECK(pred_guard(top, condv("x", RelOp::Lt, "x", 0), true).bottom);
}

TEST_CASE("join unions blocksets and keeps weakened common atoms") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  const PredState a = pred_guard(
      pred_transfer(top, assign_const("x", 0)),
      condv("x", RelOp::Le, "y", 0), true);
  const PredState b = pred_guard(
      pred_transfer(top, assign_const("x", 1)),
      condv("x", RelOp::Le, "y", 2), true);

  const PredState j = pred_join(a, b);
  CHECK(j.blocksets[0] == std::set<std::size_t>{3, 4});
  REQUIRE(j.rel.size() == 1);
  CHECK(j.rel[0] == difference("x", "y", 2));  // weakened to the max bound

  // Atoms present on only one side disappear.
  const PredState c = pred_guard(top, condv("y", RelOp::Le, "x", 0), true);
  CHECK(pred_join(a, c).rel.empty());

  // Bottom is the identity.
  const PredState bot = PredState::bot(a.partition, a.vars);
  CHECK(pred_includes(a, pred_join(bot, a)));
  CHECK(pred_includes(pred_join(a, bot), a));
}

TEST_CASE("join over-approximates both arguments pointwise") {
  const Partition p = Partition::standard();
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> c(-6, 6);
  const std::vector<std::string> vars = {"x", "y"};

  for (int trial = 0; trial < 50; ++trial) {
    PredState a = PredState::top(p, vars);
    a = pred_guard(a, cond("x", RelOp::Le, c(rng)), true);
    a = pred_guard(a, condv("x", RelOp::Le, "y", c(rng)), true);
    PredState b = PredState::top(p, vars);
    b = pred_guard(b, cond("x", RelOp::Ge, c(rng)), true);
    b = pred_guard(b, cond("y", RelOp::Le, c(rng)), true);
    const PredState j = pred_join(a, b);
    const bool sound = for_each_point(vars, 8, [&](const Env& env) {
      if (pred_holds(a, env) && !pred_holds(j, env)) return false;
      if (pred_holds(b, env) && !pred_holds(j, env)) return false;
      return true;
    });
    CHECK(sound);
    CHECK(pred_includes(a, j));
    CHECK(pred_includes(b, j));
  }
}

TEST_CASE("widening drops atoms whose bound would keep growing") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  const PredState a = pred_guard(top, condv("x", RelOp::Le, "y", 0), true);
  const PredState grown = pred_guard(top, condv("x", RelOp::Le, "y", 3), true);
  const PredState stable = pred_guard(top, condv("x", RelOp::Le, "y", -2),
                                      true);

  // The candidate's bound grew past a's: the atom is widened away.
  CHECK(pred_widen(a, grown).rel.empty());
  // The candidate is at most a's bound: the atom stays at a's bound.
  REQUIRE(pred_widen(a, stable).rel.size() == 1);
  CHECK(pred_widen(a, stable).rel[0] == difference("x", "y", 0));
  // Identical sides are a fixpoint.
  CHECK(pred_widen(a, a).rel == a.rel);

  // Blocksets still union.
  const PredState ax = pred_transfer(top, assign_const("x", 0));
  const PredState bx = pred_transfer(top, assign_const("x", 1));
  CHECK(pred_widen(ax, bx).blocksets[0] == std::set<std::size_t>{3, 4});
}

TEST_CASE("repeated widening terminates on growing chains") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  PredState acc = pred_guard(top, cond("x", RelOp::Le, 0), true);
  for (int step = 1; step <= 40; ++step) {
    PredState next = pred_guard(top, cond("x", RelOp::Le, step), true);
    const PredState widened = pred_widen(acc, next);
    if (pred_includes(widened, acc) && pred_includes(acc, widened)) break;
    acc = widened;
    REQUIRE(step < 20);  // the finite lattice must stabilize quickly
  }
}

TEST_CASE("inclusion checks blocksets and atom entailment") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  const PredState tight = pred_guard(top, condv("x", RelOp::Le, "y", 0), true);
  const PredState loose = pred_guard(top, condv("x", RelOp::Le, "y", 2), true);

  CHECK(pred_includes(tight, loose));
  CHECK_FALSE(pred_includes(loose, tight));
  CHECK(pred_includes(tight, top));
  CHECK_FALSE(pred_includes(top, tight));
  CHECK(pred_includes(tight, tight));

  const PredState narrow = pred_guard(top, cond("x", RelOp::Le, 0), true);
  const PredState wide = pred_guard(top, cond("x", RelOp::Le, 4), true);
  CHECK(pred_includes(narrow, wide));
  CHECK_FALSE(pred_includes(wide, narrow));

  const PredState bot = PredState::bot(top.partition, top.vars);
  CHECK(pred_includes(bot, tight));
  CHECK_FALSE(pred_includes(tight, bot));
}

TEST_CASE("pred_to_formula restricts to the requested variables") {
  const PredState top = PredState::top(Partition::standard(), {"x", "y"});
  PredState s = pred_transfer(top, assign_const("x", 0));
  s = pred_guard(s, condv("x", RelOp::Le, "y", 0), true);

  const Formula full = pred_to_formula(s, {"x", "y"});
  REQUIRE(full.blocks.size() == 1);  // y stays top and is omitted
  CHECK(full.blocks[0].var == "x");
  CHECK(full.blocks[0].blocks == std::vector<IntInterval>{IntInterval{0, 0}});
  REQUIRE(full.atoms.size() == 1);
  CHECK(full.atoms[0] == difference("x", "y", 0));

  const Formula only_x = pred_to_formula(s, {"x"});
  CHECK(only_x.atoms.empty());  // the relational atom mentions y
  REQUIRE(only_x.blocks.size() == 1);

  const Formula only_y = pred_to_formula(s, {"y"});
  CHECK(only_y.is_true());

  CHECK(pred_to_formula(PredState::bot(top.partition, top.vars),
                        {"x", "y"}).is_false);
  CHECK(pred_to_formula(top, {"x", "y"}).is_true());
}

TEST_CASE("transfers and guards are sound on sampled runs") {
  const Partition p = Partition::standard();
  const std::vector<std::string> vars = {"x", "y"};
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::int64_t> c(-6, 6);

  for (int trial = 0; trial < 60; ++trial) {
    PredState s = PredState::top(p, vars);
    s = pred_guard(s, cond("x", RelOp::Ge, c(rng)), true);
    s = pred_guard(s, cond("y", RelOp::Le, c(rng)), true);

    // A copy assignment then a guard; every surviving concrete run must
    // satisfy the final abstract state.
    const std::int64_t offset = c(rng);
    const Statement st = assign_copy("x", "y", offset);
    const Condition g = condv("x", RelOp::Le, "y", 1);
    const PredState mid = pred_transfer(s, st);
    const PredState fin = pred_guard(mid, g, true);

    const bool sound = for_each_point(vars, 8, [&](const Env& env) {
      if (!pred_holds(s, env)) return true;
      Env after = env;
      after["x"] = env.at("y") + offset;
      if (!pred_holds(mid, after)) return false;
      if (after.at("x") <= after.at("y") + 1 && !pred_holds(fin, after))
        return false;
      return true;
    });
    CHECK(sound);
  }
}
