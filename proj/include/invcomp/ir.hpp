#pragma once

/*
 * A small imperative three-address IR and its control-flow graph.
 *
 * Programs are a single procedure over integer parameters, written as a
 * list of labeled basic blocks:
 *
 *   proc count(i, n) {
 *     entry: i := 0; goto head;
 *     head:  if (i < n) body else done;
 *     body:  i := i + 1; goto head;
 *     done:  return;
 *   }
 *
 * Statements are assignments (rhs: constant, ±v + c, v1 ± v2 + c, or the
 * nondeterministic `?`), `skip`, and `assume (cond)` guards.  Terminators
 * are `goto`, two-way `if`, and `return`.  The parser validates that all
 * variables are declared parameters, labels are unique, branch targets
 * exist, and every non-entry block is reachable from the entry block (the
 * first block in the text).
 */

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "invcomp/formula.hpp"

namespace invcomp {

struct ParseError : std::runtime_error {
  ParseError(int line, int col, const std::string& what)
      : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                           std::to_string(col) + ": " + what),
        line(line),
        col(col) {}
  int line;
  int col;
};

struct LinearExpr {
  enum class Kind { Const, Linear, Nondet };
  struct Term {
    bool negated = false;
    std::string var;
    bool operator==(const Term&) const = default;
  };

  Kind kind = Kind::Const;
  std::optional<Term> t1;  // present iff kind == Linear
  std::optional<Term> t2;
  std::int64_t constant = 0;

  bool operator==(const LinearExpr&) const = default;
};

enum class RelOp { Le, Lt, Ge, Gt, Eq, Ne };

// lhs relop (rhs_var + rhs_const) — rhs_var absent for pure constants.
struct Condition {
  std::string lhs;
  RelOp op = RelOp::Le;
  std::optional<std::string> rhs_var;
  std::int64_t rhs_const = 0;

  bool operator==(const Condition&) const = default;
};

struct Statement {
  enum class Kind { Assign, Skip, Assume };
  Kind kind = Kind::Skip;
  std::string target;  // Assign only
  LinearExpr rhs;      // Assign only
  Condition cond;      // Assume only
};

struct Terminator {
  enum class Kind { Goto, If, Return };
  Kind kind = Kind::Return;
  Condition cond;      // If only
  int target = -1;     // Goto target / If true-successor
  int alt_target = -1; // If false-successor
};

struct Block {
  std::string label;
  std::vector<Statement> stmts;
  Terminator term;
};

struct Program {
  std::string name;
  std::vector<std::string> params;  // declaration order
  std::vector<Block> blocks;        // ids are indices; entry is block 0

  VarSet var_set() const {
    return VarSet(params.begin(), params.end());
  }
  // Successor block ids in branch order (true edge before false edge).
  std::vector<int> successors(int block) const;
};

Program parse_program(const std::string& text);

// Canonical textual form; parse(pretty_print(p)) reproduces p.
std::string pretty_print(const Program& p);

// Variables an executed statement may change: assignment targets, both
// sides of a guard atom, nothing for skip.
VarSet updated_vars(const Statement& s);
VarSet cond_vars(const Condition& c);

// A branch condition (or its negation) lowered to difference atoms.
// `infeasible` marks conditions that are constantly false under the chosen
// polarity (e.g. the false edge of `x <= x`); `atoms` may be empty for
// conditions a conjunction of difference atoms cannot express (`!=`).
struct GuardAtoms {
  bool infeasible = false;
  std::vector<DiffAtom> atoms;
};
GuardAtoms guard_atoms(const Condition& c, bool polarity);

// An invariant-recording site: after statement `index` of `block`, or on
// one outgoing edge of its `if` terminator (index == #stmts).
struct ProgramPoint {
  enum class Edge { None, True, False };
  int block = 0;
  int index = 0;
  Edge edge = Edge::None;

  auto operator<=>(const ProgramPoint&) const = default;
};

// Stable human-readable point name, e.g. "head.0", "head.t", "head.f".
std::string point_id(const Program& p, const ProgramPoint& pt);

}  // namespace invcomp
