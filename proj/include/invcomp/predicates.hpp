#pragma once

/*
 * Relational Predicates: a lightweight non-relational/relational hybrid.
 *
 * Each variable is abstracted by a set of blocks from a fixed integer
 * partition (default: (-inf,-5], (-5,-2], {-1}, {0}, {1}, [2,5), [5,+inf))
 * — its value lies in the union of the chosen blocks.  A shared set of
 * difference atoms (`rel`) tracks relations contributed by guards and
 * exact assignments.
 *
 * Joins take per-variable blockset unions and keep only relational atoms
 * common to both sides (weakening same-shape atoms to the larger
 * constant).  Widening additionally drops any atom the new state does not
 * already satisfy at the same or a smaller constant, so relational
 * constants cannot grow forever; blocksets ascend in a finite lattice.
 *
 * A state is bottom when some blockset is empty or when the relational
 * atoms are unsatisfiable together with the per-variable blockset hulls
 * (detected by a difference-bound closure).  Assignments with an
 * inexpressible right-hand side reset the target's blockset to top and
 * drop its relational atoms.
 */

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "invcomp/formula.hpp"
#include "invcomp/ir.hpp"

namespace invcomp {

struct Partition {
  std::vector<IntInterval> blocks;  // ascending, tiling the integers

  // Blocks are [starts[i], starts[i+1] - 1] plus the two unbounded ends
  // (-inf, starts[0] - 1] and [starts.back(), +inf).
  static Partition from_starts(const std::vector<std::int64_t>& starts);
  static Partition standard();  // starts {-4, -1, 0, 1, 2, 5}

  std::size_t size() const { return blocks.size(); }
  std::size_t block_of(std::int64_t v) const;
  // Indices of blocks with a non-empty intersection with `range`.
  std::set<std::size_t> covering(const IntInterval& range) const;
  std::set<std::size_t> full_set() const;
};

struct PredState {
  Partition partition;
  std::vector<std::string> vars;  // fixed order
  std::vector<std::set<std::size_t>> blocksets;  // per variable
  std::vector<DiffAtom> rel;  // canonical: sorted, one atom per shape
  bool bottom = false;

  static PredState top(Partition p, std::vector<std::string> vs);
  static PredState bot(Partition p, std::vector<std::string> vs);

  std::size_t index_of(const std::string& v) const;
};

PredState pred_transfer(const PredState& s, const Statement& st);
PredState pred_guard(const PredState& s, const Condition& c, bool polarity);
PredState pred_join(const PredState& a, const PredState& b);
PredState pred_widen(const PredState& a, const PredState& b);

// True iff `a` describes a subset of the states `b` describes (syntactic
// sufficient check: blockset containment plus atom-wise entailment).
bool pred_includes(const PredState& a, const PredState& b);

// Conjunction of the per-variable block disjunctions (top omitted) and the
// relational atoms, restricted to variables in `s`.
Formula pred_to_formula(const PredState& p, const VarSet& s);

}  // namespace invcomp
