#pragma once

/*
 * Quantifier-free conjunctive formulas over integer variables.
 *
 * A Formula is the exchange format between the abstract domains, the
 * minimization functions and the comparison backends.  It is a conjunction
 * of
 *   - difference atoms:   v <= c, -v <= c, v1 - v2 <= c
 *   - block constraints:  per-variable disjunctions of integer intervals
 * plus a distinguished unsatisfiable formula (`false`).
 *
 * An unconstrained variable simply does not occur: top is absence.
 * Formulas are kept in canonical form (sorted, deduplicated) so that
 * syntactic equality is meaningful and serialization is deterministic.
 */

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace invcomp {

using VarSet = std::set<std::string>;

// plus - minus <= bound; either side may be absent, never both, never equal.
struct DiffAtom {
  std::optional<std::string> plus;
  std::optional<std::string> minus;
  std::int64_t bound = 0;

  auto operator<=>(const DiffAtom&) const = default;
};

// Inclusive integer interval; a missing end is unbounded.
struct IntInterval {
  std::optional<std::int64_t> lo;
  std::optional<std::int64_t> hi;

  bool contains(std::int64_t v) const {
    return (!lo || *lo <= v) && (!hi || v <= *hi);
  }
  bool empty() const { return lo && hi && *lo > *hi; }

  auto operator<=>(const IntInterval&) const = default;
};

// var is constrained to lie in the union of `blocks`.
struct BlockConstraint {
  std::string var;
  std::vector<IntInterval> blocks;

  bool contains(std::int64_t v) const {
    for (const auto& b : blocks)
      if (b.contains(v)) return true;
    return false;
  }

  auto operator<=>(const BlockConstraint&) const = default;
};

struct Formula {
  bool is_false = false;
  std::vector<DiffAtom> atoms;
  std::vector<BlockConstraint> blocks;

  bool is_true() const { return !is_false && atoms.empty() && blocks.empty(); }

  // Sorts and deduplicates conjuncts; a false formula carries no conjuncts.
  void normalize();

  bool operator==(const Formula&) const = default;

  static Formula ff() { return Formula{true, {}, {}}; }
  static Formula tt() { return Formula{}; }
};

// Exact set of variables syntactically occurring in the formula.
VarSet vars_of(const Formula& f);
VarSet vars_of(const DiffAtom& a);

// Convenience constructors.
DiffAtom upper_bound(std::string v, std::int64_t c);            // v <= c
DiffAtom lower_bound(std::string v, std::int64_t c);            // -v <= c
DiffAtom difference(std::string p, std::string m, std::int64_t c);  // p - m <= c

std::string to_string(const DiffAtom& a);
std::string to_string(const IntInterval& iv);
std::string to_string(const Formula& f);

// Parses the textual form produced by to_string:
//   "true" | "false" | conjunct (" & " conjunct)*
//   conjunct := atom | var " in {" interval ("," interval)* "}"
//   atom     := ["-"]var ["-" var] "<=" int
//   interval := int | "[" end "," end "]"   with end := int | "-inf" | "+inf"
// Throws std::runtime_error on malformed input.
Formula parse_formula(const std::string& text);

}  // namespace invcomp
