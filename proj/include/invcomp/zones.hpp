#pragma once

/*
 * Zones: conjunctions of bounds on variable differences, represented as a
 * difference-bound matrix (DBM).
 *
 * A state over variables v1..vn is an (n+1)x(n+1) matrix of weights where
 * index 0 is the constant-zero pseudo-variable and m[i][j] bounds vi - vj
 * (vi - vj <= m[i][j], with +inf meaning unbounded).  Rows/columns follow
 * the program's parameter declaration order, so all traversals are
 * deterministic.
 *
 * Invariants maintained here:
 *  - closure() runs all-pairs shortest paths; a negative diagonal means the
 *    constraint system is unsatisfiable and the state collapses to bottom.
 *  - join is pointwise max of closed matrices (and is itself closed).
 *  - widening keeps a bound only if the new bound does not exceed it;
 *    unstable bounds go to +inf (standard/delayed) or to the smallest
 *    configured threshold that covers the new bound.  The widened matrix is
 *    deliberately NOT re-closed: re-closing between widening steps can
 *    reintroduce refuted bounds and defeat convergence.  Callers compare
 *    and propagate closed copies instead.
 */

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "invcomp/formula.hpp"
#include "invcomp/ir.hpp"
#include "invcomp/util.hpp"

namespace invcomp {

// A DBM entry: an integer bound or +infinity.
struct Weight {
  std::int64_t v = 0;
  bool inf = false;

  static Weight infinity() { return Weight{0, true}; }
  static Weight of(std::int64_t x) { return Weight{x, false}; }

  Weight operator+(const Weight& o) const {
    if (inf || o.inf) return infinity();
    return of(checked_add(v, o.v));
  }
  bool operator<(const Weight& o) const {
    if (inf) return false;
    if (o.inf) return true;
    return v < o.v;
  }
  bool operator<=(const Weight& o) const { return !(o < *this); }
  bool operator==(const Weight& o) const {
    return inf == o.inf && (inf || v == o.v);
  }
};

struct WideningPolicy {
  enum class Kind { Standard, Delayed, Threshold };
  Kind kind = Kind::Standard;
  // Number of visits to a widening point before extrapolation starts.
  int delay = 2;
  // Ascending candidate bounds for Kind::Threshold.
  std::vector<std::int64_t> thresholds = {0, 1, 10, 100, 1000};

  static WideningPolicy standard() { return WideningPolicy{}; }
  static WideningPolicy delayed(int k) {
    return WideningPolicy{Kind::Delayed, k, {}};
  }
  static WideningPolicy threshold(
      std::vector<std::int64_t> ts = {0, 1, 10, 100, 1000}) {
    return WideningPolicy{Kind::Threshold, 2, std::move(ts)};
  }
};

struct ZoneState {
  std::vector<std::string> vars;  // fixed order; matrix index i+1 <-> vars[i]
  std::vector<Weight> m;          // row-major, dim = vars.size() + 1
  bool bottom = false;
  bool closed = false;

  static ZoneState top(std::vector<std::string> vs);
  static ZoneState bot(std::vector<std::string> vs);

  std::size_t dim() const { return vars.size() + 1; }
  Weight& at(std::size_t i, std::size_t j) { return m[i * dim() + j]; }
  const Weight& at(std::size_t i, std::size_t j) const {
    return m[i * dim() + j];
  }
  // 1-based matrix index of a variable; throws on unknown names.
  std::size_t index_of(const std::string& v) const;
};

// All-pairs shortest paths; detects unsatisfiability (negative cycle).
ZoneState closure(const ZoneState& z);

// Strongest expressible postcondition of a statement.
ZoneState zone_transfer(const ZoneState& z, const Statement& s);

// Guard refinement along a branch edge.
ZoneState zone_guard(const ZoneState& z, const Condition& c, bool polarity);

// Least upper bound (pointwise max of closed matrices).
ZoneState zone_join(const ZoneState& a, const ZoneState& b);

// Widening of stored state `a` (possibly unclosed) by candidate `b`.
// While visit_count < policy.delay this is plain join.
ZoneState zone_widen(const ZoneState& a, const ZoneState& b,
                     const WideningPolicy& p, int visit_count);

// Minimal atom set whose re-closure reproduces the closed matrix: bounds
// implied by a two-step path are dropped, zero-weight cycles (equality
// classes) are kept as exact chains.  Unbounded entries never appear.
std::vector<DiffAtom> reduce_redundant(const ZoneState& closed_z);

// True iff the projection of `a` onto s (plus the zero row/column) is
// pointwise at most the projection of `b`.
bool zone_includes(const ZoneState& a, const ZoneState& b, const VarSet& s);

// Reduced formula restricted to atoms whose variables all lie in `s`.
Formula zone_to_formula(const ZoneState& z, const VarSet& s);

// Semantic equality (mutual inclusion over all variables).
bool zone_equal(const ZoneState& a, const ZoneState& b);

}  // namespace invcomp
