#pragma once

/*
 * Worklist fixpoint engine.
 *
 * Blocks are processed in ascending id order from a pending set seeded with
 * the entry block (analyzed from the unconstrained top state; programs pin
 * their preconditions with `assume` statements).  Loop heads — back-edge
 * targets found by depth-first search over the CFG — are the only widening
 * points; everywhere else incoming states are joined.  At a widening point
 * the stored state is kept in its raw (possibly unclosed) form between
 * visits and only normalized copies are propagated, so extrapolated bounds
 * are not tightened back before the next widening step.
 *
 * Once the fixpoint is reached, a recording pass re-executes every block
 * and captures one invariant per statement (after its transfer) plus one
 * per conditional edge (after guard refinement).  Each record carries the
 * reduced constraint formula, the variables the point directly affects
 * (assignment target, or the guard's variables), and the native domain
 * state for exact same-domain comparisons.
 */

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "invcomp/ir.hpp"
#include "invcomp/predicates.hpp"
#include "invcomp/zones.hpp"

namespace invcomp {

// Back-edge targets of the CFG, in depth-first order from the entry block
// (true edges explored before false edges).
std::vector<int> widening_points(const Program& p);

struct AnalysisConfig {
  std::string domain = "zones";  // "zones" or "predicates"
  WideningPolicy widening = WideningPolicy::standard();
  Partition partition = Partition::standard();  // predicates only
  std::string label = "Z";  // configuration name used in reports
};

struct PointRecord {
  ProgramPoint point;
  std::string id;  // e.g. "head.0", "head.t"
  Formula formula;
  VarSet dv;  // variables this point directly affects
  bool bottom = false;
  std::variant<std::monostate, ZoneState, PredState> state;
};

struct AnalysisRecord {
  std::string program;
  std::string label;
  std::string domain;
  VarSet universe;
  std::vector<PointRecord> points;       // deterministic order
  std::map<int, int> widen_visits;       // widening point -> merge visits
  int iterations = 0;                    // worklist pops until stabilization
};

AnalysisRecord analyze(const Program& p, const AnalysisConfig& cfg);

}  // namespace invcomp
