#pragma once

/*
 * Invariant-minimization functions.
 *
 * Given an invariant I (a reduced conjunctive formula over a fixed variable
 * universe) and the set dv of variables a transfer step updated, a
 * minimization function selects the portion of I relevant to dv:
 *
 *   fs  — the whole formula (no minimization; worst case)
 *   nn  — conjuncts sharing at least one variable with dv
 *   cc  — conjuncts in any connected component of the variable-sharing
 *         graph reachable from dv
 *   scripted — exact replay from a (invariant id, dv) -> result table
 *
 * The result also carries its covered-variable set (`vars`).  Covered
 * variables are the selected conjuncts' variables plus the dv variables
 * the invariant leaves unconstrained: a variable whose entire content is
 * "no constraint" is still *covered* by the selection even though top is
 * represented by absence, and the fixed-point set computation relies on
 * that accounting.
 */

#include <functional>
#include <map>
#include <string>

#include "invcomp/formula.hpp"

namespace invcomp {

// A program-point invariant: a reduced formula plus the analysis' full
// variable universe (every program variable, constrained or not).
struct Invariant {
  std::string id;  // stable point label; keys scripted replay
  Formula formula;
  VarSet universe;
};

// A selection of conjuncts from one invariant.
struct SubInvariant {
  Formula formula;
  VarSet vars;         // covered variables (see above)
  std::string source;  // name of the producing minimization
};

inline const VarSet& vars_of(const SubInvariant& s) { return s.vars; }

struct DeltaFn {
  std::string name;
  std::function<SubInvariant(const Invariant&, const VarSet&)> fn;

  SubInvariant operator()(const Invariant& inv, const VarSet& dv) const {
    return fn(inv, dv);
  }
};

DeltaFn delta_fs();
DeltaFn delta_nn();
DeltaFn delta_cc();

// Replay table: (invariant id, dv) -> scripted result.
using ScriptTrace = std::map<std::pair<std::string, VarSet>, SubInvariant>;

DeltaFn delta_scripted(ScriptTrace trace);

// Builds a trace entry, defaulting covered vars to vars(formula) ∪ dv.
void script_entry(ScriptTrace& trace, const std::string& invariant_id,
                  const VarSet& dv, const Formula& result,
                  std::optional<VarSet> vars = std::nullopt);

// Loads a JSON replay file:
//   {"entries": [{"invariant": "head.t", "dv": ["x","y"],
//                 "formula": "y-x<=0", "vars": ["x","y"]}, ...]}
// "vars" is optional and defaults as in script_entry.
DeltaFn delta_scripted_from_file(const std::string& path);

// Selects the delta registered under `name`: "fs", "nn", "cc", or
// "scripted:<path>".  Throws ConfigError on unknown names.
DeltaFn delta_by_name(const std::string& name);

}  // namespace invcomp
