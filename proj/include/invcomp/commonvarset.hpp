#pragma once

/*
 * Fixed-point computation of the common variable set two invariants must
 * be compared over.
 *
 * Starting from each side's minimized selection for its own updated
 * variables, the two covered-variable sets are grown until they agree:
 * whichever set is smaller is re-minimized against the surplus of the
 * other (both are, when the sets are incomparable).  Each pass feeds at
 * least one new variable into the lagging side, so the loop terminates
 * within |universe| passes for monotone minimizations; exceeding that
 * budget is reported as a contract error rather than looping forever.
 *
 * The result s satisfies s = vars(delta1(I1, s)) = vars(delta2(I2, s)) for
 * idempotent, additive minimizations (fs and cc are; scripted traces
 * replayed from such minimizations inherit it).
 */

#include <cstddef>

#include "invcomp/delta.hpp"

namespace invcomp {

struct CvsResult {
  VarSet s;
  int iterations = 0;          // passes through the growth loop
  std::size_t numerator = 0;   // |s|
  std::size_t denominator = 1; // |universe|

  double proportion() const {
    return denominator == 0
               ? 0.0
               : static_cast<double>(numerator) / static_cast<double>(denominator);
  }
};

// Requires i1.universe == i2.universe and dv1, dv2 within it; the deltas
// must stay inside the universe.  Violations raise ContractError.
CvsResult common_var_set(const VarSet& dv1, const VarSet& dv2,
                         const Invariant& i1, const Invariant& i2,
                         const DeltaFn& d1, const DeltaFn& d2);

}  // namespace invcomp
