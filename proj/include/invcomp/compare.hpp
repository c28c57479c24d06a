#pragma once

/*
 * Invariant comparison: entailment backends, outcome classification, and
 * the full/minimal comparison drivers.
 *
 * Entailment a => b is decided as unsatisfiability of a ∧ ¬b.  Three
 * interchangeable backends exist:
 *
 *   OracleBackend   — brute-force enumeration of all integer models inside
 *                     a configurable box; exact within the box and never
 *                     answers Unknown.  The box volume is capped; blowing
 *                     the cap is a configuration error, not an Unknown.
 *   NativeZoneBackend — exact difference-logic decision via DBM closure;
 *                     only valid for block-free formulas.
 *   ExternalSolverBackend — SMT-LIB v2 child process; (reset) per query,
 *                     timeout or malformed replies yield Unknown.
 *
 * compare_full classifies the two full reduced formulas.  compare_minimal
 * first computes the common variable set and classifies the minimized
 * selections instead; syntactically identical sides short-circuit to
 * Equivalent with an empty set and no backend call.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "invcomp/commonvarset.hpp"
#include "invcomp/delta.hpp"
#include "invcomp/formula.hpp"

namespace invcomp {

enum class Outcome {
  Equivalent,
  LeftMorePrecise,
  RightMorePrecise,
  Incomparable,
  Unknown,
};

std::string to_string(Outcome o);
const std::vector<Outcome>& all_outcomes();

enum class Entail { Yes, No, Unknown };

using Model = std::map<std::string, std::int64_t>;

struct EntailResult {
  Entail value = Entail::Unknown;
  std::optional<Model> countermodel;  // set for No when one is available
};

class EntailmentBackend {
 public:
  virtual ~EntailmentBackend() = default;
  virtual EntailResult entails(const Formula& a, const Formula& b) = 0;
  virtual std::string name() const = 0;
};

class OracleBackend final : public EntailmentBackend {
 public:
  explicit OracleBackend(std::int64_t box = 64,
                         std::int64_t max_points = 10'000'000);
  EntailResult entails(const Formula& a, const Formula& b) override;
  std::string name() const override { return "oracle"; }
  std::int64_t box() const { return box_; }

 private:
  std::int64_t box_;
  std::int64_t max_points_;
};

class NativeZoneBackend final : public EntailmentBackend {
 public:
  EntailResult entails(const Formula& a, const Formula& b) override;
  std::string name() const override { return "native"; }
};

class SolverClient;

class ExternalSolverBackend final : public EntailmentBackend {
 public:
  explicit ExternalSolverBackend(std::string command, int timeout_ms = 10000);
  ~ExternalSolverBackend() override;
  EntailResult entails(const Formula& a, const Formula& b) override;
  std::string name() const override { return "extern"; }

 private:
  std::unique_ptr<SolverClient> client_;
};

// Precision comparison of two formulas under one backend.  The detailed
// form also surfaces a countermodel (a state separating the two formulas)
// when the backend produced one.
struct ClassifyResult {
  Outcome outcome = Outcome::Unknown;
  std::optional<Model> countermodel;
};

ClassifyResult classify_detail(const Formula& left, const Formula& right,
                               EntailmentBackend& backend);
Outcome classify(const Formula& left, const Formula& right,
                 EntailmentBackend& backend);

// One side of a program-point comparison.
struct PointInvariant {
  Invariant invariant;
  VarSet dv;
};

struct MinimalComparison {
  Outcome outcome = Outcome::Unknown;
  CvsResult cvs;
  Formula left_sub, right_sub;
  std::optional<Model> countermodel;
};

Outcome compare_full(const Invariant& left, const Invariant& right,
                     EntailmentBackend& backend);
ClassifyResult compare_full_detail(const Invariant& left,
                                   const Invariant& right,
                                   EntailmentBackend& backend);

MinimalComparison compare_minimal(const PointInvariant& left,
                                  const PointInvariant& right,
                                  const DeltaFn& dl, const DeltaFn& dr,
                                  EntailmentBackend& backend);

// SMT-LIB v2 rendering: sorted declarations over `universe` followed by
// one assertion of the formula.
std::string export_smtlib(const Formula& f, const VarSet& universe);

// Full satisfiability script for a ∧ ¬b (unsat ⇔ a entails b), without
// (check-sat); the backend appends protocol commands.
std::string entailment_query(const Formula& a, const Formula& b);

// The assertion term alone, e.g. "(and (<= (- z x) 0) (= w 0))".
std::string smtlib_term(const Formula& f);

}  // namespace invcomp
