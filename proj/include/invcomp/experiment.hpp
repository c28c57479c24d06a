#pragma once

/*
 * Batch comparison experiments and paper-style report emission.
 *
 * An experiment runs a list of (left, right) analysis configurations over a
 * corpus of programs, compares every recorded program point in full and/or
 * minimal mode under one entailment backend, and aggregates the results
 * into four deterministic artifacts:
 *
 *   summary.csv      pair,mode,category,count   (all categories, zero-filled)
 *   proportions.csv  bin,frequency              (minimal mode: |S| / |universe|
 *                                                histogram; bin 0.0 holds the
 *                                                S = ∅ short-circuits)
 *   iterations.csv   depth,frequency            (fixed-point passes per point)
 *   points.json      full per-point dump, including SMT-LIB formula text and
 *                    any countermodels the backend produced
 *
 * Per-program parse failures are recorded in the report and skipped;
 * backend configuration errors abort (they would poison every record).
 */

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "invcomp/compare.hpp"
#include "invcomp/engine.hpp"

namespace invcomp {

// One comparison side: how to analyze and how to minimize.
struct SideConfig {
  AnalysisConfig analysis;
  std::string delta = "fs";  // "fs" | "nn" | "cc" | "scripted:<path>"
};

struct PairSpec {
  SideConfig left, right;
  std::string label() const {
    return left.analysis.label + "_vs_" + right.analysis.label;
  }
};

struct BackendConfig {
  std::string kind = "oracle";  // "oracle" | "extern" | "native"
  std::int64_t oracle_box = 64;
  std::int64_t oracle_cap = 10'000'000;
  std::string solver_command;  // extern only
  int timeout_ms = 10000;
};

std::unique_ptr<EntailmentBackend> make_backend(const BackendConfig& cfg);

struct Experiment {
  std::vector<std::string> corpus;  // program file paths
  // When non-empty, must parallel `corpus`: entry i is compared as the
  // right-hand program for corpus[i] (used to encode two-text walkthroughs
  // whose point sets coincide).
  std::vector<std::string> right_corpus;
  std::vector<PairSpec> pairs;
  BackendConfig backend;
  std::string mode = "both";  // "full" | "minimal" | "both"
};

struct ComparisonRecord {
  std::string program;
  std::string point;
  std::string pair;
  std::optional<Outcome> full;
  std::optional<Outcome> minimal;
  VarSet s;                     // common variable set (minimal mode)
  int iterations = 0;           // fixed-point passes (minimal mode)
  std::size_t universe_size = 0;
  double proportion = 0.0;      // |s| / universe_size
  Formula left_full, right_full, left_sub, right_sub;
  std::optional<Model> full_countermodel, minimal_countermodel;
};

struct Report {
  std::vector<ComparisonRecord> records;
  std::vector<std::string> failures;
  bool has_full = false;
  bool has_minimal = false;
};

// Runs with the backend described by e.backend, or with `override` when one
// is supplied (used to interpose recording/stub backends).
Report run_experiment(const Experiment& e,
                      EntailmentBackend* injected = nullptr);

// Writes summary.csv, proportions.csv, iterations.csv.
void emit_csvs(const Report& r, const std::string& dir);
// emit_csvs plus points.json.
void emit_report(const Report& r, const std::string& dir);
// Rebuilds a report from a previously written points.json (formula text is
// not reparsed; only aggregation fields are restored).
Report load_report(const std::string& dir);

// Histogram bin index for a minimal-mode record: 0 iff S = ∅, else
// ceil(10 |s| / universe) in 1..10.  Integer-exact.
int proportion_bin(std::size_t numerator, std::size_t denominator);
std::string bin_label(int bin);  // "0.0", "0.1", ..., "1.0"

// --- configuration files -------------------------------------------------
// Flat key/value text: label, domain, widening, delay, thresholds, delta,
// partition.  '#' starts a comment.
SideConfig side_config_from_text(const std::string& text,
                                 const std::string& origin);
SideConfig parse_side_config(const std::string& path);

// "standard" | "delayed:<k>" | "threshold" | "threshold:<t1,t2,...>"
WideningPolicy parse_widening(const std::string& spec);

// Analysis-record JSON for the `analyze` verb: one entry per point with the
// formula rendered as SMT-LIB text.
std::string analysis_to_json(const AnalysisRecord& rec);

}  // namespace invcomp
