#pragma once

// Shared helpers for the test suites: independent (re-implemented)
// evaluators used as oracles, corpus/tool discovery, small generators.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "invcomp/formula.hpp"
#include "invcomp/ir.hpp"
#include "invcomp/zones.hpp"

namespace testsupport {

using Env = std::map<std::string, std::int64_t>;

std::string source_dir();
std::string corpus_dir();
// Sorted *.ir paths under corpus_dir().
std::vector<std::string> corpus_programs();
std::string tool_path(const std::string& name);
// Path of the built command-line driver.
std::string cli_path();
// External solver command: $INVCOMP_SOLVER if set, else the bundled
// difference-logic solver script.
std::string solver_command();
// Fresh directory under the system temp root.
std::string make_temp_dir(const std::string& hint);
// Whole-file read/write; read throws on a missing file.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Direct semantic evaluation of a formula — deliberately re-implemented
// here, independent of the library's backends.
bool formula_holds(const invcomp::Formula& f, const Env& env);

// Raw difference-bound semantics: every finite entry m[i][j] is the
// constraint v_i - v_j <= m[i][j] with v_0 = 0; bottom states hold nowhere.
bool zone_holds(const invcomp::ZoneState& z, const Env& env);

// Enumerates every integer point of [-box, box]^vars, calling fn(env).
// fn returns false to abort early; for_each_point returns false in that
// case.
template <typename Fn>
bool for_each_point(const std::vector<std::string>& vars, std::int64_t box,
                    Fn&& fn) {
  Env env;
  std::vector<std::int64_t> vals(vars.size(), -box);
  while (true) {
    for (size_t i = 0; i < vars.size(); ++i) env[vars[i]] = vals[i];
    if (!fn(env)) return false;
    size_t k = 0;
    for (; k < vals.size(); ++k) {
      if (vals[k] < box) {
        ++vals[k];
        break;
      }
      vals[k] = -box;
    }
    if (k == vals.size()) return true;
  }
}

// Random unclosed zone: each off-diagonal entry gets a finite bound in
// [-bound, bound] with probability `density`.
invcomp::ZoneState random_zone(std::mt19937_64& rng,
                               const std::vector<std::string>& vars,
                               std::int64_t bound, double density);

}  // namespace testsupport
