#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace testsupport {

namespace fs = std::filesystem;

std::string source_dir() { return INVCOMP_SOURCE_DIR; }

std::string corpus_dir() { return source_dir() + "/corpus"; }

std::vector<std::string> corpus_programs() {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(corpus_dir()))
    if (entry.is_regular_file() && entry.path().extension() == ".ir")
      out.push_back(entry.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string tool_path(const std::string& name) {
  return source_dir() + "/tools/" + name;
}

std::string cli_path() { return std::string(INVCOMP_BINARY_DIR) + "/invcomp"; }

std::string solver_command() {
  if (const char* env = std::getenv("INVCOMP_SOLVER")) return env;
  return "python3 " + tool_path("dlsolve.py");
}

std::string make_temp_dir(const std::string& hint) {
  std::string tmpl =
      (fs::temp_directory_path() / ("invcomp-" + hint + "-XXXXXX")).string();
  if (!mkdtemp(tmpl.data()))
    throw std::runtime_error("mkdtemp failed for " + tmpl);
  return tmpl;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

bool formula_holds(const invcomp::Formula& f, const Env& env) {
  if (f.is_false) return false;
  const auto value = [&](const std::string& v) {
    const auto it = env.find(v);
    if (it == env.end())
      throw std::runtime_error("environment misses variable " + v);
    return it->second;
  };
  for (const auto& a : f.atoms) {
    std::int64_t lhs = 0;
    if (a.plus) lhs += value(*a.plus);
    if (a.minus) lhs -= value(*a.minus);
    if (!(lhs <= a.bound)) return false;
  }
  for (const auto& b : f.blocks) {
    const std::int64_t v = value(b.var);
    bool inside = false;
    for (const auto& iv : b.blocks) {
      const bool lo_ok = !iv.lo || *iv.lo <= v;
      const bool hi_ok = !iv.hi || v <= *iv.hi;
      if (lo_ok && hi_ok) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

bool zone_holds(const invcomp::ZoneState& z, const Env& env) {
  if (z.bottom) return false;
  const auto value = [&](size_t idx) -> std::int64_t {
    if (idx == 0) return 0;
    const auto it = env.find(z.vars[idx - 1]);
    if (it == env.end())
      throw std::runtime_error("environment misses variable " +
                               z.vars[idx - 1]);
    return it->second;
  };
  for (size_t i = 0; i < z.dim(); ++i)
    for (size_t j = 0; j < z.dim(); ++j) {
      const auto& w = z.at(i, j);
      if (w.inf) continue;
      if (!(value(i) - value(j) <= w.v)) return false;
    }
  return true;
}

invcomp::ZoneState random_zone(std::mt19937_64& rng,
                               const std::vector<std::string>& vars,
                               std::int64_t bound, double density) {
  invcomp::ZoneState z = invcomp::ZoneState::top(vars);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> bounds(-bound, bound);
  for (size_t i = 0; i < z.dim(); ++i)
    for (size_t j = 0; j < z.dim(); ++j) {
      if (i == j) continue;
      if (coin(rng) < density) {
        z.at(i, j) = invcomp::Weight::of(bounds(rng));
        z.closed = false;
      }
    }
  return z;
}

}  // namespace testsupport
