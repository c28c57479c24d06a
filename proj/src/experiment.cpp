#include "invcomp/experiment.hpp"

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <sstream>

#include "json.hpp"

#include "invcomp/util.hpp"

namespace invcomp {

using ordered_json = nlohmann::ordered_json;

std::unique_ptr<EntailmentBackend> make_backend(const BackendConfig& cfg) {
  if (cfg.kind == "oracle")
    return std::make_unique<OracleBackend>(cfg.oracle_box, cfg.oracle_cap);
  if (cfg.kind == "native") return std::make_unique<NativeZoneBackend>();
  if (cfg.kind == "extern") {
    if (cfg.solver_command.empty())
      throw ConfigError("the extern backend requires a solver command");
    return std::make_unique<ExternalSolverBackend>(cfg.solver_command,
                                                   cfg.timeout_ms);
  }
  throw ConfigError("unknown backend '" + cfg.kind + "'");
}

namespace {

std::optional<Outcome> outcome_from_string(const std::string& s) {
  for (Outcome o : all_outcomes())
    if (to_string(o) == s) return o;
  return std::nullopt;
}

void run_pair(Report& rep, const Program& lp, const Program& rp,
              const PairSpec& pair, const DeltaFn& dl, const DeltaFn& dr,
              EntailmentBackend& backend) {
  const AnalysisRecord la = analyze(lp, pair.left.analysis);
  const AnalysisRecord ra = analyze(rp, pair.right.analysis);
  if (la.points.size() != ra.points.size())
    throw ContractError("programs '" + lp.name + "' and '" + rp.name +
                        "' record different point sets");
  for (size_t i = 0; i < la.points.size(); ++i) {
    const PointRecord& l = la.points[i];
    const PointRecord& r = ra.points[i];
    if (l.id != r.id)
      throw ContractError("point mismatch between programs: '" + l.id +
                          "' vs '" + r.id + "'");

    ComparisonRecord rec;
    rec.program = la.program;
    rec.point = l.id;
    rec.pair = pair.label();
    rec.universe_size = la.universe.size();
    rec.left_full = l.formula;
    rec.right_full = r.formula;

    const Invariant li{la.program + ":" + la.label + ":" + l.id, l.formula,
                       la.universe};
    const Invariant ri{ra.program + ":" + ra.label + ":" + r.id, r.formula,
                       ra.universe};
    if (rep.has_full) {
      ClassifyResult c = compare_full_detail(li, ri, backend);
      rec.full = c.outcome;
      rec.full_countermodel = std::move(c.countermodel);
    }
    if (rep.has_minimal) {
      MinimalComparison mc =
          compare_minimal({li, l.dv}, {ri, r.dv}, dl, dr, backend);
      rec.minimal = mc.outcome;
      rec.s = mc.cvs.s;
      rec.iterations = mc.cvs.iterations;
      rec.proportion = mc.cvs.proportion();
      rec.left_sub = mc.left_sub;
      rec.right_sub = mc.right_sub;
      rec.minimal_countermodel = std::move(mc.countermodel);
    }
    rep.records.push_back(std::move(rec));
  }
}

}  // namespace

Report run_experiment(const Experiment& e, EntailmentBackend* injected) {
  if (e.mode != "full" && e.mode != "minimal" && e.mode != "both")
    throw ConfigError("unknown comparison mode '" + e.mode + "'");
  if (!e.right_corpus.empty() && e.right_corpus.size() != e.corpus.size())
    throw ConfigError("paired corpora must list the same number of programs");
  if (e.pairs.empty()) throw ConfigError("no configuration pairs given");

  Report rep;
  rep.has_full = e.mode != "minimal";
  rep.has_minimal = e.mode != "full";

  std::unique_ptr<EntailmentBackend> owned;
  if (!injected) owned = make_backend(e.backend);
  EntailmentBackend& backend = injected ? *injected : *owned;
  std::map<std::string, DeltaFn> deltas;
  const auto delta_of = [&](const std::string& name) -> const DeltaFn& {
    auto it = deltas.find(name);
    if (it == deltas.end())
      it = deltas.emplace(name, delta_by_name(name)).first;
    return it->second;
  };

  for (size_t i = 0; i < e.corpus.size(); ++i) {
    const std::string& lpath = e.corpus[i];
    const std::string rpath =
        e.right_corpus.empty() ? lpath : e.right_corpus[i];
    Program lp, rp;
    try {
      lp = parse_program(read_text_file(lpath));
      rp = (rpath == lpath) ? lp : parse_program(read_text_file(rpath));
    } catch (const std::exception& ex) {
      rep.failures.push_back(lpath + ": " + ex.what());
      continue;
    }
    for (const PairSpec& pair : e.pairs) {
      try {
        run_pair(rep, lp, rp, pair, delta_of(pair.left.delta),
                 delta_of(pair.right.delta), backend);
      } catch (const ConfigError&) {
        throw;  // backend/config trouble poisons every record: surface it
      } catch (const std::exception& ex) {
        rep.failures.push_back(lpath + " [" + pair.label() +
                               "]: " + ex.what());
      }
    }
  }
  return rep;
}

int proportion_bin(std::size_t numerator, std::size_t denominator) {
  if (numerator == 0) return 0;
  if (denominator == 0)
    throw ContractError("non-empty selection over an empty universe");
  const std::size_t b = (10 * numerator + denominator - 1) / denominator;
  return static_cast<int>(std::min<std::size_t>(b, 10));
}

std::string bin_label(int bin) {
  if (bin < 0 || bin > 10) throw ContractError("histogram bin out of range");
  if (bin == 10) return "1.0";
  return "0." + std::to_string(bin);
}

namespace {

std::vector<std::string> pair_order(const Report& r) {
  std::vector<std::string> pairs;
  for (const auto& rec : r.records)
    if (std::find(pairs.begin(), pairs.end(), rec.pair) == pairs.end())
      pairs.push_back(rec.pair);
  return pairs;
}

}  // namespace

void emit_csvs(const Report& r, const std::string& dir) {
  std::filesystem::create_directories(dir);

  std::ostringstream summary;
  summary << "pair,mode,category,count\n";
  for (const auto& p : pair_order(r)) {
    for (const bool full_mode : {true, false}) {
      if (full_mode && !r.has_full) continue;
      if (!full_mode && !r.has_minimal) continue;
      for (const Outcome o : all_outcomes()) {
        long long n = 0;
        for (const auto& rec : r.records) {
          if (rec.pair != p) continue;
          const auto& got = full_mode ? rec.full : rec.minimal;
          if (got && *got == o) ++n;
        }
        summary << p << ',' << (full_mode ? "full" : "minimal") << ','
                << to_string(o) << ',' << n << '\n';
      }
    }
  }
  write_text_file(dir + "/summary.csv", summary.str());

  std::ostringstream props;
  props << "bin,frequency\n";
  if (r.has_minimal && !r.records.empty()) {
    std::array<long long, 11> freq{};
    for (const auto& rec : r.records)
      if (rec.minimal)
        ++freq[static_cast<size_t>(
            proportion_bin(rec.s.size(), rec.universe_size))];
    for (int b = 0; b <= 10; ++b)
      props << bin_label(b) << ',' << freq[static_cast<size_t>(b)] << '\n';
  }
  write_text_file(dir + "/proportions.csv", props.str());

  std::ostringstream iters;
  iters << "depth,frequency\n";
  if (r.has_minimal && !r.records.empty()) {
    std::map<int, long long> freq;
    for (const auto& rec : r.records)
      if (rec.minimal) ++freq[rec.iterations];
    if (!freq.empty()) {
      const int maxd = freq.rbegin()->first;
      for (int d = 0; d <= maxd; ++d) {
        const auto it = freq.find(d);
        iters << d << ',' << (it == freq.end() ? 0 : it->second) << '\n';
      }
    }
  }
  write_text_file(dir + "/iterations.csv", iters.str());
}

namespace {

ordered_json model_json(const Model& m) {
  ordered_json o = ordered_json::object();
  for (const auto& [k, v] : m) o[k] = v;
  return o;
}

}  // namespace

void emit_report(const Report& r, const std::string& dir) {
  emit_csvs(r, dir);
  ordered_json root = ordered_json::object();
  root["records"] = ordered_json::array();
  for (const auto& rec : r.records) {
    ordered_json o = ordered_json::object();
    o["program"] = rec.program;
    o["point"] = rec.point;
    o["pair"] = rec.pair;
    if (rec.full) o["full"] = to_string(*rec.full);
    if (rec.minimal) o["minimal"] = to_string(*rec.minimal);
    o["s"] = ordered_json::array();
    for (const auto& v : rec.s) o["s"].push_back(v);
    o["iterations"] = rec.iterations;
    o["universe_size"] = rec.universe_size;
    o["proportion"] = rec.proportion;
    o["left_full"] = smtlib_term(rec.left_full);
    o["right_full"] = smtlib_term(rec.right_full);
    if (rec.minimal) {
      o["left_minimal"] = smtlib_term(rec.left_sub);
      o["right_minimal"] = smtlib_term(rec.right_sub);
    }
    if (rec.full_countermodel)
      o["countermodel_full"] = model_json(*rec.full_countermodel);
    if (rec.minimal_countermodel)
      o["countermodel_minimal"] = model_json(*rec.minimal_countermodel);
    root["records"].push_back(std::move(o));
  }
  root["failures"] = r.failures;
  write_text_file(dir + "/points.json", root.dump(2) + "\n");
}

Report load_report(const std::string& dir) {
  const std::string path = dir + "/points.json";
  ordered_json root;
  try {
    root = ordered_json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
  Report rep;
  for (const auto& o : root.value("records", ordered_json::array())) {
    ComparisonRecord rec;
    rec.program = o.value("program", "");
    rec.point = o.value("point", "");
    rec.pair = o.value("pair", "");
    if (o.contains("full")) {
      rec.full = outcome_from_string(o["full"].get<std::string>());
      if (!rec.full)
        throw ConfigError(path + ": unknown category '" +
                          o["full"].get<std::string>() + "'");
      rep.has_full = true;
    }
    if (o.contains("minimal")) {
      rec.minimal = outcome_from_string(o["minimal"].get<std::string>());
      if (!rec.minimal)
        throw ConfigError(path + ": unknown category '" +
                          o["minimal"].get<std::string>() + "'");
      rep.has_minimal = true;
    }
    for (const auto& v : o.value("s", ordered_json::array()))
      rec.s.insert(v.get<std::string>());
    rec.iterations = o.value("iterations", 0);
    rec.universe_size = o.value("universe_size", std::size_t{0});
    rec.proportion = o.value("proportion", 0.0);
    rep.records.push_back(std::move(rec));
  }
  for (const auto& f : root.value("failures", ordered_json::array()))
    rep.failures.push_back(f.get<std::string>());
  return rep;
}

// ---------------------------------------------------------------------------
// Configuration files.
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::int64_t parse_i64(const std::string& s, const std::string& what) {
  try {
    size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + s + "' for " + what);
  }
}

std::vector<std::int64_t> parse_i64_list(std::string s,
                                         const std::string& what) {
  for (auto& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<std::int64_t> out;
  std::string tok;
  while (is >> tok) out.push_back(parse_i64(tok, what));
  if (out.empty()) throw ConfigError("empty list for " + what);
  return out;
}

void require_ascending(const std::vector<std::int64_t>& v,
                       const std::string& what) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] <= v[i - 1])
      throw ConfigError(what + " must be strictly ascending");
}

}  // namespace

WideningPolicy parse_widening(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head =
      colon == std::string::npos ? spec : spec.substr(0, colon);
  const std::string tail =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "standard") {
    if (!tail.empty())
      throw ConfigError("standard widening takes no argument");
    return WideningPolicy::standard();
  }
  if (head == "delayed") {
    if (tail.empty())
      throw ConfigError("delayed widening needs a visit count, "
                        "e.g. delayed:5");
    const std::int64_t k = parse_i64(tail, "widening delay");
    if (k < 1) throw ConfigError("widening delay must be at least 1");
    return WideningPolicy::delayed(static_cast<int>(k));
  }
  if (head == "threshold") {
    if (tail.empty()) return WideningPolicy::threshold();
    auto ts = parse_i64_list(tail, "widening thresholds");
    require_ascending(ts, "widening thresholds");
    return WideningPolicy::threshold(std::move(ts));
  }
  throw ConfigError("unknown widening '" + spec + "'");
}

SideConfig side_config_from_text(const std::string& text,
                                 const std::string& origin) {
  SideConfig sc;
  bool have_label = false;
  std::optional<std::string> widening;
  std::optional<int> delay;
  std::optional<std::vector<std::int64_t>> thresholds;

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = origin + ":" + std::to_string(lineno);

    std::string key, value;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      key = trim(line.substr(0, eq));
      value = trim(line.substr(eq + 1));
    } else {
      const auto ws = line.find_first_of(" \t");
      if (ws == std::string::npos) {
        key = line;
      } else {
        key = line.substr(0, ws);
        value = trim(line.substr(ws + 1));
      }
    }
    if (value.empty())
      throw ConfigError(where + ": key '" + key + "' needs a value");

    if (key == "label") {
      sc.analysis.label = value;
      have_label = true;
    } else if (key == "domain") {
      if (value != "zones" && value != "predicates")
        throw ConfigError(where + ": unknown domain '" + value + "'");
      sc.analysis.domain = value;
    } else if (key == "widening") {
      widening = value;
    } else if (key == "delay") {
      const std::int64_t k = parse_i64(value, "delay");
      if (k < 1) throw ConfigError(where + ": delay must be at least 1");
      delay = static_cast<int>(k);
    } else if (key == "thresholds") {
      auto ts = parse_i64_list(value, "thresholds");
      require_ascending(ts, "thresholds");
      thresholds = std::move(ts);
    } else if (key == "delta") {
      if (value != "fs" && value != "nn" && value != "cc" &&
          value.rfind("scripted:", 0) != 0)
        throw ConfigError(where + ": unknown delta '" + value + "'");
      sc.delta = value;
    } else if (key == "partition") {
      sc.analysis.partition =
          Partition::from_starts(parse_i64_list(value, "partition"));
    } else {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }

  if (!have_label) throw ConfigError(origin + ": missing 'label'");

  const std::string wspec = widening.value_or("standard");
  const auto colon = wspec.find(':');
  const std::string head =
      colon == std::string::npos ? wspec : wspec.substr(0, colon);
  if (colon != std::string::npos) {
    sc.analysis.widening = parse_widening(wspec);
  } else if (head == "standard") {
    sc.analysis.widening = WideningPolicy::standard();
  } else if (head == "delayed") {
    if (!delay)
      throw ConfigError(origin + ": delayed widening needs 'delay'");
    sc.analysis.widening = WideningPolicy::delayed(*delay);
    delay.reset();  // consumed
  } else if (head == "threshold") {
    sc.analysis.widening = thresholds
                               ? WideningPolicy::threshold(*thresholds)
                               : WideningPolicy::threshold();
    thresholds.reset();  // consumed
  } else {
    throw ConfigError(origin + ": unknown widening '" + wspec + "'");
  }
  if (delay) sc.analysis.widening.delay = *delay;
  if (thresholds) {
    if (sc.analysis.widening.kind != WideningPolicy::Kind::Threshold)
      throw ConfigError(origin +
                        ": 'thresholds' requires threshold widening");
    sc.analysis.widening.thresholds = *thresholds;
  }
  return sc;
}

SideConfig parse_side_config(const std::string& path) {
  return side_config_from_text(read_text_file(path), path);
}

std::string analysis_to_json(const AnalysisRecord& rec) {
  ordered_json root = ordered_json::object();
  root["program"] = rec.program;
  root["label"] = rec.label;
  root["domain"] = rec.domain;
  root["universe"] = ordered_json::array();
  for (const auto& v : rec.universe) root["universe"].push_back(v);
  root["points"] = ordered_json::array();
  for (const auto& pr : rec.points) {
    ordered_json o = ordered_json::object();
    o["point"] = pr.id;
    o["label"] = rec.label;
    o["formula"] = smtlib_term(pr.formula);
    o["dv"] = ordered_json::array();
    for (const auto& v : pr.dv) o["dv"].push_back(v);
    o["domain"] = rec.domain;
    o["bottom"] = pr.bottom;
    root["points"].push_back(std::move(o));
  }
  return root.dump(2) + "\n";
}

}  // namespace invcomp
