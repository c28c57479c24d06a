// Command-line driver: analyze programs, compare invariants across
// configuration pairs, and rebuild report tables.
//
// Exit codes: 0 success, 1 usage/configuration error, 2 corpus or input
// parse failure, 3 backend failure while running comparisons.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "invcomp/experiment.hpp"
#include "invcomp/util.hpp"

namespace {

using namespace invcomp;

std::vector<std::int64_t> parse_list_arg(std::string s,
                                         const std::string& what) {
  for (auto& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<std::int64_t> out;
  std::string tok;
  while (is >> tok) {
    try {
      size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("invalid integer '" + tok + "' in " + what);
    }
  }
  if (out.empty()) throw ConfigError(what + " must not be empty");
  return out;
}

int run_analyze(const std::string& prog_path, const std::string& domain,
                const std::string& widening, const std::string& label,
                const std::string& partition, const std::string& out) {
  AnalysisConfig cfg;
  try {
    cfg.domain = domain;
    cfg.widening = parse_widening(widening);
    if (!partition.empty())
      cfg.partition =
          Partition::from_starts(parse_list_arg(partition, "--partition"));
    cfg.label = label.empty() ? (domain == "zones" ? "Z" : "P") : label;
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }

  Program p;
  try {
    p = parse_program(read_text_file(prog_path));
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }

  try {
    const AnalysisRecord rec = analyze(p, cfg);
    const std::string json = analysis_to_json(rec);
    if (out.empty())
      std::cout << json;
    else
      write_text_file(out, json);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 0;
}

// A corpus entry may be a program file or a directory; directories expand
// to their immediate *.ir files in name order.
std::vector<std::string> expand_corpus(const std::vector<std::string>& args) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  for (const auto& arg : args) {
    if (!fs::is_directory(arg)) {
      out.push_back(arg);
      continue;
    }
    std::vector<std::string> found;
    for (const auto& ent : fs::directory_iterator(arg))
      if (ent.is_regular_file() && ent.path().extension() == ".ir")
        found.push_back(ent.path().string());
    if (found.empty())
      throw ConfigError("corpus directory '" + arg + "' has no .ir programs");
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

int run_compare(const std::vector<std::string>& corpus,
                const std::vector<std::string>& right_corpus,
                const std::vector<std::string>& left_cfgs,
                const std::vector<std::string>& right_cfgs,
                const std::string& mode, const std::string& backend,
                std::int64_t oracle_box, const std::string& solver,
                int timeout_ms, const std::string& out) {
  Experiment e;
  try {
    if (left_cfgs.size() != right_cfgs.size())
      throw ConfigError(
          "--left-cfg and --right-cfg must be given the same number of "
          "times");
    if (backend == "extern" && solver.empty())
      throw ConfigError("--backend extern requires --solver");
    e.corpus = expand_corpus(corpus);
    e.right_corpus = expand_corpus(right_corpus);
    if (!e.right_corpus.empty() && e.right_corpus.size() != e.corpus.size())
      throw ConfigError(
          "--right-corpus must list exactly one program per --corpus entry");
    e.mode = mode;
    e.backend.kind = backend;
    e.backend.oracle_box = oracle_box;
    e.backend.solver_command = solver;
    e.backend.timeout_ms = timeout_ms;
    for (size_t i = 0; i < left_cfgs.size(); ++i)
      e.pairs.push_back(
          {parse_side_config(left_cfgs[i]), parse_side_config(right_cfgs[i])});
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }

  Report rep;
  try {
    rep = run_experiment(e);
  } catch (const std::exception& ex) {
    std::cerr << "backend failure: " << ex.what() << "\n";
    return 3;
  }

  for (const auto& f : rep.failures) std::cerr << "warning: " << f << "\n";
  try {
    emit_report(rep, out);
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  if (rep.records.empty() && !rep.failures.empty()) {
    std::cerr << "error: every corpus program failed\n";
    return 2;
  }
  std::cout << rep.records.size() << " comparisons, " << rep.failures.size()
            << " failures -> " << out << "\n";
  return 0;
}

int run_report(const std::string& dir) {
  Report rep;
  try {
    rep = load_report(dir);
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  try {
    emit_csvs(rep, dir);
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  std::cout << "rebuilt tables for " << rep.records.size()
            << " comparisons in " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant comparison workbench"};
  app.require_subcommand(1);

  auto* an = app.add_subcommand(
      "analyze", "analyze one program and dump its point invariants");
  std::string an_prog, an_label, an_partition, an_out;
  std::string an_domain = "zones";
  std::string an_widening = "standard";
  an->add_option("program", an_prog, "IR program file")->required();
  an->add_option("--domain", an_domain, "abstract domain")
      ->check(CLI::IsMember({"zones", "predicates"}));
  an->add_option("--widening", an_widening,
                 "standard | delayed:<k> | threshold[:t1,t2,...]");
  an->add_option("--label", an_label, "configuration label for the output");
  an->add_option("--partition", an_partition,
                 "comma-separated block starts (predicates domain)");
  an->add_option("--out", an_out, "output JSON path (default: stdout)");

  auto* cp = app.add_subcommand(
      "compare", "compare invariants across configuration pairs");
  std::vector<std::string> corpus, right_corpus, left_cfgs, right_cfgs;
  std::string mode = "both", backend = "oracle", solver;
  std::int64_t oracle_box = 64;
  int timeout_ms = 10000;
  std::string out_dir = "report";
  cp->add_option("--corpus", corpus, "program files")->required();
  cp->add_option("--right-corpus", right_corpus,
                 "paired right-hand program files (walkthrough encodings)");
  cp->add_option("--left-cfg", left_cfgs, "left-side configuration file")
      ->required();
  cp->add_option("--right-cfg", right_cfgs, "right-side configuration file")
      ->required();
  cp->add_option("--mode", mode, "comparison mode")
      ->check(CLI::IsMember({"full", "minimal", "both"}));
  cp->add_option("--backend", backend, "entailment backend")
      ->check(CLI::IsMember({"oracle", "extern", "native"}));
  cp->add_option("--oracle-box", oracle_box,
                 "half-width of the oracle's enumeration box");
  cp->add_option("--solver", solver, "external SMT-LIB solver command");
  cp->add_option("--timeout-ms", timeout_ms, "external solver timeout");
  cp->add_option("--out", out_dir, "report output directory");

  auto* rp = app.add_subcommand("report",
                                "rebuild CSV tables from points.json");
  std::string rp_dir;
  rp->add_option("dir", rp_dir, "report directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (an->parsed())
    return run_analyze(an_prog, an_domain, an_widening, an_label,
                       an_partition, an_out);
  if (cp->parsed())
    return run_compare(corpus, right_corpus, left_cfgs, right_cfgs, mode,
                       backend, oracle_box, solver, timeout_ms, out_dir);
  if (rp->parsed()) return run_report(rp_dir);
  return 1;
}
