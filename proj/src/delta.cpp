#include "invcomp/delta.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "invcomp/util.hpp"

namespace invcomp {

namespace {

// One selectable conjunct: a difference atom or a block constraint.
struct Unit {
  VarSet vars;
  bool is_atom;
  std::size_t index;
};

std::vector<Unit> units_of(const Formula& f) {
  std::vector<Unit> us;
  for (std::size_t i = 0; i < f.atoms.size(); ++i)
    us.push_back(Unit{vars_of(f.atoms[i]), true, i});
  for (std::size_t i = 0; i < f.blocks.size(); ++i)
    us.push_back(Unit{{f.blocks[i].var}, false, i});
  return us;
}

void check_universe(const Invariant& inv, const VarSet& dv) {
  for (const auto& v : vars_of(inv.formula))
    if (!inv.universe.count(v))
      throw ContractError("invariant '" + inv.id + "' mentions '" + v +
                          "' outside its universe");
  for (const auto& v : dv)
    if (!inv.universe.count(v))
      throw ContractError("dv variable '" + v + "' outside the universe of '" +
                          inv.id + "'");
}

VarSet top_vars(const Invariant& inv) {
  VarSet tops = inv.universe;
  for (const auto& v : vars_of(inv.formula)) tops.erase(v);
  return tops;
}

SubInvariant select(const Invariant& inv, const VarSet& dv,
                    const std::vector<Unit>& chosen, std::string source) {
  SubInvariant sub;
  sub.source = std::move(source);
  if (inv.formula.is_false) {
    // Every selection from an unsatisfiable invariant is unsatisfiable.
    sub.formula = Formula::ff();
    sub.vars = dv;
    return sub;
  }
  for (const Unit& u : chosen) {
    if (u.is_atom)
      sub.formula.atoms.push_back(inv.formula.atoms[u.index]);
    else
      sub.formula.blocks.push_back(inv.formula.blocks[u.index]);
  }
  sub.formula.normalize();
  sub.vars = vars_of(sub.formula);
  VarSet tops = top_vars(inv);
  for (const auto& v : dv)
    if (tops.count(v)) sub.vars.insert(v);
  return sub;
}

}  // namespace

DeltaFn delta_fs() {
  return DeltaFn{"fs", [](const Invariant& inv, const VarSet& dv) {
    check_universe(inv, dv);
    return select(inv, dv, units_of(inv.formula), "fs");
  }};
}

DeltaFn delta_nn() {
  return DeltaFn{"nn", [](const Invariant& inv, const VarSet& dv) {
    check_universe(inv, dv);
    std::vector<Unit> chosen;
    for (Unit& u : units_of(inv.formula)) {
      bool touches = false;
      for (const auto& v : u.vars)
        if (dv.count(v)) touches = true;
      if (touches) chosen.push_back(std::move(u));
    }
    return select(inv, dv, chosen, "nn");
  }};
}

DeltaFn delta_cc() {
  return DeltaFn{"cc", [](const Invariant& inv, const VarSet& dv) {
    check_universe(inv, dv);
    std::vector<Unit> all = units_of(inv.formula);
    // Grow the reachable variable set through shared-variable edges.
    VarSet reached = dv;
    std::vector<bool> in(all.size(), false);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (in[i]) continue;
        bool touches = false;
        for (const auto& v : all[i].vars)
          if (reached.count(v)) touches = true;
        if (touches) {
          in[i] = true;
          reached.insert(all[i].vars.begin(), all[i].vars.end());
          changed = true;
        }
      }
    }
    std::vector<Unit> chosen;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (in[i]) chosen.push_back(all[i]);
    return select(inv, dv, chosen, "cc");
  }};
}

DeltaFn delta_scripted(ScriptTrace trace) {
  auto table = std::make_shared<ScriptTrace>(std::move(trace));
  return DeltaFn{"scripted", [table](const Invariant& inv, const VarSet& dv) {
    auto it = table->find({inv.id, dv});
    if (it == table->end()) {
      std::ostringstream os;
      os << "scripted delta has no entry for ('" << inv.id << "', {";
      bool first = true;
      for (const auto& v : dv) {
        if (!first) os << ",";
        os << v;
        first = false;
      }
      os << "})";
      throw ContractError(os.str());
    }
    return it->second;
  }};
}

void script_entry(ScriptTrace& trace, const std::string& invariant_id,
                  const VarSet& dv, const Formula& result,
                  std::optional<VarSet> vars) {
  SubInvariant sub;
  sub.formula = result;
  sub.formula.normalize();
  sub.source = "scripted";
  if (vars) {
    sub.vars = std::move(*vars);
  } else {
    sub.vars = vars_of(sub.formula);
    sub.vars.insert(dv.begin(), dv.end());
  }
  trace[{invariant_id, dv}] = std::move(sub);
}

DeltaFn delta_scripted_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open replay file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed replay file '" + path + "': " + e.what());
  }
  ScriptTrace trace;
  if (!doc.contains("entries") || !doc["entries"].is_array())
    throw ConfigError("replay file '" + path + "' lacks an entries array");
  for (const auto& entry : doc["entries"]) {
    VarSet dv;
    for (const auto& v : entry.at("dv")) dv.insert(v.get<std::string>());
    Formula f = parse_formula(entry.at("formula").get<std::string>());
    std::optional<VarSet> vars;
    if (entry.contains("vars")) {
      VarSet vs;
      for (const auto& v : entry["vars"]) vs.insert(v.get<std::string>());
      vars = std::move(vs);
    }
    script_entry(trace, entry.at("invariant").get<std::string>(), dv, f, vars);
  }
  return delta_scripted(std::move(trace));
}

DeltaFn delta_by_name(const std::string& name) {
  if (name == "fs") return delta_fs();
  if (name == "nn") return delta_nn();
  if (name == "cc") return delta_cc();
  if (name.rfind("scripted:", 0) == 0)
    return delta_scripted_from_file(name.substr(9));
  throw ConfigError("unknown delta '" + name + "'");
}

}  // namespace invcomp
