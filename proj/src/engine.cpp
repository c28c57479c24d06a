#include "invcomp/engine.hpp"

#include <optional>
#include <set>

#include "invcomp/util.hpp"

namespace invcomp {

std::vector<int> widening_points(const Program& p) {
  enum { White, Gray, Black };
  std::vector<int> color(p.blocks.size(), White);
  std::vector<int> out;
  std::set<int> seen;
  std::vector<std::pair<int, size_t>> stack;
  stack.emplace_back(0, 0);
  color[0] = Gray;
  while (!stack.empty()) {
    const int b = stack.back().first;
    const std::vector<int> succ = p.successors(b);
    if (stack.back().second >= succ.size()) {
      color[static_cast<size_t>(b)] = Black;
      stack.pop_back();
      continue;
    }
    const int s = succ[stack.back().second++];
    if (color[static_cast<size_t>(s)] == Gray) {
      if (seen.insert(s).second) out.push_back(s);
    } else if (color[static_cast<size_t>(s)] == White) {
      color[static_cast<size_t>(s)] = Gray;
      stack.emplace_back(s, 0);
    }
  }
  return out;
}

namespace {

struct ZoneOps {
  using State = ZoneState;
  std::vector<std::string> order;
  VarSet all;
  WideningPolicy policy;

  State top() const { return ZoneState::top(order); }
  State bot() const { return ZoneState::bot(order); }
  bool is_bottom(const State& s) const { return s.bottom; }
  State ready(const State& s) const { return closure(s); }
  State transfer(const State& s, const Statement& st) const {
    return zone_transfer(s, st);
  }
  State guard(const State& s, const Condition& c, bool pol) const {
    return zone_guard(s, c, pol);
  }
  State join(const State& a, const State& b) const { return zone_join(a, b); }
  State widen(const State& stored, const State& cand, int visit) const {
    return zone_widen(stored, cand, policy, visit);
  }
  bool leq(const State& a, const State& b) const {
    return zone_includes(a, b, all);
  }
  Formula formula(const State& s, const VarSet& u) const {
    return zone_to_formula(s, u);
  }
};

struct PredOps {
  using State = PredState;
  Partition part;
  std::vector<std::string> order;
  VarSet all;
  WideningPolicy policy;

  State top() const { return PredState::top(part, order); }
  State bot() const { return PredState::bot(part, order); }
  bool is_bottom(const State& s) const { return s.bottom; }
  State ready(const State& s) const { return s; }
  State transfer(const State& s, const Statement& st) const {
    return pred_transfer(s, st);
  }
  State guard(const State& s, const Condition& c, bool pol) const {
    return pred_guard(s, c, pol);
  }
  State join(const State& a, const State& b) const { return pred_join(a, b); }
  State widen(const State& stored, const State& cand, int visit) const {
    if (visit < policy.delay) return pred_join(stored, cand);
    return pred_widen(stored, cand);
  }
  bool leq(const State& a, const State& b) const {
    return pred_includes(a, b);
  }
  Formula formula(const State& s, const VarSet& u) const {
    return pred_to_formula(s, u);
  }
};

template <typename Ops>
AnalysisRecord run_analysis(const Program& p, const Ops& ops,
                            const AnalysisConfig& cfg) {
  using State = typename Ops::State;
  const size_t nblocks = p.blocks.size();

  std::set<int> heads;
  for (int b : widening_points(p)) heads.insert(b);

  std::vector<std::optional<State>> stored(nblocks);
  std::map<int, int> visits;  // merge visits at widening points
  std::set<int> pending;      // processed in ascending block-id order
  int iterations = 0;
  const long cap = 1000L * static_cast<long>(nblocks ? nblocks : 1);

  auto flow = [&](const State& s, int target) {
    if (ops.is_bottom(s)) return;
    auto& slot = stored[static_cast<size_t>(target)];
    if (!slot) {
      slot = s;
      if (heads.count(target)) visits[target] = 1;
      pending.insert(target);
      return;
    }
    if (ops.leq(s, *slot)) return;
    if (heads.count(target)) {
      const int v = ++visits[target];
      slot = ops.widen(*slot, s, v);
    } else {
      slot = ops.join(*slot, s);
    }
    pending.insert(target);
  };

  stored[0] = ops.top();
  pending.insert(0);

  while (!pending.empty()) {
    if (++iterations > cap)
      throw ContractError("analysis of '" + p.name +
                          "' exceeded the iteration cap; widening failed "
                          "to stabilize");
    const int b = *pending.begin();
    pending.erase(pending.begin());
    const Block& blk = p.blocks[static_cast<size_t>(b)];
    State cur = ops.ready(*stored[static_cast<size_t>(b)]);
    for (const Statement& st : blk.stmts) cur = ops.transfer(cur, st);
    switch (blk.term.kind) {
      case Terminator::Kind::Goto:
        flow(cur, blk.term.target);
        break;
      case Terminator::Kind::If:
        flow(ops.guard(cur, blk.term.cond, true), blk.term.target);
        flow(ops.guard(cur, blk.term.cond, false), blk.term.alt_target);
        break;
      case Terminator::Kind::Return:
        break;
    }
  }

  AnalysisRecord rec;
  rec.program = p.name;
  rec.label = cfg.label;
  rec.domain = cfg.domain;
  rec.universe = p.var_set();
  rec.widen_visits = visits;
  rec.iterations = iterations;

  for (size_t b = 0; b < nblocks; ++b) {
    const Block& blk = p.blocks[b];
    State cur = stored[b] ? ops.ready(*stored[b]) : ops.bot();
    for (size_t i = 0; i < blk.stmts.size(); ++i) {
      cur = ops.transfer(cur, blk.stmts[i]);
      PointRecord pr;
      pr.point.block = static_cast<int>(b);
      pr.point.index = static_cast<int>(i);
      pr.point.edge = ProgramPoint::Edge::None;
      pr.id = point_id(p, pr.point);
      pr.formula = ops.formula(cur, rec.universe);
      pr.dv = updated_vars(blk.stmts[i]);
      pr.bottom = ops.is_bottom(cur);
      pr.state = cur;
      rec.points.push_back(std::move(pr));
    }
    if (blk.term.kind == Terminator::Kind::If) {
      for (const bool pol : {true, false}) {
        State g = ops.guard(cur, blk.term.cond, pol);
        PointRecord pr;
        pr.point.block = static_cast<int>(b);
        pr.point.index = static_cast<int>(blk.stmts.size());
        pr.point.edge =
            pol ? ProgramPoint::Edge::True : ProgramPoint::Edge::False;
        pr.id = point_id(p, pr.point);
        pr.formula = ops.formula(g, rec.universe);
        pr.dv = cond_vars(blk.term.cond);
        pr.bottom = ops.is_bottom(g);
        pr.state = std::move(g);
        rec.points.push_back(std::move(pr));
      }
    }
  }
  return rec;
}

}  // namespace

AnalysisRecord analyze(const Program& p, const AnalysisConfig& cfg) {
  if (p.blocks.empty()) throw ContractError("program has no blocks");
  if (cfg.domain == "zones") {
    ZoneOps ops{p.params, p.var_set(), cfg.widening};
    return run_analysis(p, ops, cfg);
  }
  if (cfg.domain == "predicates") {
    PredOps ops{cfg.partition, p.params, p.var_set(), cfg.widening};
    return run_analysis(p, ops, cfg);
  }
  throw ConfigError("unknown abstract domain '" + cfg.domain + "'");
}

}  // namespace invcomp
