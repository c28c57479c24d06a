#include "invcomp/ir.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "invcomp/util.hpp"

namespace invcomp {

namespace {

const std::set<std::string> kKeywords = {"proc",   "skip", "assume", "goto",
                                         "if",     "else", "return"};

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(tok_.line, tok_.col, what);
  }

 private:
  void advance() {
    skip_ws_and_comments();
    tok_.line = line_;
    tok_.col = col_;
    if (i_ >= src_.size()) {
      tok_.kind = Token::Kind::End;
      tok_.text = "<end of input>";
      return;
    }
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i_;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
              src_[i_] == '_'))
        bump();
      tok_.kind = Token::Kind::Ident;
      tok_.text = src_.substr(start, i_ - start);
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i_;
      while (i_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[i_])))
        bump();
      tok_.kind = Token::Kind::Int;
      tok_.text = src_.substr(start, i_ - start);
      try {
        tok_.value = std::stoll(tok_.text);
      } catch (const std::out_of_range&) {
        throw ParseError(tok_.line, tok_.col,
                         "integer literal out of 64-bit range");
      }
      return;
    }
    // Multi-character punctuation first.
    for (const char* p : {":=", "<=", ">=", "==", "!="}) {
      if (src_.compare(i_, 2, p) == 0) {
        tok_.kind = Token::Kind::Punct;
        tok_.text = p;
        bump();
        bump();
        return;
      }
    }
    if (std::string("(){}:;,?<>+-").find(c) != std::string::npos) {
      tok_.kind = Token::Kind::Punct;
      tok_.text = std::string(1, c);
      bump();
      return;
    }
    throw ParseError(line_, col_, std::string("unexpected character '") + c +
                                      "'");
  }

  void skip_ws_and_comments() {
    for (;;) {
      while (i_ < src_.size() &&
             std::isspace(static_cast<unsigned char>(src_[i_])))
        bump();
      if (i_ + 1 < src_.size() && src_[i_] == '/' && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') bump();
        continue;
      }
      if (i_ < src_.size() && src_[i_] == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') bump();
        continue;
      }
      break;
    }
  }

  void bump() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  const std::string& src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) {}

  Program parse() {
    expect_ident("proc");
    prog_.name = ident("procedure name");
    expect_punct("(");
    prog_.params.push_back(ident("parameter"));
    while (eat_punct(",")) prog_.params.push_back(ident("parameter"));
    expect_punct(")");
    expect_punct("{");
    std::set<std::string> seen(prog_.params.begin(), prog_.params.end());
    if (seen.size() != prog_.params.size())
      lex_.fail("duplicate parameter name");

    struct PendingTerm {
      Terminator::Kind kind;
      Condition cond;
      std::string target, alt;
      int line, col;
    };
    std::vector<PendingTerm> pending;
    while (!eat_punct("}")) {
      parse_block(pending);
    }
    if (lex_.peek().kind != Token::Kind::End) lex_.fail("trailing input");
    if (prog_.blocks.empty()) throw ParseError(1, 1, "program has no blocks");

    // Resolve labels, then validate the graph.
    std::map<std::string, int> ids;
    for (std::size_t i = 0; i < prog_.blocks.size(); ++i)
      ids[prog_.blocks[i].label] = static_cast<int>(i);
    for (std::size_t i = 0; i < prog_.blocks.size(); ++i) {
      const PendingTerm& pt = pending[i];
      Terminator& t = prog_.blocks[i].term;
      t.kind = pt.kind;
      t.cond = pt.cond;
      auto resolve = [&](const std::string& label) {
        auto it = ids.find(label);
        if (it == ids.end())
          throw ParseError(pt.line, pt.col,
                           "branch to unknown block '" + label + "'");
        return it->second;
      };
      if (t.kind == Terminator::Kind::Goto) t.target = resolve(pt.target);
      if (t.kind == Terminator::Kind::If) {
        t.target = resolve(pt.target);
        t.alt_target = resolve(pt.alt);
      }
    }
    check_reachability();
    return std::move(prog_);
  }

 private:
  template <typename Pending>
  void parse_block(std::vector<Pending>& pending) {
    Block b;
    b.label = ident("block label");
    for (const auto& blk : prog_.blocks)
      if (blk.label == b.label) lex_.fail("duplicate block label '" + b.label + "'");
    expect_punct(":");
    for (;;) {
      const Token& t = lex_.peek();
      if (t.kind != Token::Kind::Ident) lex_.fail("expected statement");
      if (t.text == "goto") {
        lex_.next();
        Pending p{Terminator::Kind::Goto, {}, ident("block label"), "",
                  t.line, t.col};
        expect_punct(";");
        b.term.kind = Terminator::Kind::Goto;
        pending.push_back(std::move(p));
        break;
      }
      if (t.text == "return") {
        lex_.next();
        expect_punct(";");
        pending.push_back(Pending{Terminator::Kind::Return, {}, "", "",
                                  t.line, t.col});
        break;
      }
      if (t.text == "if") {
        lex_.next();
        expect_punct("(");
        Condition c = parse_cond();
        expect_punct(")");
        std::string then_l = ident("block label");
        expect_ident("else");
        std::string else_l = ident("block label");
        expect_punct(";");
        pending.push_back(Pending{Terminator::Kind::If, std::move(c),
                                  std::move(then_l), std::move(else_l),
                                  t.line, t.col});
        break;
      }
      if (t.text == "skip") {
        lex_.next();
        expect_punct(";");
        b.stmts.push_back(Statement{Statement::Kind::Skip, "", {}, {}});
        continue;
      }
      if (t.text == "assume") {
        lex_.next();
        expect_punct("(");
        Condition c = parse_cond();
        expect_punct(")");
        expect_punct(";");
        b.stmts.push_back(Statement{Statement::Kind::Assume, "", {}, std::move(c)});
        continue;
      }
      // assignment
      std::string target = ident("assignment target");
      check_declared(target);
      expect_punct(":=");
      LinearExpr e = parse_expr();
      expect_punct(";");
      b.stmts.push_back(
          Statement{Statement::Kind::Assign, std::move(target), std::move(e), {}});
    }
    prog_.blocks.push_back(std::move(b));
  }

  LinearExpr parse_expr() {
    LinearExpr e;
    if (eat_punct("?")) {
      e.kind = LinearExpr::Kind::Nondet;
      return e;
    }
    bool neg = eat_punct("-");
    const Token& t = lex_.peek();
    if (t.kind == Token::Kind::Int) {
      std::int64_t v = lex_.next().value;
      e.kind = LinearExpr::Kind::Const;
      e.constant = neg ? checked_neg(v) : v;
      return e;
    }
    e.kind = LinearExpr::Kind::Linear;
    e.t1 = LinearExpr::Term{neg, ident("variable")};
    check_declared(e.t1->var);
    // Optional second term: variable or constant.
    if (peek_punct("+") || peek_punct("-")) {
      bool minus = lex_.next().text == "-";
      if (lex_.peek().kind == Token::Kind::Int) {
        std::int64_t v = lex_.next().value;
        e.constant = minus ? checked_neg(v) : v;
        return e;
      }
      e.t2 = LinearExpr::Term{minus, ident("variable")};
      check_declared(e.t2->var);
    }
    // Optional trailing constant after a two-variable form.
    if (peek_punct("+") || peek_punct("-")) {
      bool minus = lex_.next().text == "-";
      std::int64_t v = integer("constant");
      e.constant = minus ? checked_neg(v) : v;
    }
    return e;
  }

  Condition parse_cond() {
    Condition c;
    c.lhs = ident("variable");
    check_declared(c.lhs);
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Punct) lex_.fail("expected comparison operator");
    if (t.text == "<=")
      c.op = RelOp::Le;
    else if (t.text == "<")
      c.op = RelOp::Lt;
    else if (t.text == ">=")
      c.op = RelOp::Ge;
    else if (t.text == ">")
      c.op = RelOp::Gt;
    else if (t.text == "==")
      c.op = RelOp::Eq;
    else if (t.text == "!=")
      c.op = RelOp::Ne;
    else
      lex_.fail("expected comparison operator");
    lex_.next();
    bool neg = eat_punct("-");
    if (lex_.peek().kind == Token::Kind::Int) {
      std::int64_t v = lex_.next().value;
      c.rhs_const = neg ? checked_neg(v) : v;
      return c;
    }
    if (neg) lex_.fail("negated variables are not allowed on the rhs");
    c.rhs_var = ident("variable or constant");
    check_declared(*c.rhs_var);
    if (peek_punct("+") || peek_punct("-")) {
      bool minus = lex_.next().text == "-";
      std::int64_t v = integer("constant");
      c.rhs_const = minus ? checked_neg(v) : v;
    }
    return c;
  }

  void check_reachability() const {
    std::vector<bool> seen(prog_.blocks.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      for (int s : prog_.successors(b)) {
        if (!seen[s]) {
          seen[s] = true;
          stack.push_back(s);
        }
      }
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i])
        throw ParseError(1, 1, "block '" + prog_.blocks[i].label +
                                   "' is unreachable from the entry block");
  }

  void check_declared(const std::string& v) {
    if (std::find(prog_.params.begin(), prog_.params.end(), v) ==
        prog_.params.end())
      lex_.fail("reference to undeclared variable '" + v + "'");
  }

  std::string ident(const std::string& what) {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Ident) lex_.fail("expected " + what);
    if (kKeywords.count(t.text)) lex_.fail("keyword '" + t.text +
                                           "' used as " + what);
    return lex_.next().text;
  }

  std::int64_t integer(const std::string& what) {
    if (lex_.peek().kind != Token::Kind::Int) lex_.fail("expected " + what);
    return lex_.next().value;
  }

  void expect_ident(const std::string& kw) {
    const Token& t = lex_.peek();
    if (t.kind != Token::Kind::Ident || t.text != kw)
      lex_.fail("expected '" + kw + "'");
    lex_.next();
  }

  void expect_punct(const std::string& p) {
    if (!eat_punct(p)) lex_.fail("expected '" + p + "'");
  }

  bool peek_punct(const std::string& p) {
    const Token& t = lex_.peek();
    return t.kind == Token::Kind::Punct && t.text == p;
  }

  bool eat_punct(const std::string& p) {
    if (!peek_punct(p)) return false;
    lex_.next();
    return true;
  }

  Lexer lex_;
  Program prog_;
};

std::string expr_to_string(const LinearExpr& e) {
  switch (e.kind) {
    case LinearExpr::Kind::Nondet:
      return "?";
    case LinearExpr::Kind::Const:
      return std::to_string(e.constant);
    case LinearExpr::Kind::Linear: {
      std::ostringstream os;
      if (e.t1->negated) os << "-";
      os << e.t1->var;
      if (e.t2) os << (e.t2->negated ? " - " : " + ") << e.t2->var;
      if (e.constant != 0) {
        if (e.constant > 0)
          os << " + " << e.constant;
        else
          os << " - " << -e.constant;
      }
      return os.str();
    }
  }
  return "";
}

std::string relop_to_string(RelOp op) {
  switch (op) {
    case RelOp::Le: return "<=";
    case RelOp::Lt: return "<";
    case RelOp::Ge: return ">=";
    case RelOp::Gt: return ">";
    case RelOp::Eq: return "==";
    case RelOp::Ne: return "!=";
  }
  return "";
}

std::string cond_to_string(const Condition& c) {
  std::ostringstream os;
  os << c.lhs << " " << relop_to_string(c.op) << " ";
  if (c.rhs_var) {
    os << *c.rhs_var;
    if (c.rhs_const > 0) os << " + " << c.rhs_const;
    if (c.rhs_const < 0) os << " - " << -c.rhs_const;
  } else {
    os << c.rhs_const;
  }
  return os.str();
}

}  // namespace

std::vector<int> Program::successors(int block) const {
  const Terminator& t = blocks[block].term;
  switch (t.kind) {
    case Terminator::Kind::Goto:
      return {t.target};
    case Terminator::Kind::If:
      return {t.target, t.alt_target};
    case Terminator::Kind::Return:
      return {};
  }
  return {};
}

Program parse_program(const std::string& text) { return Parser(text).parse(); }

std::string pretty_print(const Program& p) {
  std::ostringstream os;
  os << "proc " << p.name << "(";
  for (std::size_t i = 0; i < p.params.size(); ++i) {
    if (i) os << ", ";
    os << p.params[i];
  }
  os << ") {\n";
  for (const Block& b : p.blocks) {
    os << "  " << b.label << ":";
    for (const Statement& s : b.stmts) {
      os << "\n    ";
      switch (s.kind) {
        case Statement::Kind::Skip:
          os << "skip;";
          break;
        case Statement::Kind::Assume:
          os << "assume (" << cond_to_string(s.cond) << ");";
          break;
        case Statement::Kind::Assign:
          os << s.target << " := " << expr_to_string(s.rhs) << ";";
          break;
      }
    }
    os << "\n    ";
    switch (b.term.kind) {
      case Terminator::Kind::Goto:
        os << "goto " << p.blocks[b.term.target].label << ";";
        break;
      case Terminator::Kind::Return:
        os << "return;";
        break;
      case Terminator::Kind::If:
        os << "if (" << cond_to_string(b.term.cond) << ") "
           << p.blocks[b.term.target].label << " else "
           << p.blocks[b.term.alt_target].label << ";";
        break;
    }
    os << "\n";
  }
  os << "}\n";
  return os.str();
}

VarSet cond_vars(const Condition& c) {
  VarSet s{c.lhs};
  if (c.rhs_var) s.insert(*c.rhs_var);
  return s;
}

VarSet updated_vars(const Statement& s) {
  switch (s.kind) {
    case Statement::Kind::Assign:
      return {s.target};
    case Statement::Kind::Skip:
      return {};
    case Statement::Kind::Assume:
      return cond_vars(s.cond);
  }
  return {};
}

namespace {

RelOp negate(RelOp op) {
  switch (op) {
    case RelOp::Le: return RelOp::Gt;
    case RelOp::Lt: return RelOp::Ge;
    case RelOp::Ge: return RelOp::Lt;
    case RelOp::Gt: return RelOp::Le;
    case RelOp::Eq: return RelOp::Ne;
    case RelOp::Ne: return RelOp::Eq;
  }
  return op;
}

// lhs - rhs_var <= bound, with an absent rhs_var meaning lhs <= bound.
DiffAtom atom_le(const Condition& c, std::int64_t bound) {
  if (c.rhs_var) return difference(c.lhs, *c.rhs_var, bound);
  return upper_bound(c.lhs, bound);
}

// rhs_var - lhs <= bound (-lhs <= bound when rhs_var is absent).
DiffAtom atom_ge(const Condition& c, std::int64_t bound) {
  if (c.rhs_var) return difference(*c.rhs_var, c.lhs, bound);
  return lower_bound(c.lhs, bound);
}

}  // namespace

GuardAtoms guard_atoms(const Condition& cond, bool polarity) {
  RelOp op = polarity ? cond.op : negate(cond.op);
  std::int64_t c = cond.rhs_const;

  // Conditions relating a variable to itself are constant.
  if (cond.rhs_var && *cond.rhs_var == cond.lhs) {
    bool holds = false;
    switch (op) {
      case RelOp::Le: holds = 0 <= c; break;
      case RelOp::Lt: holds = 0 < c; break;
      case RelOp::Ge: holds = 0 >= c; break;
      case RelOp::Gt: holds = 0 > c; break;
      case RelOp::Eq: holds = c == 0; break;
      case RelOp::Ne: holds = c != 0; break;
    }
    return GuardAtoms{!holds, {}};
  }

  GuardAtoms g;
  switch (op) {
    case RelOp::Le:
      g.atoms.push_back(atom_le(cond, c));
      break;
    case RelOp::Lt:  // lhs < rhs + c  over integers:  lhs - rhs <= c - 1
      g.atoms.push_back(atom_le(cond, checked_sub(c, 1)));
      break;
    case RelOp::Ge:  // lhs >= rhs + c:  rhs - lhs <= -c
      g.atoms.push_back(atom_ge(cond, checked_neg(c)));
      break;
    case RelOp::Gt:  // lhs > rhs + c:  rhs - lhs <= -c - 1
      g.atoms.push_back(atom_ge(cond, checked_sub(checked_neg(c), 1)));
      break;
    case RelOp::Eq:
      g.atoms.push_back(atom_le(cond, c));
      g.atoms.push_back(atom_ge(cond, checked_neg(c)));
      break;
    case RelOp::Ne:
      // A disjunction; not expressible as a conjunction of atoms.
      break;
  }
  return g;
}

std::string point_id(const Program& p, const ProgramPoint& pt) {
  const std::string& label = p.blocks[pt.block].label;
  switch (pt.edge) {
    case ProgramPoint::Edge::None:
      return label + "." + std::to_string(pt.index);
    case ProgramPoint::Edge::True:
      return label + ".t";
    case ProgramPoint::Edge::False:
      return label + ".f";
  }
  return label;
}

}  // namespace invcomp
