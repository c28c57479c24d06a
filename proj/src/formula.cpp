#include "invcomp/formula.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace invcomp {

void Formula::normalize() {
  if (is_false) {
    atoms.clear();
    blocks.clear();
    return;
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  for (auto& b : blocks) {
    std::sort(b.blocks.begin(), b.blocks.end());
    b.blocks.erase(std::unique(b.blocks.begin(), b.blocks.end()),
                   b.blocks.end());
  }
  std::sort(blocks.begin(), blocks.end());
  blocks.erase(std::unique(blocks.begin(), blocks.end()), blocks.end());
}

VarSet vars_of(const DiffAtom& a) {
  VarSet s;
  if (a.plus) s.insert(*a.plus);
  if (a.minus) s.insert(*a.minus);
  return s;
}

VarSet vars_of(const Formula& f) {
  VarSet s;
  if (f.is_false) return s;
  for (const auto& a : f.atoms) {
    if (a.plus) s.insert(*a.plus);
    if (a.minus) s.insert(*a.minus);
  }
  for (const auto& b : f.blocks) s.insert(b.var);
  return s;
}

DiffAtom upper_bound(std::string v, std::int64_t c) {
  return DiffAtom{std::move(v), std::nullopt, c};
}
DiffAtom lower_bound(std::string v, std::int64_t c) {
  return DiffAtom{std::nullopt, std::move(v), c};
}
DiffAtom difference(std::string p, std::string m, std::int64_t c) {
  return DiffAtom{std::move(p), std::move(m), c};
}

std::string to_string(const DiffAtom& a) {
  std::ostringstream os;
  if (a.plus) {
    os << *a.plus;
    if (a.minus) os << "-" << *a.minus;
  } else {
    os << "-" << *a.minus;
  }
  os << "<=" << a.bound;
  return os.str();
}

std::string to_string(const IntInterval& iv) {
  if (iv.lo && iv.hi && *iv.lo == *iv.hi) return std::to_string(*iv.lo);
  std::ostringstream os;
  os << "[";
  if (iv.lo)
    os << *iv.lo;
  else
    os << "-inf";
  os << ",";
  if (iv.hi)
    os << *iv.hi;
  else
    os << "+inf";
  os << "]";
  return os.str();
}

std::string to_string(const Formula& f) {
  if (f.is_false) return "false";
  if (f.is_true()) return "true";
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << " & ";
    first = false;
  };
  for (const auto& a : f.atoms) {
    sep();
    os << to_string(a);
  }
  for (const auto& b : f.blocks) {
    sep();
    os << b.var << " in {";
    for (std::size_t i = 0; i < b.blocks.size(); ++i) {
      if (i) os << ",";
      os << to_string(b.blocks[i]);
    }
    os << "}";
  }
  return os.str();
}

namespace {

struct Cursor {
  const std::string& s;
  std::size_t i = 0;

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(const std::string& tok) {
    skip_ws();
    if (s.compare(i, tok.size(), tok) == 0) {
      i += tok.size();
      return true;
    }
    return false;
  }
  bool done() {
    skip_ws();
    return i >= s.size();
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("formula parse error at offset " +
                             std::to_string(i) + ": " + what + " in \"" + s +
                             "\"");
  }
  std::string ident() {
    skip_ws();
    std::size_t start = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    if (start == i) fail("expected identifier");
    return s.substr(start, i - start);
  }
  std::int64_t integer() {
    skip_ws();
    std::size_t start = i;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (start == i) fail("expected integer");
    return std::stoll(s.substr(start, i - start));
  }
  std::optional<std::int64_t> interval_end() {
    if (eat("-inf")) return std::nullopt;
    if (eat("+inf") || eat("inf")) return std::nullopt;
    return integer();
  }
};

}  // namespace

Formula parse_formula(const std::string& text) {
  Cursor c{text};
  if (c.eat("false")) {
    if (!c.done()) c.fail("trailing input after false");
    return Formula::ff();
  }
  Formula f;
  if (c.eat("true")) {
    if (!c.done()) c.fail("trailing input after true");
    return f;
  }
  for (;;) {
    c.skip_ws();
    bool leading_minus = c.eat("-");
    std::string v1 = c.ident();
    c.skip_ws();
    if (!leading_minus && c.eat("in")) {
      if (!c.eat("{")) c.fail("expected '{'");
      BlockConstraint bc{v1, {}};
      for (;;) {
        c.skip_ws();
        if (c.eat("[")) {
          IntInterval iv;
          iv.lo = c.interval_end();
          if (!c.eat(",")) c.fail("expected ','");
          iv.hi = c.interval_end();
          if (!c.eat("]")) c.fail("expected ']'");
          bc.blocks.push_back(iv);
        } else {
          std::int64_t k = c.integer();
          bc.blocks.push_back(IntInterval{k, k});
        }
        if (c.eat(",")) continue;
        if (c.eat("}")) break;
        c.fail("expected ',' or '}'");
      }
      f.blocks.push_back(std::move(bc));
    } else {
      DiffAtom a;
      if (leading_minus) {
        a.minus = v1;
      } else {
        a.plus = v1;
        if (c.eat("-")) a.minus = c.ident();
      }
      if (!c.eat("<=")) c.fail("expected '<='");
      a.bound = c.integer();
      if (a.plus && a.minus && *a.plus == *a.minus)
        c.fail("atom relates a variable to itself");
      f.atoms.push_back(std::move(a));
    }
    if (c.done()) break;
    if (!c.eat("&")) c.fail("expected '&'");
  }
  f.normalize();
  return f;
}

}  // namespace invcomp
