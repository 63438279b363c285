#include "tensorc/parser.hpp"

#include <cctype>
#include <string>
#include <vector>

#include "tensorc/error.hpp"

namespace tensorc {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      t.kind = Tok::Number;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (std::string_view("+-*/^()[],;").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      ++i;
    } else {
      throw Error(ErrorCode::Parse, std::string("unexpected character '") + c + "' at offset " +
                                        std::to_string(i));
    }
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::End, "", s.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const SymbolTable& table)
      : text_(text), table_(table), toks_(tokenize(text)) {}

  Expr parse() {
    Expr e = expr();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_++]; }
  bool accept(std::string_view punct) {
    if (peek().kind == Tok::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::Parse, msg + " at offset " + std::to_string(peek().pos) + " in '" +
                                      std::string(text_) + "'");
  }

  Expr expr() {
    Rational sign = 1;
    if (accept("-")) sign = -1;
    else accept("+");
    Expr out = scale(term(), sign);
    while (true) {
      if (accept("+")) out = out + term();
      else if (accept("-")) out = out + scale(term(), -1);
      else break;
    }
    return out;
  }

  Expr term() {
    Expr out = factor();
    while (true) {
      if (accept("*")) {
        out = out * factor();
      } else if (accept("/")) {
        out = out * invert(factor());
      } else {
        break;
      }
    }
    return out;
  }

  Expr invert(const Expr& e) {
    if (e.terms.size() == 1 && e.terms[0].factors.empty()) {
      if (e.terms[0].coefficient == 0) fail("division by zero");
      return Expr::constant(1 / e.terms[0].coefficient);
    }
    if (e.terms.size() == 1 && e.terms[0].factors.size() == 1 && e.terms[0].factors[0].is_tensor() &&
        e.terms[0].factors[0].tensor().indices.empty()) {
      Term t = e.terms[0];
      t.coefficient = 1 / t.coefficient;
      t.factors[0].tensor().power = -t.factors[0].tensor().power;
      return Expr{{t}};
    }
    fail("division is only supported by numbers and rank-0 symbols");
  }

  Expr factor() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return Expr::constant(parse_rational(t.text));
    }
    if (accept("(")) {
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail("expected a factor");
    std::string name = next().text;
    if (name == "OD" || name == "CD") {
      return derivative(name == "OD" ? DerivativeOp::Partial : DerivativeOp::Covariant);
    }
    if (name == "LD") return lie();
    const TensorSymbol* sym = table_.find(name);
    if (!sym) fail("unknown symbol '" + name + "'");
    if (accept("[")) {
      std::vector<Index> indices;
      if (!accept("]")) {
        do {
          if (indices.size() >= sym->slots.size()) fail("too many indices for '" + name + "'");
          indices.push_back(slot_index(sym->slots[indices.size()], name));
        } while (accept(","));
        expect("]");
      }
      if (indices.size() != sym->slots.size()) {
        fail("'" + name + "' expects " + std::to_string(sym->slots.size()) + " indices");
      }
      return Expr{{Term{1, {make_tensor(name, std::move(indices))}}}};
    }
    if (sym->rank() != 0) fail("'" + name + "' needs indices");
    int power = 1;
    if (accept("^")) {
      int sign = accept("-") ? -1 : 1;
      if (peek().kind != Tok::Number) fail("expected an integer exponent");
      power = sign * std::stoi(next().text);
      if (power == 0) return Expr::constant(1);
    }
    return Expr{{Term{1, {make_tensor(name, {}, power)}}}};
  }

  Expr derivative(DerivativeOp op) {
    expect("(");
    Expr operand = expr();
    expect(",");
    Index dir = free_index();
    expect(")");
    Expr out;
    for (auto& t : operand.terms) {
      if (t.factors.empty()) continue;
      out.terms.push_back(Term{t.coefficient, {make_derivative(op, std::move(t.factors), dir)}});
    }
    return out;
  }

  Expr lie() {
    expect("(");
    if (peek().kind != Tok::Ident) fail("expected a vector name in LD");
    std::string vec = next().text;
    if (!table_.find(vec)) fail("unknown symbol '" + vec + "'");
    expect(";");
    Expr operand = expr();
    expect(")");
    Expr out;
    for (auto& t : operand.terms) {
      if (t.factors.empty()) continue;
      out.terms.push_back(
          Term{t.coefficient, {make_derivative(DerivativeOp::Lie, std::move(t.factors), Index{}, vec)}});
    }
    return out;
  }

  struct RawIndex {
    bool has_variance = false;
    Variance variance = Variance::Down;
    bool literal = false;
    int value = 0;
    std::string label;
  };

  RawIndex raw_index() {
    RawIndex r;
    const Token t = next();
    if (t.kind == Tok::Number) {
      r.literal = true;
      r.value = std::stoi(t.text);
      return r;
    }
    if (t.kind != Tok::Ident || t.text.size() < 3 || t.text[1] != '_' ||
        (t.text[0] != 'u' && t.text[0] != 'l')) {
      --pos_;
      fail("expected an index like u_a, l_a or a digit");
    }
    r.has_variance = true;
    r.variance = t.text[0] == 'u' ? Variance::Up : Variance::Down;
    std::string rest = t.text.substr(2);
    if (std::isdigit(static_cast<unsigned char>(rest[0]))) {
      for (char c : rest) {
        if (!std::isdigit(static_cast<unsigned char>(c))) fail("malformed literal index '" + t.text + "'");
      }
      r.literal = true;
      r.value = std::stoi(rest);
    } else {
      r.label = rest;
    }
    return r;
  }

  Index slot_index(const Slot& slot, const std::string& tensor) {
    RawIndex r = raw_index();
    Variance v = r.has_variance ? r.variance : slot.variances.front();
    if (!slot.allows(v)) fail("variance not allowed in this slot of '" + tensor + "'");
    if (r.literal) {
      auto [lo, hi] = table_.slot_range(slot);
      if (r.value < lo || r.value > hi) {
        fail("literal index " + std::to_string(r.value) + " out of range for '" + tensor + "'");
      }
      return Index::literal(r.value, v);
    }
    int kind = table_.kinds().kind_of_label(r.label);
    if (kind < 0) fail("label '" + r.label + "' belongs to no index kind");
    if (!slot.allows_kind(kind)) {
      fail("index '" + r.label + "' of kind " + table_.kinds().at(kind).name + " not allowed in '" +
           tensor + "'");
    }
    return Index::abstract(r.label, kind, v);
  }

  Index free_index() {
    RawIndex r = raw_index();
    Variance v = r.has_variance ? r.variance : Variance::Down;
    if (r.literal) return Index::literal(r.value, v);
    int kind = table_.kinds().kind_of_label(r.label);
    if (kind < 0) fail("label '" + r.label + "' belongs to no index kind");
    return Index::abstract(r.label, kind, v);
  }

  std::string_view text_;
  const SymbolTable& table_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

}  // namespace

Expr parse_expression(std::string_view text, const SymbolTable& table) {
  Expr e = Parser(text, table).parse();
  check_well_formed(e);
  return e;
}

const TensorSymbol& declare_from_text(std::string_view line, SymbolTable& table) {
  std::string s = trim(line);
  auto fail = [&](const std::string& msg) -> Error {
    return Error(ErrorCode::Symbol, msg + " in declaration '" + s + "'");
  };
  std::size_t i = 0;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  std::string name = s.substr(0, i);
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0]))) throw fail("missing tensor name");
  std::vector<Slot> slots;
  if (i < s.size() && s[i] == '[') {
    auto close = s.find(']', i);
    if (close == std::string::npos) throw fail("unterminated slot list");
    std::string inner = trim(std::string_view(s).substr(i + 1, close - i - 1));
    if (!inner.empty()) {
      for (const auto& spec : split(inner, ',')) {
        Slot slot;
        std::string kinds = spec;
        if (kinds.size() > 2 && kinds[1] == ':' && (kinds[0] == 'u' || kinds[0] == 'l')) {
          slot.variances = {kinds[0] == 'u' ? Variance::Up : Variance::Down};
          kinds = trim(kinds.substr(2));
        }
        for (const auto& k : split(kinds, '|')) {
          int id = table.kinds().find(k);
          if (id < 0) throw fail("unknown index kind '" + k + "'");
          slot.kinds.push_back(id);
        }
        slots.push_back(std::move(slot));
      }
    }
    i = close + 1;
  }
  std::vector<SlotSymmetry> symmetries;
  Attribute attribute = Attribute::None;
  ConstantValue constant = ConstantValue::None;
  std::string rest = s.substr(i);
  std::size_t p = 0;
  while (p < rest.size()) {
    if (std::isspace(static_cast<unsigned char>(rest[p]))) {
      ++p;
      continue;
    }
    std::size_t q = p;
    while (q < rest.size() && std::isalpha(static_cast<unsigned char>(rest[q]))) ++q;
    std::string word = rest.substr(p, q - p);
    if (word.empty()) throw fail("unexpected '" + rest.substr(p, 1) + "'");
    if (word == "sym" || word == "antisym") {
      if (q >= rest.size() || rest[q] != '(') throw fail("expected '(' after " + word);
      auto close = rest.find(')', q);
      if (close == std::string::npos) throw fail("unterminated " + word);
      std::vector<int> pos;
      for (const auto& n : split(std::string_view(rest).substr(q + 1, close - q - 1), ',')) {
        try {
          pos.push_back(std::stoi(n) - 1);
        } catch (const std::exception&) {
          throw fail("bad slot number '" + n + "'");
        }
      }
      if (pos.size() < 2) throw fail(word + " needs at least two slots");
      auto type = word == "sym" ? SymmetryType::Symmetric : SymmetryType::Antisymmetric;
      for (std::size_t a = 0; a < pos.size(); ++a) {
        for (std::size_t b = a + 1; b < pos.size(); ++b) symmetries.push_back({pos[a], pos[b], type});
      }
      p = close + 1;
      continue;
    }
    if (word == "spatial") attribute = Attribute::Spatial;
    else if (word == "timelike") attribute = Attribute::TimeLike;
    else if (word == "levicivita") constant = ConstantValue::LeviCivita;
    else if (word == "delta") constant = ConstantValue::Delta;
    else throw fail("unknown option '" + word + "'");
    p = q;
  }
  return table.declare_tensor(name, std::move(slots), std::move(symmetries), attribute, constant);
}

}  // namespace tensorc
