#include "tensorc/expr.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tensorc/error.hpp"

namespace tensorc {

Expr Expr::constant(const Rational& value) {
  Expr e;
  if (value != 0) e.terms.push_back(Term{value, {}});
  return e;
}

Factor make_tensor(std::string name, std::vector<Index> indices, int power) {
  return Factor{TensorFactor{std::move(name), std::move(indices), power}};
}

Factor make_derivative(DerivativeOp op, std::vector<Factor> operand, Index direction,
                       std::string vector) {
  DerivativeFactor d;
  d.op = op;
  d.operand = std::move(operand);
  d.direction = std::move(direction);
  d.vector = std::move(vector);
  return Factor{std::move(d)};
}

Expr operator+(Expr a, const Expr& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr out;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      Term t{ta.coefficient * tb.coefficient, ta.factors};
      t.factors.insert(t.factors.end(), tb.factors.begin(), tb.factors.end());
      out.terms.push_back(std::move(t));
    }
  }
  return out;
}

Expr scale(Expr e, const Rational& c) {
  if (c == 0) return {};
  for (auto& t : e.terms) t.coefficient *= c;
  return e;
}

namespace {

int compare_indices(const std::vector<Index>& a, const std::vector<Index>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = compare(a[i], b[i]); c != 0) return c;
  }
  return 0;
}

}  // namespace

int compare(const Factor& a, const Factor& b) {
  if (a.is_tensor() != b.is_tensor()) return a.is_tensor() ? -1 : 1;
  if (a.is_tensor()) {
    const auto& ta = a.tensor();
    const auto& tb = b.tensor();
    if (int c = ta.name.compare(tb.name); c != 0) return c < 0 ? -1 : 1;
    if (int c = compare_indices(ta.indices, tb.indices); c != 0) return c;
    if (ta.power != tb.power) return ta.power < tb.power ? -1 : 1;
    return 0;
  }
  const auto& da = a.derivative();
  const auto& db = b.derivative();
  if (da.op != db.op) return da.op < db.op ? -1 : 1;
  if (int c = da.vector.compare(db.vector); c != 0) return c < 0 ? -1 : 1;
  if (int c = compare(da.operand, db.operand); c != 0) return c;
  if (da.op != DerivativeOp::Lie) return compare(da.direction, db.direction);
  return 0;
}

int compare(const std::vector<Factor>& a, const std::vector<Factor>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a[i], b[i]); c != 0) return c;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

std::string to_string(DerivativeOp op) {
  switch (op) {
    case DerivativeOp::Partial: return "OD";
    case DerivativeOp::Covariant: return "CD";
    case DerivativeOp::Lie: return "LD";
  }
  return "?";
}

namespace {

std::string product_string(const std::vector<Factor>& factors) {
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) out += "*";
    out += to_string(factors[i]);
  }
  return out.empty() ? "1" : out;
}

}  // namespace

std::string to_string(const Factor& f) {
  if (f.is_tensor()) {
    const auto& t = f.tensor();
    std::string out = t.name;
    if (!t.indices.empty()) {
      out += "[";
      for (std::size_t i = 0; i < t.indices.size(); ++i) {
        if (i) out += ",";
        out += to_string(t.indices[i]);
      }
      out += "]";
    }
    if (t.power != 1) out += "^" + std::to_string(t.power);
    return out;
  }
  const auto& d = f.derivative();
  if (d.op == DerivativeOp::Lie) return "LD(" + d.vector + "; " + product_string(d.operand) + ")";
  return to_string(d.op) + "(" + product_string(d.operand) + ", " + to_string(d.direction) + ")";
}

std::string to_string(const Term& t, bool leading) {
  std::string out;
  Rational c = t.coefficient;
  if (c < 0) {
    out += leading ? "-" : " - ";
    c = -c;
  } else if (!leading) {
    out += " + ";
  }
  if (t.factors.empty()) return out + to_string(c);
  if (c != 1) out += to_string(c) + "*";
  return out + product_string(t.factors);
}

std::string to_string(const Expr& e) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) out += to_string(e.terms[i], i == 0);
  return out;
}

void for_each_index(const std::vector<Factor>& factors,
                    const std::function<void(const Index&)>& fn) {
  for (const auto& f : factors) {
    if (f.is_tensor()) {
      for (const auto& ix : f.tensor().indices) fn(ix);
    } else {
      const auto& d = f.derivative();
      for_each_index(d.operand, fn);
      if (d.op != DerivativeOp::Lie) fn(d.direction);
    }
  }
}

void for_each_index(std::vector<Factor>& factors, const std::function<void(Index&)>& fn) {
  for (auto& f : factors) {
    if (f.is_tensor()) {
      for (auto& ix : f.tensor().indices) fn(ix);
    } else {
      auto& d = f.derivative();
      for_each_index(d.operand, fn);
      if (d.op != DerivativeOp::Lie) fn(d.direction);
    }
  }
}

IndexCensus census(const Term& term) {
  struct Seen {
    std::vector<Index> occurrences;
  };
  std::map<std::string, Seen> seen;
  for_each_index(term.factors, [&](const Index& ix) {
    if (!ix.is_literal()) seen[ix.label].occurrences.push_back(ix);
  });
  IndexCensus out;
  for (auto& [label, s] : seen) {
    if (s.occurrences.size() == 1) {
      out.free.push_back(s.occurrences.front());
    } else if (s.occurrences.size() == 2) {
      const auto& a = s.occurrences[0];
      const auto& b = s.occurrences[1];
      if (a.variance == b.variance) {
        throw Error(ErrorCode::Index, "index '" + label + "' appears twice with the same variance in '" +
                                          to_string(term) + "'");
      }
      if (a.kind != b.kind) {
        throw Error(ErrorCode::Index, "index '" + label + "' is contracted across different index kinds");
      }
      out.dummies.push_back(label);
    } else {
      throw Error(ErrorCode::Index, "index '" + label + "' appears " +
                                        std::to_string(s.occurrences.size()) + " times in '" +
                                        to_string(term) + "'");
    }
  }
  for (auto& ix : out.free) {
    ix.wildcard = false;
  }
  return out;
}

std::vector<Index> free_indices(const Expr& expr) {
  std::vector<Index> reference;
  bool first = true;
  for (const auto& t : expr.terms) {
    auto c = census(t);
    if (first) {
      reference = std::move(c.free);
      first = false;
      continue;
    }
    if (c.free != reference) {
      throw Error(ErrorCode::Index, "inconsistent free indices across terms of '" + to_string(expr) + "'");
    }
  }
  return reference;
}

void check_well_formed(const Expr& expr) { (void)free_indices(expr); }

std::vector<std::string> labels_in(const Term& term) {
  std::set<std::string> labels;
  for_each_index(term.factors, [&](const Index& ix) {
    if (!ix.is_literal()) labels.insert(ix.label);
  });
  return {labels.begin(), labels.end()};
}

}  // namespace tensorc
