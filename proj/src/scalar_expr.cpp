#include "tensorc/scalar_expr.hpp"

#include <algorithm>
#include <cmath>

namespace tensorc {

Monomial ScalarExpr::normalize(Monomial m) {
  std::sort(m.powers.begin(), m.powers.end());
  std::vector<std::pair<std::string, int>> merged;
  for (auto& p : m.powers) {
    if (!merged.empty() && merged.back().first == p.first) {
      merged.back().second += p.second;
    } else {
      merged.push_back(std::move(p));
    }
  }
  std::erase_if(merged, [](const auto& p) { return p.second == 0; });
  m.powers = std::move(merged);
  return m;
}

void ScalarExpr::add(Monomial m) {
  m = normalize(std::move(m));
  if (m.coefficient == 0) return;
  for (auto& t : terms) {
    if (t.powers == m.powers) {
      t.coefficient += m.coefficient;
      return;
    }
  }
  terms.push_back(std::move(m));
}

void ScalarExpr::finalize() {
  std::erase_if(terms, [](const Monomial& m) { return m.coefficient == 0; });
  std::stable_sort(terms.begin(), terms.end(),
                   [](const Monomial& a, const Monomial& b) { return a.powers < b.powers; });
}

std::set<std::string> ScalarExpr::names() const {
  std::set<std::string> out;
  for (const auto& t : terms) {
    for (const auto& p : t.powers) out.insert(p.first);
  }
  return out;
}

double ScalarExpr::evaluate(const std::function<double(const std::string&)>& value) const {
  double sum = 0;
  for (const auto& t : terms) {
    double v = to_double(t.coefficient);
    for (const auto& [name, power] : t.powers) v *= std::pow(value(name), power);
    sum += v;
  }
  return sum;
}

std::string to_string(const Monomial& m, bool leading) {
  std::string out;
  Rational c = m.coefficient;
  if (c < 0) {
    out += leading ? "-" : " - ";
    c = -c;
  } else if (!leading) {
    out += " + ";
  }
  if (m.powers.empty()) return out + to_string(c);
  if (c != 1) out += to_string(c) + "*";
  for (std::size_t i = 0; i < m.powers.size(); ++i) {
    if (i) out += "*";
    out += m.powers[i].first;
    if (m.powers[i].second != 1) out += "^" + std::to_string(m.powers[i].second);
  }
  return out;
}

std::string to_string(const ScalarExpr& e) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < e.terms.size(); ++i) out += to_string(e.terms[i], i == 0);
  return out;
}

}  // namespace tensorc
