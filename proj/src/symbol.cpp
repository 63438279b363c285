#include "tensorc/symbol.hpp"

#include <algorithm>
#include <numeric>

#include "tensorc/error.hpp"

namespace tensorc {

bool Slot::allows_kind(int kind) const {
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

bool Slot::allows(Variance v) const {
  return std::find(variances.begin(), variances.end(), v) != variances.end();
}

namespace {

int permutation_parity(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[static_cast<std::size_t>(p[i])]);
      sign = -sign;
    }
  }
  return sign;
}

// Union-find over the pairwise relations; every component must be
// homogeneous in type and in the kinds its slots accept.
std::vector<SymmetryGroup> build_groups(const TensorSymbol& s) {
  const int n = s.rank();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (const auto& rel : s.symmetries) {
    parent[static_cast<std::size_t>(root(rel.first))] = root(rel.second);
  }
  std::vector<SymmetryGroup> groups;
  std::vector<int> group_of(static_cast<std::size_t>(n), -1);
  for (int slot = 0; slot < n; ++slot) {
    int r = root(slot);
    if (group_of[static_cast<std::size_t>(r)] < 0) {
      group_of[static_cast<std::size_t>(r)] = static_cast<int>(groups.size());
      groups.push_back({});
    }
    groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(r)])].slots.push_back(slot);
  }
  for (const auto& rel : s.symmetries) {
    auto& g = groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(root(rel.first))])];
    g.type = rel.type;
  }
  for (const auto& rel : s.symmetries) {
    const auto& g = groups[static_cast<std::size_t>(group_of[static_cast<std::size_t>(root(rel.first))])];
    if (g.type != rel.type) {
      throw Error(ErrorCode::Symbol, "symbol '" + s.name +
                                         "': mixed symmetric/antisymmetric relations on connected slots are not supported");
    }
  }
  std::erase_if(groups, [](const SymmetryGroup& g) { return g.slots.size() < 2; });
  return groups;
}

std::vector<SlotPermutation> build_permutations(const TensorSymbol& s) {
  std::vector<SlotPermutation> out;
  std::vector<int> identity(static_cast<std::size_t>(s.rank()));
  std::iota(identity.begin(), identity.end(), 0);
  out.push_back({identity, 1});
  for (const auto& g : s.groups) {
    std::vector<SlotPermutation> next;
    std::vector<int> order(g.slots.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::pair<std::vector<int>, int>> local;
    do {
      int sign = g.type == SymmetryType::Antisymmetric ? permutation_parity(order) : 1;
      local.emplace_back(order, sign);
    } while (std::next_permutation(order.begin(), order.end()));
    for (const auto& base : out) {
      for (const auto& [ord, sign] : local) {
        SlotPermutation p = base;
        for (std::size_t k = 0; k < g.slots.size(); ++k) {
          p.perm[static_cast<std::size_t>(g.slots[k])] =
              base.perm[static_cast<std::size_t>(g.slots[static_cast<std::size_t>(ord[k])])];
        }
        p.sign *= sign;
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

SymbolTable::SymbolTable(KindTable kinds) : kinds_(std::move(kinds)) {}

const TensorSymbol& SymbolTable::declare_tensor(std::string name, std::vector<Slot> slots,
                                                std::vector<SlotSymmetry> symmetries,
                                                Attribute attribute, ConstantValue constant) {
  if (name.empty()) throw Error(ErrorCode::Symbol, "empty tensor name");
  if (name == "OD" || name == "CD" || name == "LD") {
    throw Error(ErrorCode::Symbol, "'" + name + "' is reserved for derivative factors");
  }
  if (by_name_.contains(name)) {
    throw Error(ErrorCode::Symbol, "duplicate tensor name '" + name + "'");
  }
  TensorSymbol s;
  s.name = std::move(name);
  s.slots = std::move(slots);
  s.symmetries = std::move(symmetries);
  s.attribute = attribute;
  s.constant = constant;
  for (const auto& slot : s.slots) {
    if (slot.kinds.empty() || slot.variances.empty()) {
      throw Error(ErrorCode::Symbol, "symbol '" + s.name + "' has a slot without kinds or variances");
    }
    for (int k : slot.kinds) {
      if (k < 0 || k >= kinds_.size()) {
        throw Error(ErrorCode::Symbol, "symbol '" + s.name + "' references an unknown index kind");
      }
    }
  }
  for (const auto& rel : s.symmetries) {
    if (rel.first < 0 || rel.second < 0 || rel.first >= s.rank() || rel.second >= s.rank() ||
        rel.first == rel.second) {
      throw Error(ErrorCode::Symbol, "symbol '" + s.name + "': invalid symmetry slot pair");
    }
    auto ka = s.slots[static_cast<std::size_t>(rel.first)].kinds;
    auto kb = s.slots[static_cast<std::size_t>(rel.second)].kinds;
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    if (ka != kb) {
      throw Error(ErrorCode::Symbol, "symbol '" + s.name + "': symmetry between slots of different index kinds");
    }
  }
  if (constant == ConstantValue::Delta && s.rank() != 2) {
    throw Error(ErrorCode::Symbol, "delta symbol '" + s.name + "' must have rank 2");
  }
  if (constant == ConstantValue::LeviCivita) {
    bool full = true;
    auto groups = build_groups(s);
    if (groups.size() != 1 || static_cast<int>(groups[0].slots.size()) != s.rank() ||
        groups[0].type != SymmetryType::Antisymmetric) {
      full = false;
    }
    if (!full) {
      throw Error(ErrorCode::Symbol, "Levi-Civita symbol '" + s.name + "' must be totally antisymmetric");
    }
  }
  s.groups = build_groups(s);
  s.permutations = build_permutations(s);
  by_name_.emplace(s.name, symbols_.size());
  symbols_.push_back(std::move(s));
  return symbols_.back();
}

const TensorSymbol& SymbolTable::declare_parameter(std::string name) {
  const auto& s = declare_tensor(std::move(name), {});
  auto& mutable_s = symbols_.back();
  mutable_s.parameter = true;
  return s;
}

const TensorSymbol* SymbolTable::find(std::string_view name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : &symbols_[it->second];
}

const TensorSymbol& SymbolTable::at(std::string_view name) const {
  if (const auto* s = find(name)) return *s;
  throw Error(ErrorCode::Symbol, "unknown symbol '" + std::string(name) + "'");
}

std::vector<const TensorSymbol*> SymbolTable::symbols() const {
  std::vector<const TensorSymbol*> out;
  for (const auto& s : symbols_) out.push_back(&s);
  return out;
}

std::pair<int, int> SymbolTable::slot_range(const Slot& slot) const {
  int lo = 9, hi = 0;
  for (int k : slot.kinds) {
    lo = std::min(lo, kinds_.at(k).lo);
    hi = std::max(hi, kinds_.at(k).hi);
  }
  return {lo, hi};
}

}  // namespace tensorc
