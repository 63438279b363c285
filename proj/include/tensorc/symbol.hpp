#pragma once

#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tensorc/index.hpp"

namespace tensorc {

enum class SymmetryType { Symmetric, Antisymmetric };

/// Pairwise slot relation, 0-based slot positions.
struct SlotSymmetry {
  int first = 0;
  int second = 1;
  SymmetryType type = SymmetryType::Symmetric;
};

/// Connected set of slots generated by pairwise relations of one type.
struct SymmetryGroup {
  std::vector<int> slots;
  SymmetryType type = SymmetryType::Symmetric;
};

enum class Attribute { None, Spatial, TimeLike };

/// Numeric constant tensors. They are folded to numbers as soon as all of
/// their indices are literal, and their partial derivatives vanish.
enum class ConstantValue { None, LeviCivita, Delta };

struct Slot {
  std::vector<int> kinds;
  std::vector<Variance> variances{Variance::Up, Variance::Down};

  bool allows_kind(int kind) const;
  bool allows(Variance v) const;
};

/// A signed slot permutation of a symbol's symmetry group.
struct SlotPermutation {
  std::vector<int> perm;
  int sign = 1;
};

struct TensorSymbol {
  std::string name;
  std::vector<Slot> slots;
  std::vector<SlotSymmetry> symmetries;
  Attribute attribute = Attribute::None;
  ConstantValue constant = ConstantValue::None;
  bool parameter = false;

  // Derived at declaration.
  std::vector<SymmetryGroup> groups;
  std::vector<SlotPermutation> permutations;

  int rank() const { return static_cast<int>(slots.size()); }
};

class SymbolTable {
 public:
  explicit SymbolTable(KindTable kinds = KindTable::defaults());

  const TensorSymbol& declare_tensor(std::string name, std::vector<Slot> slots,
                                     std::vector<SlotSymmetry> symmetries = {},
                                     Attribute attribute = Attribute::None,
                                     ConstantValue constant = ConstantValue::None);
  /// Rank-0 symbol whose value comes from the parameter map at run time.
  const TensorSymbol& declare_parameter(std::string name);

  const TensorSymbol* find(std::string_view name) const;
  const TensorSymbol& at(std::string_view name) const;

  const KindTable& kinds() const { return kinds_; }
  KindTable& kinds() { return kinds_; }

  /// Declaration order.
  std::vector<const TensorSymbol*> symbols() const;

  /// Smallest interval covering every kind a slot accepts.
  std::pair<int, int> slot_range(const Slot& slot) const;

 private:
  KindTable kinds_;
  std::deque<TensorSymbol> symbols_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
};

}  // namespace tensorc
