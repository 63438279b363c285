#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tensorc {

enum class Variance : std::uint8_t { Up, Down };

inline Variance opposite(Variance v) {
  return v == Variance::Up ? Variance::Down : Variance::Up;
}

/// A family of indices sharing a value range, e.g. spacetime 0..3 or
/// spatial 1..3. Abstract labels belong to a kind through their first
/// character, so `letters` must be disjoint across the kinds of one table.
struct IndexKind {
  std::string name;
  int lo = 0;
  int hi = 0;
  std::string letters;

  int size() const { return hi - lo + 1; }
  bool contains(int value) const { return value >= lo && value <= hi; }
};

class KindTable {
 public:
  /// spacetime 0..3 with labels a-h, spatial 1..3 with labels i-z.
  static KindTable defaults();

  int add(IndexKind kind);
  int find(std::string_view name) const;
  /// Kind owning an abstract label, or -1.
  int kind_of_label(std::string_view label) const;
  const IndexKind& at(int id) const { return kinds_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(kinds_.size()); }

 private:
  std::vector<IndexKind> kinds_;
};

/// One index slot occurrence. Literal indices carry a value and no label;
/// they are kind-agnostic (the slot decides the range). Wildcards only
/// occur in generated rule patterns: they bind any index and carry its
/// variance into the rule's right-hand side.
struct Index {
  std::string label;
  int value = 0;
  int kind = -1;
  Variance variance = Variance::Down;
  bool wildcard = false;

  static Index abstract(std::string label, int kind, Variance variance) {
    Index ix;
    ix.label = std::move(label);
    ix.kind = kind;
    ix.variance = variance;
    return ix;
  }
  static Index literal(int value, Variance variance) {
    Index ix;
    ix.value = value;
    ix.variance = variance;
    return ix;
  }

  bool is_literal() const { return label.empty(); }
  bool same_slot_identity(const Index& other) const {
    return label == other.label && value == other.value && kind == other.kind;
  }

  friend bool operator==(const Index&, const Index&) = default;
};

/// Literals before abstract indices, then value/label, then variance.
int compare(const Index& a, const Index& b);

/// `u_a`, `l_3`.
std::string to_string(const Index& ix);

}  // namespace tensorc
