#include "tensorc/index.hpp"

#include "tensorc/error.hpp"

namespace tensorc {

KindTable KindTable::defaults() {
  KindTable t;
  t.add({"spacetime", 0, 3, "abcdefgh"});
  t.add({"spatial", 1, 3, "ijklmnopqrstuvwxyz"});
  return t;
}

int KindTable::add(IndexKind kind) {
  if (kind.hi < kind.lo) {
    throw Error(ErrorCode::Index, "index kind '" + kind.name + "' has an empty range");
  }
  if (kind.lo < 0 || kind.hi > 9) {
    throw Error(ErrorCode::Index,
                "index kind '" + kind.name + "' must lie within 0..9 (component names use single digits)");
  }
  if (find(kind.name) >= 0) {
    throw Error(ErrorCode::Index, "duplicate index kind '" + kind.name + "'");
  }
  for (char c : kind.letters) {
    if (kind_of_label(std::string(1, c)) >= 0) {
      throw Error(ErrorCode::Index, std::string("label letter '") + c +
                                        "' already belongs to another index kind");
    }
  }
  kinds_.push_back(std::move(kind));
  return size() - 1;
}

int KindTable::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i) {
    if (kinds_[static_cast<std::size_t>(i)].name == name) return i;
  }
  return -1;
}

int KindTable::kind_of_label(std::string_view label) const {
  if (label.empty()) return -1;
  for (int i = 0; i < size(); ++i) {
    if (kinds_[static_cast<std::size_t>(i)].letters.find(label.front()) != std::string::npos) return i;
  }
  return -1;
}

int compare(const Index& a, const Index& b) {
  if (a.is_literal() != b.is_literal()) return a.is_literal() ? -1 : 1;
  if (a.is_literal()) {
    if (a.value != b.value) return a.value < b.value ? -1 : 1;
  } else if (int c = a.label.compare(b.label); c != 0) {
    return c < 0 ? -1 : 1;
  }
  if (a.variance != b.variance) return a.variance == Variance::Up ? -1 : 1;
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  return 0;
}

std::string to_string(const Index& ix) {
  std::string out = ix.variance == Variance::Up ? "u_" : "l_";
  if (ix.is_literal()) return out + std::to_string(ix.value);
  return out + ix.label;
}

}  // namespace tensorc
