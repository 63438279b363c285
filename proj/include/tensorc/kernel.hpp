#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "tensorc/components.hpp"
#include "tensorc/scalar_expr.hpp"

namespace tensorc {

struct StencilConfig {
  int fd_order = 2;
  int ghost_width = 1;

  /// Only centered second-order stencils are implemented.
  void validate() const;

  friend bool operator==(const StencilConfig&, const StencilConfig&) = default;
};

struct DerivativeLocal {
  std::string name;  // "D1B11"
  int direction = 1;
  std::string source;  // grid function

  friend bool operator==(const DerivativeLocal&, const DerivativeLocal&) = default;
};

/// `<output>L = expr`, where expr refers to grid-function copies, derivative
/// locals, parameters and other outputs of the same kernel.
struct LocalDef {
  std::string output;
  ScalarExpr expr;

  friend bool operator==(const LocalDef&, const LocalDef&) = default;
};

struct KernelIR {
  std::string name;
  std::vector<std::string> inputs;      // sorted
  std::vector<std::string> outputs;     // in definition order
  std::vector<std::string> parameters;  // sorted
  std::vector<DerivativeLocal> derivatives;
  std::vector<LocalDef> locals;  // dependency order
  StencilConfig stencil;

  friend bool operator==(const KernelIR&, const KernelIR&) = default;
};

/// Every name an rhs uses must be a grid function, a derivative name
/// "D<dir><grid function>", a parameter, or another output of the kernel.
KernelIR build_kernel(std::string name, const std::vector<ComponentEquation>& equations,
                      const std::set<std::string>& grid_functions,
                      const std::set<std::string>& parameters, StencilConfig stencil = {});

/// Self-contained C function. nx/ny/nz are the stored extents, ghost
/// zones included; only the interior is written.
std::string emit_c(const KernelIR& kernel, const std::string& function_name);

nlohmann::json to_json(const KernelIR& kernel);
KernelIR kernel_from_json(const nlohmann::json& j);

}  // namespace tensorc
