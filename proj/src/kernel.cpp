#include "tensorc/kernel.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tensorc/error.hpp"

namespace tensorc {

void StencilConfig::validate() const {
  if (fd_order != 2) {
    throw Error(ErrorCode::Kernel, "finite-difference order " + std::to_string(fd_order) +
                                       " is not supported (only 2)");
  }
  if (ghost_width < fd_order / 2) {
    throw Error(ErrorCode::Kernel, "ghost width " + std::to_string(ghost_width) +
                                       " is too small for order " + std::to_string(fd_order));
  }
}

namespace {

const std::set<std::string>& reserved_names() {
  static const std::set<std::string> names = {
      "i", "j", "k", "index", "istart", "jstart", "kstart", "iend", "jend", "kend",
      "dx", "dy", "dz", "dxi", "dyi", "dzi", "hdxi", "hdyi", "hdzi", "nx", "ny", "nz",
      "ghost", "INITVALUE", "GFINDEX3D", "D1gf", "D2gf", "D3gf", "pow", "restrict",
      "auto", "break", "case", "char", "const", "continue", "default", "do", "double",
      "else", "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long",
      "register", "return", "short", "signed", "sizeof", "static", "struct", "switch",
      "typedef", "union", "unsigned", "void", "volatile", "while"};
  return names;
}

enum class NameClass { Output, Input, Derivative, Parameter };

struct Classified {
  NameClass cls;
  int direction = 0;
  std::string source;
};

Classified classify(const std::string& name, const std::set<std::string>& outputs,
                    const std::set<std::string>& grid_functions, const std::set<std::string>& parameters,
                    const std::string& where) {
  if (outputs.contains(name)) return {NameClass::Output, 0, {}};
  if (grid_functions.contains(name)) return {NameClass::Input, 0, {}};
  if (name.size() > 2 && name[0] == 'D' && name[1] >= '1' && name[1] <= '3') {
    std::string source = name.substr(2);
    if (outputs.contains(source)) {
      throw Error(ErrorCode::Kernel, "'" + name + "' differentiates '" + source +
                                         "', which is computed in the same kernel");
    }
    if (grid_functions.contains(source)) return {NameClass::Derivative, name[1] - '0', source};
  }
  if (parameters.contains(name)) return {NameClass::Parameter, 0, {}};
  throw Error(ErrorCode::Kernel, "undeclared name '" + name + "' in the equation for '" + where + "'");
}

void check_identifiers(const KernelIR& k) {
  std::map<std::string, std::string> seen;
  auto claim = [&](const std::string& id, const std::string& what) {
    if (reserved_names().contains(id)) {
      throw Error(ErrorCode::Kernel, what + " '" + id + "' collides with a reserved identifier");
    }
    auto [it, fresh] = seen.emplace(id, what);
    if (!fresh) {
      throw Error(ErrorCode::Kernel, "identifier collision: " + what + " '" + id + "' and " + it->second);
    }
  };
  for (const auto& n : k.inputs) {
    claim(n, "input");
    claim(n + "L", "local copy");
  }
  for (const auto& n : k.outputs) {
    claim(n, "output");
    claim(n + "L", "local copy");
  }
  for (const auto& d : k.derivatives) claim(d.name, "derivative");
  for (const auto& p : k.parameters) claim(p, "parameter");
}

std::string coefficient_text(const Rational& c) {
  if (c.denominator() == 1) return std::to_string(c.numerator());
  return "(" + std::to_string(c.numerator()) + ".0/" + std::to_string(c.denominator()) + ".0)";
}

std::string c_expr(const ScalarExpr& e, const std::set<std::string>& with_copy) {
  if (e.terms.empty()) return "0";
  std::string out;
  for (std::size_t t = 0; t < e.terms.size(); ++t) {
    const Monomial& m = e.terms[t];
    Rational c = m.coefficient;
    if (c < 0) {
      out += t == 0 ? "-" : " - ";
      c = -c;
    } else if (t > 0) {
      out += " + ";
    }
    std::vector<std::string> factors;
    if (c != 1 || m.powers.empty()) factors.push_back(coefficient_text(c));
    for (const auto& [name, power] : m.powers) {
      const std::string id = with_copy.contains(name) ? name + "L" : name;
      if (power > 0) {
        for (int p = 0; p < power; ++p) factors.push_back(id);
      } else {
        factors.push_back("pow(" + id + "," + std::to_string(power) + ")");
      }
    }
    for (std::size_t f = 0; f < factors.size(); ++f) {
      if (f) out += "*";
      out += factors[f];
    }
  }
  return out;
}

}  // namespace

KernelIR build_kernel(std::string name, const std::vector<ComponentEquation>& equations,
                      const std::set<std::string>& grid_functions,
                      const std::set<std::string>& parameters, StencilConfig stencil) {
  stencil.validate();
  KernelIR k;
  k.name = std::move(name);
  k.stencil = stencil;
  std::set<std::string> outputs;
  for (const auto& eq : equations) {
    if (!outputs.insert(eq.lhs_name).second) {
      throw Error(ErrorCode::Kernel, "'" + eq.lhs_name + "' is assigned twice in kernel '" + k.name + "'");
    }
  }
  std::set<std::string> inputs, params;
  std::map<std::pair<std::string, int>, std::string> derivs;
  std::map<std::string, std::set<std::string>> deps;
  for (const auto& eq : equations) {
    auto& d = deps[eq.lhs_name];
    for (const auto& n : eq.rhs.names()) {
      auto c = classify(n, outputs, grid_functions, parameters, eq.lhs_name);
      switch (c.cls) {
        case NameClass::Output: d.insert(n); break;
        case NameClass::Input: inputs.insert(n); break;
        case NameClass::Parameter: params.insert(n); break;
        case NameClass::Derivative:
          derivs[{c.source, c.direction}] = n;
          inputs.insert(c.source);
          break;
      }
    }
  }
  // Kahn's algorithm, always taking the earliest ready equation.
  std::vector<bool> placed(equations.size(), false);
  std::set<std::string> done;
  while (k.locals.size() < equations.size()) {
    bool progress = false;
    for (std::size_t e = 0; e < equations.size(); ++e) {
      if (placed[e]) continue;
      const auto& d = deps[equations[e].lhs_name];
      if (std::all_of(d.begin(), d.end(), [&](const std::string& x) { return done.contains(x); })) {
        placed[e] = true;
        done.insert(equations[e].lhs_name);
        k.locals.push_back({equations[e].lhs_name, equations[e].rhs});
        progress = true;
        break;
      }
    }
    if (!progress) {
      std::string cycle;
      for (std::size_t e = 0; e < equations.size(); ++e) {
        if (!placed[e]) cycle += (cycle.empty() ? "" : ", ") + equations[e].lhs_name;
      }
      throw Error(ErrorCode::Kernel, "cycle among locals of kernel '" + k.name + "': " + cycle);
    }
  }
  for (const auto& eq : equations) k.outputs.push_back(eq.lhs_name);
  k.inputs.assign(inputs.begin(), inputs.end());
  k.parameters.assign(params.begin(), params.end());
  for (const auto& [key, n] : derivs) k.derivatives.push_back({n, key.second, key.first});
  check_identifiers(k);
  return k;
}

std::string emit_c(const KernelIR& k, const std::string& function_name) {
  std::set<std::string> with_copy(k.inputs.begin(), k.inputs.end());
  with_copy.insert(k.outputs.begin(), k.outputs.end());
  std::ostringstream o;
  o << "/*  File produced by tensorc */\n"
    << "/*  Kernel: " << k.name << " */\n"
    << "/*  nx, ny, nz are stored extents including " << k.stencil.ghost_width
    << " ghost point(s) per side */\n\n"
    << "#include <math.h>\n\n"
    << "/* Define macros used in calculations */\n"
    << "#define INITVALUE (42)\n"
    << "#define GFINDEX3D(i,j,k) ((i) + nx * ((j) + ny * (k)))\n"
    << "#define D1gf(gf,i,j,k) (((gf)[GFINDEX3D((i)+1,(j),(k))] - (gf)[GFINDEX3D((i)-1,(j),(k))]) * hdxi)\n"
    << "#define D2gf(gf,i,j,k) (((gf)[GFINDEX3D((i),(j)+1,(k))] - (gf)[GFINDEX3D((i),(j)-1,(k))]) * hdyi)\n"
    << "#define D3gf(gf,i,j,k) (((gf)[GFINDEX3D((i),(j),(k)+1)] - (gf)[GFINDEX3D((i),(j),(k)-1)]) * hdzi)\n\n";
  o << "void " << function_name << "(const int nx, const int ny, const int nz, const int ghost,\n"
    << "    const double dx, const double dy, const double dz";
  for (const auto& p : k.parameters) o << ",\n    const double " << p;
  for (const auto& n : k.inputs) o << ",\n    const double *restrict " << n;
  for (const auto& n : k.outputs) o << ",\n    double *restrict " << n;
  o << ")\n{\n";
  o << "  /* Declare the variables used for looping over grid points */\n"
    << "  int i = INITVALUE, j = INITVALUE, k = INITVALUE;\n"
    << "  int istart = INITVALUE, jstart = INITVALUE, kstart = INITVALUE;\n"
    << "  int iend = INITVALUE, jend = INITVALUE, kend = INITVALUE;\n"
    << "  int index = INITVALUE;\n\n"
    << "  /* Declare finite differencing variables */\n"
    << "  double dxi = INITVALUE, dyi = INITVALUE, dzi = INITVALUE;\n"
    << "  double hdxi = INITVALUE, hdyi = INITVALUE, hdzi = INITVALUE;\n\n"
    << "  /* Declare shorthands */\n";
  for (const auto& d : k.derivatives) o << "  double " << d.name << " = INITVALUE;\n";
  o << "\n  /* Declare local copies of grid functions */\n";
  for (const auto& n : k.inputs) o << "  double " << n << "L = INITVALUE;\n";
  for (const auto& n : k.outputs) o << "  double " << n << "L = INITVALUE;\n";
  o << "\n  /* Initialize finite differencing variables */\n"
    << "  dxi = 1 / dx;\n"
    << "  dyi = 1 / dy;\n"
    << "  dzi = 1 / dz;\n"
    << "  hdxi = 0.5 * dxi;\n"
    << "  hdyi = 0.5 * dyi;\n"
    << "  hdzi = 0.5 * dzi;\n\n"
    << "  /* Set up variables used in the grid loop for the physical grid points */\n"
    << "  /* with stencils suitable for finite differencing */\n"
    << "  istart = ghost;\n"
    << "  jstart = ghost;\n"
    << "  kstart = ghost;\n"
    << "  iend = nx - ghost;\n"
    << "  jend = ny - ghost;\n"
    << "  kend = nz - ghost;\n\n"
    << "  /* Loop over the grid points */\n"
    << "  for (k = kstart; k < kend; k++)\n"
    << "  {\n"
    << "    for (j = jstart; j < jend; j++)\n"
    << "    {\n"
    << "      for (i = istart; i < iend; i++)\n"
    << "      {\n"
    << "        index = GFINDEX3D(i,j,k);\n\n"
    << "        /* Assign local copies of grid functions */\n";
  for (const auto& n : k.inputs) o << "        " << n << "L = " << n << "[index];\n";
  o << "\n        /* Precompute derivatives */\n";
  for (const auto& d : k.derivatives) {
    o << "        " << d.name << " = D" << d.direction << "gf(" << d.source << ", i, j, k);\n";
  }
  o << "\n        /* Calculate grid functions */\n";
  for (const auto& l : k.locals) o << "        " << l.output << "L = " << c_expr(l.expr, with_copy) << ";\n";
  o << "\n        /* Copy local copies back to grid functions */\n";
  for (const auto& n : k.outputs) o << "        " << n << "[index] = " << n << "L;\n";
  o << "      }\n"
    << "    }\n"
    << "  }\n"
    << "}\n";
  return o.str();
}

nlohmann::json to_json(const KernelIR& k) {
  nlohmann::json j;
  j["name"] = k.name;
  j["stencil"] = {{"fd_order", k.stencil.fd_order}, {"ghost_width", k.stencil.ghost_width}};
  j["inputs"] = k.inputs;
  j["outputs"] = k.outputs;
  j["parameters"] = k.parameters;
  j["derivatives"] = nlohmann::json::array();
  for (const auto& d : k.derivatives) {
    j["derivatives"].push_back({{"name", d.name}, {"direction", d.direction}, {"source", d.source}});
  }
  j["locals"] = nlohmann::json::array();
  for (const auto& l : k.locals) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& m : l.expr.terms) {
      nlohmann::json factors = nlohmann::json::array();
      for (const auto& [n, p] : m.powers) factors.push_back({n, p});
      terms.push_back({{"coefficient", to_string(m.coefficient)}, {"factors", factors}});
    }
    j["locals"].push_back({{"output", l.output}, {"terms", terms}});
  }
  return j;
}

KernelIR kernel_from_json(const nlohmann::json& j) {
  try {
    KernelIR k;
    k.name = j.at("name").get<std::string>();
    k.stencil.fd_order = j.at("stencil").at("fd_order").get<int>();
    k.stencil.ghost_width = j.at("stencil").at("ghost_width").get<int>();
    k.stencil.validate();
    k.inputs = j.at("inputs").get<std::vector<std::string>>();
    k.outputs = j.at("outputs").get<std::vector<std::string>>();
    k.parameters = j.at("parameters").get<std::vector<std::string>>();
    for (const auto& d : j.at("derivatives")) {
      k.derivatives.push_back(
          {d.at("name").get<std::string>(), d.at("direction").get<int>(), d.at("source").get<std::string>()});
    }
    for (const auto& l : j.at("locals")) {
      LocalDef def{l.at("output").get<std::string>(), {}};
      for (const auto& t : l.at("terms")) {
        Monomial m{parse_rational(t.at("coefficient").get<std::string>()), {}};
        for (const auto& f : t.at("factors")) m.powers.emplace_back(f.at(0).get<std::string>(), f.at(1).get<int>());
        def.expr.terms.push_back(std::move(m));
      }
      k.locals.push_back(std::move(def));
    }
    check_identifiers(k);
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Kernel, std::string("malformed kernel IR: ") + e.what());
  }
}

}  // namespace tensorc
