#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tensorc/driver.hpp"
#include "tensorc/system.hpp"

using namespace tensorc;
namespace fs = std::filesystem;

namespace {

const std::string kSystems = TENSORC_SYSTEMS;
const std::string kTool = TENSORC_TOOL;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(TENSORC_SCRATCH) / "cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome tool(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::path(TENSORC_SCRATCH) / "cli" / "io";
  fs::create_directories(dir);
  const fs::path o = dir / ("out" + std::to_string(counter));
  const fs::path e = dir / ("err" + std::to_string(counter++));
  const int status = std::system((kTool + " " + args + " > " + o.string() + " 2> " + e.string()).c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(o), slurp(e)};
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("expand prints the Maxwell component equations") {
  const Outcome r = tool("expand " + kSystems + "/maxwell.tsys");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "# evolution\n"
        "E1rhs = D2B3 - D3B2\n"
        "E2rhs = -D1B3 + D3B1\n"
        "E3rhs = D1B2 - D2B1\n"
        "B1rhs = -D2E3 + D3E2\n"
        "B2rhs = D1E3 - D3E1\n"
        "B3rhs = -D1E2 + D2E1\n"
        "# constraints\n"
        "divE = D1E1 + D2E2 + D3E3\n"
        "divB = D1B1 + D2B2 + D3B3\n");
}

TEST_CASE("decompose gives the 3+1 Maxwell split") {
  const Outcome r = tool("decompose " + kSystems + "/maxwell.tsys");
  CHECK(r.code == 0);
  // Gauss and divergence laws from the normal parts; Ampere and Faraday
  // from the tangential parts, with n^b d_b the time derivative.
  CHECK(r.out.find("ampere_gauss[a:normal]: -OD(E[u_a], l_a) = 0\n") != std::string::npos);
  CHECK(r.out.find("ampere_gauss[a:tangential]: eps[u_a,u_b,u_c]*OD(B[l_c], l_b) - n[u_b]*OD(E[u_a], l_b) = 0\n") !=
        std::string::npos);
  CHECK(r.out.find("faraday_divb[a:normal]: -OD(B[u_a], l_a) = 0\n") != std::string::npos);
  CHECK(r.out.find("faraday_divb[a:tangential]: -eps[u_a,u_b,u_c]*OD(E[l_c], l_b) - n[u_b]*OD(B[u_a], l_b) = 0\n") !=
        std::string::npos);
  CHECK(count_lines(r.out) == 4);
}

TEST_CASE("decompose without rules echoes the canonical form") {
  const fs::path d = scratch("norules");
  spit(d / "s.tsys",
       "[tensors]\nn[spacetime] timelike\nh[spacetime, spacetime] sym(1,2)\nalpha\nbeta\n"
       "[decompose]\nnormal = n\nprojector = h\nscalar: beta * alpha + alpha * beta\n");
  const Outcome r = tool("decompose " + (d / "s.tsys").string());
  CHECK(r.code == 0);
  CHECK(r.out == "scalar[scalar]: 2*alpha*beta = 0\n");
}

TEST_CASE("decompose of the frame example has the structural terms") {
  const Outcome r = tool("decompose " + kSystems + "/weyl_frame.tsys");
  CHECK(r.code == 0);
  CHECK(r.out.find("e0[u_a]*OD(E[") != std::string::npos);
  CHECK(r.out.find("Gamma[") != std::string::npos);
  CHECK(r.out.find("Gamma0[") != std::string::npos);
}

TEST_CASE("a symmetric tensor expands in the listed order") {
  const fs::path d = scratch("symdemo");
  spit(d / "s.tsys",
       "[tensors]\nS[spatial, spatial] sym(1,2) spatial\nkappa\n[evolution]\nS[l_i, l_j] = kappa * S[l_j, l_i]\n");
  const Outcome r = tool("expand " + (d / "s.tsys").string());
  CHECK(r.code == 0);
  CHECK(r.out ==
        "# evolution\nS11rhs = S11*kappa\nS21rhs = S21*kappa\nS22rhs = S22*kappa\nS31rhs = S31*kappa\nS32rhs = "
        "S32*kappa\nS33rhs = S33*kappa\n");
}

TEST_CASE("an empty system produces no output") {
  const fs::path d = scratch("empty");
  spit(d / "empty.tsys", "# nothing here\n");
  for (const char* cmd : {"expand", "decompose"}) {
    const Outcome r = tool(std::string(cmd) + " " + (d / "empty.tsys").string());
    CHECK(r.code == 0);
    CHECK(r.out.empty());
  }
}

TEST_CASE("generate writes kernels and a manifest deterministically") {
  const fs::path a = scratch("gen_a"), b = scratch("gen_b");
  const Outcome ra = tool("generate " + kSystems + "/maxwell.tsys --out " + a.string());
  const Outcome rb = tool("generate " + kSystems + "/maxwell.tsys --out " + b.string());
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  std::set<std::string> files;
  for (const auto& e : fs::directory_iterator(a)) files.insert(e.path().filename().string());
  CHECK(files == std::set<std::string>{"maxwell_constraints.c", "maxwell_constraints.ir.json", "maxwell_manifest.json",
                                       "maxwell_rhs.c", "maxwell_rhs.ir.json"});
  for (const auto& f : files) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto manifest = nlohmann::json::parse(slurp(a / "maxwell_manifest.json"));
  CHECK(manifest["system"] == "maxwell");
  CHECK(manifest["kernels"].size() == 2);
  CHECK(manifest["kernels"][0]["role"] == "rhs");
  CHECK(manifest["evolved"].size() == 6);
  const auto gfs = manifest["grid_functions"].get<std::vector<std::string>>();
  CHECK(std::find(gfs.begin(), gfs.end(), "divE") != gfs.end());
  CHECK(std::find(gfs.begin(), gfs.end(), "B3rhs") != gfs.end());
  CHECK(count_lines(ra.out) == 5);
}

TEST_CASE("generate reports an unwritable directory") {
  const fs::path d = scratch("blocked");
  spit(d / "file", "x");
  const Outcome r = tool("generate " + kSystems + "/maxwell.tsys --out " + (d / "file" / "sub").string());
  CHECK(r.code == 1);
  CHECK(r.err.rfind("error[io]: ", 0) == 0);
  CHECK(count_lines(r.err) == 1);
}

TEST_CASE("running generated IR matches the in-process pipeline") {
  const auto def = load_system(kSystems + "/maxwell.tsys");
  RunParams p = load_params(kSystems + "/maxwell.params", def.param_names());
  p.t_final = 0.25;
  const fs::path ir = scratch("ir");
  (void)cmd_generate(def, ir.string());
  const RunOutcome direct = run_system(def, p);
  const RunOutcome loaded = run_system(def, p, ir.string());
  REQUIRE(direct.result.norms.size() == loaded.result.norms.size());
  double worst = 0;
  for (std::size_t k = 0; k < direct.result.norms.size(); ++k) {
    CHECK(direct.result.norms[k].name == loaded.result.norms[k].name);
    worst = std::max(worst, std::abs(direct.result.norms[k].l2 - loaded.result.norms[k].l2));
    worst = std::max(worst, std::abs(direct.result.norms[k].linf - loaded.result.norms[k].linf));
  }
  CHECK(worst <= 1e-14);

  // Same through the command line.
  const fs::path pf = scratch("ir_params") / "short.params";
  std::string text = slurp(kSystems + "/maxwell.params");
  const auto at = text.find("t_final");
  REQUIRE(at != std::string::npos);
  text.replace(at, text.find('\n', at) - at, "t_final = 0.25");
  spit(pf, text);
  const Outcome a = tool("run " + kSystems + "/maxwell.tsys --params " + pf.string());
  const Outcome b = tool("run " + kSystems + "/maxwell.tsys --params " + pf.string() + " --ir " + ir.string());
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("run writes a norms CSV and snapshots") {
  const fs::path out = scratch("run");
  const Outcome r = tool("run " + kSystems + "/maxwell.tsys --params " + kSystems + "/maxwell.params --out " +
                         out.string());
  REQUIRE(r.code == 0);
  std::istringstream csv(slurp(out / "maxwell_norms.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "step,time,name,l2,linf");
  int last = 0, rows = 0;
  bool finite = true;
  while (std::getline(csv, line)) {
    std::istringstream fields(line);
    std::string step, time, name, l2, linf;
    std::getline(fields, step, ',');
    std::getline(fields, time, ',');
    std::getline(fields, name, ',');
    std::getline(fields, l2, ',');
    std::getline(fields, linf, ',');
    CHECK(std::stoi(step) >= last);
    last = std::stoi(step);
    finite = finite && std::isfinite(std::stod(l2)) && std::isfinite(std::stod(linf));
    ++rows;
  }
  CHECK(finite);
  CHECK(rows > 2);
  CHECK(last == 128);
  const std::string snap = slurp(out / "E2.bin");
  REQUIRE(snap.size() == 12 + 32 * 2 * 2 * 8);
  std::uint32_t ext[3];
  std::memcpy(ext, snap.data(), 12);
  CHECK(ext[0] == 32);
  CHECK(ext[1] == 2);
  CHECK(ext[2] == 2);
}

TEST_CASE("parameter and usage errors") {
  const Outcome bad = tool("run " + kSystems + "/maxwell.tsys --params " + std::string(TENSORC_SYSTEMS) +
                           "/../tests/data/bad_key.params");
  CHECK(bad.code == 1);
  CHECK(bad.err.rfind("error[param]: ", 0) == 0);
  CHECK(bad.err.find("resolution") != std::string::npos);
  CHECK(count_lines(bad.err) == 1);

  const Outcome single = tool("converge " + kSystems + "/maxwell.tsys --params " + kSystems +
                              "/maxwell.params --resolutions 32");
  CHECK(single.code == 2);
  CHECK(single.out.empty());
  CHECK(single.err.find("at least 2") != std::string::npos);

  CHECK(tool("frobnicate").code == 2);
  CHECK(tool("run " + kSystems + "/maxwell.tsys").code == 2);
  const Outcome missing = tool("expand " + kSystems + "/nope.tsys");
  CHECK(missing.code == 1);
  CHECK(missing.err.rfind("error[", 0) == 0);
}

TEST_CASE("system file errors carry line numbers") {
  const fs::path d = scratch("badsys");
  spit(d / "a.tsys", "[tensors]\nv[spatial]\n[evolution]\nv[l_i] = w[l_i]\n");
  const Outcome r = tool("expand " + (d / "a.tsys").string());
  CHECK(r.code == 1);
  CHECK(r.err.find("line 4") != std::string::npos);
  spit(d / "b.tsys", "[tensors]\nv[spatial]\n[evolution]\nv[l_i] = v[l_i]\nv[l_j] = 2 * v[l_j]\n");
  CHECK(tool("expand " + (d / "b.tsys").string()).code == 1);
  spit(d / "c.tsys", "[bogus]\n");
  CHECK(tool("expand " + (d / "c.tsys").string()).code == 1);
}

TEST_CASE("converge on a static system is exact") {
  const Outcome r = tool("converge " + kSystems + "/static.tsys --params " + kSystems +
                         "/static.params --resolutions 4,8,16");
  CHECK(r.code == 0);
  CHECK(r.out == "resolution,linf_error,order\n4,0,-\n8,0,exact\n16,0,exact\n");
}

TEST_CASE("converge on Maxwell is second order") {
  const auto def = load_system(kSystems + "/maxwell.tsys");
  const RunParams p = load_params(kSystems + "/maxwell.params", def.param_names());
  const auto rows = converge(def, p, {16, 32, 64});
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 1; k < 3; ++k) {
    const double order = std::stod(rows[k].order);
    CHECK(order == doctest::Approx(2.0).epsilon(0.15));
    CHECK(std::abs(order - std::log2(rows[k - 1].error / rows[k].error)) < 1e-3);
  }
}
