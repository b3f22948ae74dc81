#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + REFLECTCOST_CLI_PATH + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Data rows of a CSV result: first line is metadata, second the header.
std::vector<std::vector<std::string>> rows(const std::string& out) {
  const auto ls = lines(out);
  REQUIRE(ls.size() >= 2);
  CHECK(ls[0].rfind("# reflectcost", 0) == 0);
  std::vector<std::vector<std::string>> r;
  for (std::size_t i = 2; i < ls.size(); ++i) r.push_back(fields(ls[i]));
  return r;
}

fs::path scratch() {
  const fs::path d = fs::temp_directory_path() / ("reflectcost_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("phi: documented values") {
  auto r = run("phi --K 0 --N inf --t 1 --a 0");
  CHECK(r.code == 0);
  CHECK(lines(r.out)[1] == "t,a,value,method,error_bound");
  CHECK(std::stod(rows(r.out)[0][2]) == 0.0);

  r = run("phi --K 0 --N inf --t 1 --a 2.8284271");
  CHECK(r.code == 0);
  // chi(2.8284271 / (2 sqrt 2)) with chi(r) = erf(r / sqrt 2)
  CHECK(std::stod(rows(r.out)[0][2]) == doctest::Approx(std::erf(2.8284271 / 4.0)).epsilon(1e-12));
  CHECK(std::stod(rows(r.out)[0][2]) == doctest::Approx(0.68269).epsilon(1e-5));
}

TEST_CASE("phi: a-grid on the sphere is 32 nondecreasing rows") {
  const auto r = run("phi --K 1 --N 2 --t 0.5 --a-grid 0:3.14159:0.1");
  CHECK(r.code == 0);
  const auto rs = rows(r.out);
  REQUIRE(rs.size() == 32);
  for (std::size_t i = 1; i < rs.size(); ++i) CHECK(std::stod(rs[i][2]) >= std::stod(rs[i - 1][2]));
  CHECK(rs[5][3] == "series");
}

TEST_CASE("exit codes") {
  CHECK(run("phi --K 0 --N 1 --t 1 --a 1").code == 2);
  CHECK(run("phi --K 0 --N inf --t 1").code == 2);
  CHECK(run("phi --K 0 --N inf --t 1 --a 1 --bogus 3").code == 2);
  CHECK(run("nonsense").code == 2);
  CHECK(run("phi --K 1 --N 2 --t 1 --a 4").code == 2);
  CHECK(run("phi --K 1 --N 2 --t 0.001 --a 1 --method series").code == 3);
  CHECK(run("check no-such-check").code == 2);
  // the literal short-time constant is half the derivative, so this check reports failure
  const auto r = run("check short-time --K 0 --N inf");
  CHECK(r.code == 1);
  CHECK(lines(r.out)[0].find("pass=false") != std::string::npos);
}

TEST_CASE("transport: Dirac, identical and oracle instances") {
  const fs::path d = scratch();
  write(d / "c.csv", "0,1,2\n1,0,1.5\n2,1.5,0\n");
  write(d / "a.csv", "index,weight\n0,1\n1,0\n2,0\n");
  write(d / "b.csv", "index,weight\n0,0\n1,0\n2,1\n");
  auto r = run("transport --cost " + (d / "c.csv").string() + " --mu " + (d / "a.csv").string() + " --nu " +
               (d / "b.csv").string());
  CHECK(r.code == 0);
  CHECK(lines(r.out)[0].find(" value=2 ") != std::string::npos);

  write(d / "m.csv", "index,weight\n0,0.2\n1,0.5\n2,0.3\n");
  r = run("transport --cost " + (d / "c.csv").string() + " --mu " + (d / "m.csv").string() + " --nu " +
          (d / "m.csv").string());
  CHECK(r.code == 0);
  CHECK(lines(r.out)[0].find(" value=0 ") != std::string::npos);

  // uniform 4 x 4 with a unique optimal permutation 0->1, 1->0, 2->3, 3->2: value (0.1+0.2+0.3+0.4)/4
  write(d / "c4.json", R"({"entries": [[9,0.1,9,9],[0.2,9,9,9],[9,9,9,0.3],[9,9,0.4,9]]})");
  write(d / "u4.json", R"({"weights": [0.25,0.25,0.25,0.25]})");
  r = run("transport --oracle --cost " + (d / "c4.json").string() + " --mu " + (d / "u4.json").string() + " --nu " +
          (d / "u4.json").string());
  CHECK(r.code == 0);
  const std::string meta = lines(r.out)[0];
  CHECK(meta.find(" value=0.25 ") != std::string::npos);
  CHECK(meta.find(" oracle=0.25 ") != std::string::npos);
  CHECK(meta.find(" oracle_diff=0") != std::string::npos);

  write(d / "bad.csv", "index,weight\n0,0.7\n1,0.7\n2,0\n");
  CHECK(run("transport --cost " + (d / "c.csv").string() + " --mu " + (d / "bad.csv").string() + " --nu " +
            (d / "m.csv").string())
            .code == 2);
  fs::remove_all(d);
}

TEST_CASE("checks from the command line") {
  auto r = run("check cost-properties --K -1 --N 3 --t 1 --paths 20000");
  CHECK(r.code == 0);
  bool concavity = false, subadditivity = false;
  for (const auto& row : rows(r.out)) {
    concavity = concavity || row[0].find("concavity") != std::string::npos;
    subadditivity = subadditivity || row[0].find("subadditivity") != std::string::npos;
    CHECK(row[3] == "true");
  }
  CHECK(concavity);
  CHECK(subadditivity);

  r = run("check tv-compare --t 0.5 --a 1.5707963");
  CHECK(r.code == 0);
  CHECK(std::stod(rows(r.out)[0][1]) <= 2e-3);

  r = run("check monotonicity --space sphere --t 1 --s-grid 0:1:0.1");
  CHECK(r.code == 0);
  CHECK(rows(r.out)[0][0].find("max increase") != std::string::npos);
}

TEST_CASE("output is deterministic and independent of the worker count") {
  const std::string args = "phi --K -1 --N 3 --t-grid 0.5:1:0.5 --a-grid 0.5:2:0.5 --paths 3000 --seed 17";
  const auto a = run(args, "REFLECTCOST_THREADS=1");
  const auto b = run(args, "REFLECTCOST_THREADS=3");
  const auto c = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out == c.out);
  const std::string one = "phi --K -1 --N 3 --t 0.5 --a 1 --paths 3000";
  CHECK(run(one + " --seed 18").out != run(one + " --seed 17").out);

  const auto walk1 = run("coupling-simulate --space sphere --a 1 --runs 50 --seed 4", "REFLECTCOST_THREADS=1");
  const auto walk2 = run("coupling-simulate --space sphere --a 1 --runs 50 --seed 4", "REFLECTCOST_THREADS=2");
  CHECK(walk1.out == walk2.out);
}

TEST_CASE("json mirrors csv") {
  const std::string args = "phi --K 1 --N 2 --t 0.5 --a-grid 0:3:0.5";
  const auto csv = run(args), js = run(args + " --format json");
  REQUIRE(js.code == 0);
  const auto j = nlohmann::json::parse(js.out);
  const auto rs = rows(csv.out);
  REQUIRE(j["rows"].size() == rs.size());
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(j["rows"][i]["a"].get<double>() == std::stod(rs[i][1]));
    CHECK(j["rows"][i]["value"].get<double>() == std::stod(rs[i][2]));
    CHECK(j["rows"][i]["method"].get<std::string>() == rs[i][3]);
  }
  CHECK(j["meta"]["N"] == "2");
  CHECK(j["header"][4] == "error_bound");
}

TEST_CASE("simulators emit plot-ready tables") {
  auto r = run("rho-simulate --K 0 --N inf --a 1 --t 0.5 --paths 200");
  CHECK(r.code == 0);
  CHECK(rows(r.out).size() == 200);
  CHECK(lines(r.out)[0].find("survival=") != std::string::npos);

  r = run("rho-simulate --K 0 --N inf --a 1 --t 0.1 --paths 3 --keep 2 --every 10");
  CHECK(r.code == 0);
  CHECK(lines(r.out)[1] == "path,time,rho");
  // default dt = 1e-3 min(t, 1): 1001 grid times, every tenth kept
  CHECK(rows(r.out).size() == 2 * 101);

  r = run("coupling-simulate --space euclidean --a 1 --alpha 0.05 --t 0.5");
  CHECK(r.code == 0);
  const auto tr = rows(r.out);
  CHECK(tr.size() == 201);
  CHECK(std::stod(tr.front()[1]) == 1.0);
  CHECK(std::stod(tr.back()[0]) == doctest::Approx(0.5));
}
