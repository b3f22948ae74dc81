// Runs acceptance criteria 1-11 and prints one PASS/FAIL line per criterion.
// Failing observations and harness notes follow each line, indented.
// Usage: acceptance [--verbose] [criterion numbers...]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "reflectcost/checks.hpp"

using namespace reflectcost;

namespace {

struct Criterion {
  int id;
  std::string title;
  std::function<std::vector<CheckReport>()> run;
};

std::vector<Criterion> criteria() {
  constexpr double pi = std::numbers::pi;
  return {
      {1, "closed form vs survival Monte Carlo", [] { return std::vector{check_closed_vs_mc()}; }},
      {2, "series vs survival and mixture Monte Carlo (K=1, N=2)", [] { return std::vector{check_series_vs_mc()}; }},
      {3, "hyperbolic dual representation (K=-1, N=3)", [] { return std::vector{check_hyperbolic_dual()}; }},
      {4, "sphere total variation vs phi", [] { return std::vector{check_tv_compare()}; }},
      {5, "constancy statistic",
       [] {
         ConstancyOptions flat, round;
         round.K = 1.0;
         round.N = 2.0;
         return std::vector{check_constancy(flat), check_constancy(round)};
       }},
      {6, "monotonicity of heat-flow transport costs",
       [] {
         MonotonicityOptions phi_sphere, theta_sphere, theta_plane;
         theta_sphere.cost = MonotonicityCost::theta;
         theta_plane.cost = MonotonicityCost::theta;
         theta_plane.space = MonotonicitySpace::plane;
         theta_plane.K = -1.0;
         theta_plane.N = 3.0;
         return std::vector{check_monotonicity(phi_sphere), check_monotonicity(theta_sphere),
                            check_monotonicity(theta_plane)};
       }},
      {7, "transport solver exactness", [] { return std::vector{check_ot_exactness()}; }},
      {8, "property suite for phi",
       [] {
         std::vector<CheckReport> out;
         for (double K : {-1.0, 0.0, 1.0})
           for (double N : {2.0, 5.0, kInf}) {
             CostPropertiesOptions o;
             o.K = K;
             o.N = N;
             o.t = {0.25, 0.5, 1.0, 2.0};
             out.push_back(check_cost_properties(o));
           }
         out.push_back(check_ordering());
         out.push_back(check_short_time());
         return out;
       }},
      {9, "coupled-walk distance law",
       [=] {
         CoupledWalkOptions plane, sphere;
         sphere.space = SpaceKind::sphere;
         sphere.a = pi / 2;
         return std::vector{check_coupled_walk(plane), check_coupled_walk(sphere)};
       }},
      {10, "gradient estimate on the sphere", [] { return std::vector{check_gradient()}; }},
      {11, "long-time asymptotics", [] { return std::vector{check_asymptotics()}; }},
  };
}

}  // namespace

int main(int argc, char** argv) {
  bool verbose = false;
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--verbose") == 0)
      verbose = true;
    else
      only.insert(std::atoi(argv[i]));
  }

  int failed = 0;
  for (const Criterion& c : criteria()) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    std::vector<CheckReport> reports;
    try {
      reports = c.run();
    } catch (const std::exception& e) {
      CheckReport r;
      r.name = "aborted";
      r.fail(std::string("exception: ") + e.what());
      reports.push_back(r);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = true;
    for (const auto& r : reports) pass = pass && r.pass;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %s  %s (%.1f s)\n", c.id, pass ? "PASS" : "FAIL", c.title.c_str(), secs);
    for (const auto& r : reports) {
      for (const auto& ob : r.observed)
        if (verbose || !ob.pass)
          std::printf("    %s %s: %.6g (tolerance %.6g)\n", ob.pass ? "ok  " : "FAIL", ob.label.c_str(), ob.value,
                      ob.tolerance);
      for (const auto& n : r.notes) std::printf("    note [%s]: %s\n", r.name.c_str(), n.c_str());
    }
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
