#include <stdexcept>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "curvflow/io.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace curvflow;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t count_fields(const std::string& row) {
  return static_cast<std::size_t>(std::count(row.begin(), row.end(), ',')) + 1;
}

}  // namespace

TEST_CASE("format_double reads back exactly") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.8, 5e-324}) {
    const auto s = io::format_double(x);
    const double y = std::strtod(s.c_str(), nullptr);
    CHECK(std::memcmp(&x, &y, sizeof x) == 0);
  }
  CHECK(io::format_double(0.8) == "0.8");
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto p = RadialProfile::perturbed(3, 65, 0.7, 0.0317, 3);
  const auto text = io::checkpoint_json(p, 2, 1.0 / 7.0, 42);
  const auto j = json::parse(text);
  CHECK(j.at("n") == 3);
  CHECK(j.at("k") == 2);
  CHECK(j.at("seed") == 42);
  const auto c = io::parse_checkpoint(text);
  CHECK(c.k == 2);
  CHECK(c.seed == 42);
  CHECK(c.t == 1.0 / 7.0);
  REQUIRE(c.profile.size() == p.size());
  CHECK(c.profile.n() == 3);
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(c.profile.rho()[i] == p.rho()[i]);
    CHECK(c.profile.theta()[i] == p.theta()[i]);
  }
}

TEST_CASE("malformed checkpoints") {
  CHECK_THROWS_AS(io::parse_checkpoint("{"), io::FormatError);
  CHECK_THROWS_AS(io::parse_checkpoint(R"({"n":2,"k":1,"t":0})"), io::FormatError);
  CHECK_THROWS(io::parse_checkpoint(R"({"n":2,"k":1,"t":0,"theta":[0,1,2],"rho":[0.5,0.5]})"));
}

TEST_CASE("trace CSV schema") {
  flow::FlowConfig c;
  c.N = 33;
  c.tMax = 0.1;
  c.seed = 9;
  const auto r = flow::run(c);
  const auto ls = lines(io::trace_csv(c, r.trace));
  REQUIRE(ls.size() == r.trace.records.size() + 2);
  CHECK(ls[0].rfind("# seed=9 ", 0) == 0);
  CHECK(ls[1] ==
        "t,A_-1,A_0,A_1,A_2,minU,minRho,maxRho,minF,maxF,minLambda,maxLambda,maxSpeed,violationFlags");
  for (std::size_t i = 2; i < ls.size(); ++i) CHECK(count_fields(ls[i]) == 14);
  CHECK(ls[2].rfind("0,", 0) == 0);
}

TEST_CASE("dual trace CSV schema") {
  flow::FlowConfig c;
  c.N = 33;
  c.tMax = 0.1;
  const auto d = dual::dual_run(c);
  const auto ls = lines(io::dual_trace_csv(c, d.trace));
  REQUIRE(ls.size() >= 3);
  CHECK(ls[1].ends_with(",violationFlags,minEigW,maxEigW,breakdownTime"));
  CHECK(ls[2].ends_with(","));
}

TEST_CASE("audit JSON") {
  const auto p = RadialProfile::perturbed(2, 129, 0.8, 0.05, 2);
  const auto q = quermass::quermass_vector(hypersurface::geometry(p, 1), p);
  const auto j = json::parse(io::audit_json(quermass::audit_inequalities(q, 1), 2, 5));
  CHECK(j.at("seed") == 5);
  const auto& e = j.at("entries");
  REQUIRE(e.size() == 3);
  for (const auto& x : e) {
    CHECK(x.contains("l"));
    CHECK(x.contains("k"));
    CHECK(x.contains("A_l"));
    CHECK(x.at("xi_value").is_number());
    CHECK(x.at("gap").get<double>() ==
          doctest::Approx(x.at("xi_value").get<double>() - x.at("A_l").get<double>()));
  }
}

TEST_CASE("config JSON") {
  auto c = io::config_from_json(R"({"n":3,"k":2,"N":128,"dtPolicy":{"cflFactor":0.4},
      "initialShape":{"kind":"perturbed","r":0.7,"eps":0.02,"mode":4}})");
  CHECK(c.n == 3);
  CHECK(c.k == 2);
  CHECK(c.N == 128);
  CHECK(c.dtPolicy.cflFactor == 0.4);
  CHECK(c.dtPolicy.dtMax == flow::DtPolicy{}.dtMax);
  CHECK(c.initialShape.mode == 4);

  io::apply_config_json(c, R"({"initialShape":"sphere:0.5","seed":11})");
  CHECK(c.initialShape.kind == flow::InitialShape::Kind::geodesicSphere);
  CHECK(c.initialShape.r == 0.5);
  CHECK(c.seed == 11);
  CHECK(c.n == 3);

  const auto again = io::config_from_json(io::config_to_json(c));
  CHECK(io::config_to_json(again) == io::config_to_json(c));

  CHECK_THROWS_AS(io::config_from_json(R"({"nn":3})"), io::FormatError);
  CHECK_THROWS_AS(io::config_from_json(R"({"dtPolicy":{"cfl":1}})"), io::FormatError);
  CHECK_THROWS_AS(io::config_from_json(R"({"n":"two"})"), io::FormatError);
  CHECK_THROWS_AS(io::config_from_json("[1,2"), io::FormatError);
}
