#include "catch_amalgamated.hpp"

#include <sstream>

#include "tdelay/errors.hpp"
#include "tdelay/verify.hpp"

using namespace tdelay;

TEST_CASE("suite names") {
  for (const char* s : {"core", "tails", "charfunc", "all"}) CHECK(known_suite(s));
  CHECK_FALSE(known_suite("quick"));
  CHECK_THROWS_AS(run_suite("quick", {}), DomainError);
  CHECK_THROWS_AS(run_criterion(0, {}), DomainError);
  CHECK_THROWS_AS(run_criterion(kCriteria + 1, {}), DomainError);
  for (int id = 1; id <= kCriteria; ++id) CHECK_FALSE(criterion_title(id).empty());
}

TEST_CASE("closed-form identities criterion") {
  std::ostringstream log;
  VerifyOptions opt;
  opt.log = &log;
  const auto records = run_criterion(11, opt);
  REQUIRE_FALSE(records.empty());
  for (const CheckRecord& r : records) {
    INFO(r.name << " observed " << r.observed << " expected " << r.expected);
    CHECK(r.pass);
    CHECK(r.criterion == 11);
  }
  CHECK_FALSE(log.str().empty());
}

TEST_CASE("report JSON round trip") {
  VerificationReport rep;
  rep.suite = "core";
  rep.seed = 9;
  rep.runtime_seconds = 1.5;
  CHECK(rep.pass());
  CheckRecord a;
  a.criterion = 2;
  a.name = "var wigner";
  a.parameters = {{"N", 2}};
  a.expected = 1.0 / 6;
  a.observed = 0.17;
  a.std_error = 0.01;
  a.tolerance = 0.05;
  a.pass = true;
  rep.records.push_back(a);
  CHECK(rep.pass());
  a.pass = false;
  rep.records.push_back(a);
  CHECK_FALSE(rep.pass());

  const nlohmann::json j = nlohmann::json::parse(rep.to_json().dump());
  CHECK(j.at("suite") == "core");
  CHECK(j.at("seed") == 9);
  CHECK(j.at("pass") == false);
  REQUIRE(j.at("records").size() == 2);
  CHECK(j.at("records")[0].at("expected").get<double>() == a.expected);
  CHECK(j.at("records")[0].at("parameters").at("N") == 2);
  CHECK(j.at("records")[1].at("pass") == false);
}
