#include "rankone/io.hpp"

#include <catch2/catch.hpp>

#include <filesystem>

using namespace rankone;

namespace {

template <class F>
std::string schema_message(F&& fn) {
  try {
    fn();
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("round trips") {
  auto plan = plan_pair(generate_schedule(10, 100));
  const auto spec_json = to_json(plan.spec_s);
  CHECK(to_json(spec_from(Json::parse(spec_json.dump()))) == spec_json);
  auto sched = generate_schedule(3, 5000);
  CHECK(to_json(schedule_from(to_json(sched))) == to_json(sched));

  PolynomialSpec half;
  half.coefficients = {{0, make_rational(1, 2)}, {1, make_rational(1, 2)}};
  PairPolicy policy;
  policy.generic_cuts = {8, 64};
  policy.generic_polys = {PolynomialSpec::delta(0), half};
  CHECK(to_json(policy_from(to_json(policy))) == to_json(policy));

  for (const auto* cert : {&plan.cert_s, &plan.cert_t}) {
    const auto j = to_json(*cert);
    const auto back = certificate_from(Json::parse(j.dump(2)));
    CHECK(to_json(back) == j);
    CHECK(verify_certificate(cert == &plan.cert_s ? plan.spec_s : plan.spec_t, back).ok);
  }

  WalshPolynomial w;
  w.add({0, 3}, make_rational(-7, 12));
  w.add({5}, Rational{BigInt{"123456789012345678901234567890"}, 7});
  const auto back = walsh_from(Json::parse(to_json(w).dump()));
  CHECK(back == w);

  SimulationConfig c;
  c.seed = 18446744073709551615ULL;
  c.intensity = 0.25;
  CHECK(to_json(simulation_config_from(to_json(c))) == to_json(c));

  auto seq = autocorrelation_sequence(plan.spec_s, LevelFunction::indicator(1), 0, 40, 0);
  const auto table = to_table(seq);
  CHECK(to_table(parse_table(table)) == table);
}

TEST_CASE("schema diagnostics") {
  auto msg = schema_message([] { spec_from(Json::parse(R"({"stages":[{"cuts":2,"spacers":[0,"x"]}]})")); });
  CHECK(msg == "$.stages[0].spacers[1]: expected an integer");
  msg = schema_message([] { spec_from(Json::parse(R"({"stages":[{"spacers":[0]}]})")); });
  CHECK(msg == "$.stages[0]: missing field 'cuts'");
  msg = schema_message([] { level_function_from(Json::parse(R"({"stage":1,"coefficients":{"0":"1/0"}})")); });
  CHECK(msg.rfind("$.coefficients.0:", 0) == 0);
  msg = schema_message([] { interval_from(Json::parse("[5, 1]")); });
  CHECK(msg.find("lo > hi") != std::string::npos);
  msg = schema_message([] { walsh_from(Json::parse(R"([{"set":[1,1],"num":"1","den":"2"}])")); });
  CHECK(msg.rfind("$[0].set:", 0) == 0);
  CHECK_THROWS_AS(parse_table("n\tlower\tupper\n0\t1/1\t1/1\n2\t0\t0\n"), SchemaError);
  CHECK_THROWS_AS(parse_table("bad header\n"), SchemaError);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "rankone_io_test";
  std::filesystem::remove_all(dir);
  write_file_atomic(dir / "a.json", "{\n  \"x\": 1,\n  oops\n}");
  auto msg = schema_message([&] { read_json_file(dir / "a.json"); });
  CHECK(msg.find("a.json:3:") != std::string::npos);
  write_file_atomic(dir / "a.json", "{}");
  CHECK(read_text_file(dir / "a.json") == "{}");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}
