#include "ecbc/errors.hpp"
#include "ecbc/serialize.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ecbc;

TEST_CASE("degree specs")
{
  const auto plugin = parse_degree_spec("plugin", 3);
  CHECK(plugin.policy == DegreePolicy::plugin);
  CHECK(plugin.seed == 3u);

  const auto fixed = parse_degree_spec("12,10,9", 0);
  CHECK(fixed.policy == DegreePolicy::fixed);
  CHECK(fixed.degrees == Degrees{12, 10, 9});
  CHECK(degree_spec_string(fixed) == "12,10,9");

  const auto prior = parse_degree_spec("prior:25", 0);
  CHECK(prior.policy == DegreePolicy::prior_sample);
  CHECK(prior.draws == 25);
  CHECK(degree_spec_string(prior) == "prior:25");

  CHECK_THROWS_AS(parse_degree_spec("1,2", 0), ValidationError);
  CHECK_THROWS_AS(parse_degree_spec("3,3,1", 0), ValidationError);
  CHECK_THROWS_AS(parse_degree_spec("prior:x", 0), ValidationError);
  CHECK_THROWS_AS(parse_degree_spec("auto", 0), ValidationError);
}

TEST_CASE("number formatting")
{
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-2e-15) == "-2e-15");
}

TEST_CASE("fit files round-trip")
{
  DegreeConfig config;
  config.policy = DegreePolicy::prior_sample;
  config.draws = 2;
  config.seed = 5;
  const auto model = fit_conditional_copula(oracle::clayton_dataset(60, 1), config);
  const auto path = std::filesystem::temp_directory_path() / "ecbc_test_fit.json";
  save_model(model, path);
  const auto back = load_model(path);
  REQUIRE(back.members.size() == 2u);
  CHECK(back.config.draws == 2);
  CHECK(back.config.seed == 5u);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.members[i].stage2.theta() == model.members[i].stage2.theta());
    CHECK(back.members[i].degrees == model.members[i].degrees);
  }
  for (double v : {0.2, 0.7}) {
    CHECK(kendall_tau(back, v) == kendall_tau(model, v));
    CHECK(conditional_copula_cdf(back, 0.3, 0.8, v) == conditional_copula_cdf(model, 0.3, 0.8, v));
  }
  CHECK(back.covariate_cdf()(1.3) == model.covariate_cdf()(1.3));

  std::ofstream(path) << "{\"format\": \"other\"}";
  CHECK_THROWS_AS(load_model(path), ValidationError);
  std::ofstream(path) << "not json";
  CHECK_THROWS_AS(load_model(path), ValidationError);
  CHECK_THROWS_AS(load_model(path.string() + ".missing"), ValidationError);
}

TEST_CASE("curve CSV round-trips at 12 significant digits")
{
  const auto model = fit_conditional_copula(oracle::clayton_dataset(60, 9), DegreeConfig{});
  const std::vector<double> v{0.1, 0.3, 0.5, 0.7, 0.9};
  const auto curve = dependence_curve(model, v);
  std::stringstream first;
  write_curve_csv(first, curve);
  const auto back = read_curve_csv(first);
  REQUIRE(back.size() == curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(format_number(back[i].tau) == format_number(curve[i].tau));
    CHECK(format_number(back[i].x) == format_number(curve[i].x));
  }
  std::stringstream second;
  write_curve_csv(second, back);
  std::stringstream again;
  write_curve_csv(again, curve);
  CHECK(second.str() == again.str());

  std::stringstream bad("a,b\n1,2\n");
  CHECK_THROWS_AS(read_curve_csv(bad), ValidationError);
}

TEST_CASE("scenario files")
{
  const auto j = nlohmann::json::parse(R"({"model": "B", "center": 2, "range": [2, 5], "n": 50, "N": 3,
                                           "seed": 4, "degrees": "10,10,12"})");
  const auto m = scenario_from_json(j);
  CHECK(m.link == LinkModel::model_b);
  CHECK(m.model_b_center == 2.0);
  CHECK(m.n == 50u);
  CHECK(m.replicates == 3u);
  CHECK(m.degrees.degrees == Degrees{10, 10, 12});
  const auto out = to_json(m);
  CHECK(out.at("center") == 2.0);
  CHECK(out.at("grid").size() == 21u);

  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"model": "C", "range": [0,1], "n": 50, "N": 1})")),
                  ValidationError);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"model": "A", "n": 50, "N": 1})")), ValidationError);
  CHECK_THROWS_AS(scenario_from_json(nlohmann::json::parse(R"({"model": "A", "range": [0,1], "n": 5, "N": 1})")),
                  ValidationError);
}
