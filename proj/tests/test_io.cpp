#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "mdg/corpus.hpp"
#include "mdg/io.hpp"

using namespace mdg;

TEST_CASE("format_double: 17 significant digits round-trip exactly") {
  SplitMix64 rng(7);
  for (int k = 0; k < 500; ++k) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, (rng.uniform() - 0.5) * 40.0);
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(std::strtod(format_double(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
}

TEST_CASE("mixture JSON: probs are row-major over non-mask states") {
  const std::string doc = R"({
    "N": 3, "D": 2,
    "classes": [{"label": "a", "weight": 1.0, "probs": [0.1, 0.2, 0.3, 0.4]}]
  })";
  const MixtureModel m = load_mixture_json(doc);
  CHECK(m.conditional(0)(State{1, 1}) == 0.1);
  CHECK(m.conditional(0)(State{1, 2}) == 0.2);
  CHECK(m.conditional(0)(State{2, 1}) == 0.3);
  CHECK(m.conditional(0)(State{2, 2}) == 0.4);
  CHECK(m.conditional(0)(State{3, 3}) == 0.0);
}

TEST_CASE("mixture JSON: round trip preserves every number") {
  for (const MixtureModel& m :
       {random_mixture(3, 2, 5, 3, MixtureKind::RandomSupport), cluster_mixture_1d(true),
        two_square_mixture_2d(), diamond_mixture_2d()}) {
    const MixtureModel back = load_mixture_json(mixture_to_json(m));
    CHECK(back.space() == m.space());
    CHECK(back.labels() == m.labels());
    for (int k = 0; k < m.num_classes(); ++k) {
      CHECK(back.weight(k) == doctest::Approx(m.weight(k)).epsilon(1e-15));
      CHECK((back.conditional(k).probs() - m.conditional(k).probs()).cwiseAbs().maxCoeff() <=
            1e-15);
    }
  }
}

TEST_CASE("mixture JSON: malformed documents raise ConfigError") {
  CHECK_THROWS_AS(load_mixture_json("not json"), ConfigError);
  CHECK_THROWS_AS(load_mixture_json("{}"), ConfigError);
  CHECK_THROWS_AS(
      load_mixture_json(R"({"N":3,"D":1,"classes":[{"label":"a","weight":1.0,"probs":[1.0]}]})"),
      ConfigError);  // wrong probs length
  CHECK_THROWS_AS(load_mixture_file("/nonexistent/mixture.json"), ConfigError);
}

TEST_CASE("scenario JSON: fields, defaults, relative paths, guards") {
  const std::string doc = R"({
    "mixture": "mix.json", "guided_class": "z1", "w": [0, 1, 4],
    "T": 2.5, "times": [0, 1.0, 2.5], "seed": 99
  })";
  const Scenario sc = load_scenario_json(doc, "/data/scenarios");
  CHECK(sc.mixture_path == "/data/scenarios/mix.json");
  CHECK(sc.guided_class == "z1");
  CHECK(sc.w == std::vector<double>{0.0, 1.0, 4.0});
  CHECK(sc.T == 2.5);
  CHECK(sc.seed == 99);
  const Scenario abs = load_scenario_json(
      R"({"mixture":"/abs/mix.json","guided_class":"z","w":[1],"T":1,"times":[0.5]})", "/ignored");
  CHECK(abs.mixture_path == "/abs/mix.json");
  CHECK(abs.seed == 1);  // default
  CHECK_THROWS_AS(load_scenario_json(
                      R"({"mixture":"m","guided_class":"z","w":[1],"T":-1,"times":[]})", ""),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario_json(
                      R"({"mixture":"m","guided_class":"z","w":[-2],"T":1,"times":[]})", ""),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario_json(
                      R"({"mixture":"m","guided_class":"z","w":[1],"T":1,"times":[2]})", ""),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario_json(R"({"guided_class":"z"})", ""), ConfigError);
}

TEST_CASE("density CSV: values re-parse to the exact in-memory doubles") {
  const MixtureModel m = random_mixture(17, 2, 4, 2, MixtureKind::Overlap);
  const DenseDistribution p = full_distribution(m);
  std::stringstream ss;
  write_density_csv(ss, p, 1.5, 0.25);
  const auto rows = read_csv(ss);
  REQUIRE(rows.size() == static_cast<std::size_t>(m.space().size()) + 1);
  CHECK(rows[0] == std::vector<std::string>{"x1", "x2", "w", "t", "prob"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const State st{std::stoi(rows[k][0]), std::stoi(rows[k][1])};
    CHECK(std::strtod(rows[k][4].c_str(), nullptr) == p(st));
    CHECK(std::strtod(rows[k][2].c_str(), nullptr) == 1.5);
    CHECK(std::strtod(rows[k][3].c_str(), nullptr) == 0.25);
  }
}

TEST_CASE("tv CSV and samples CSV: shape and exactness") {
  const MixtureModel m = cluster_mixture_1d(true);
  const GuidanceConfig g(0, 1.0);
  const TVCurve curve = tv_curve_1d_closed(m, g, 2.0, {0.0, 0.5, 1.0});
  std::stringstream ss;
  write_tv_csv(ss, {curve});
  const auto rows = read_csv(ss);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == std::vector<std::string>{"w", "t", "tv", "log_tv"});
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(std::strtod(rows[k][2].c_str(), nullptr) == curve.values[k - 1]);
  }

  const SampleBatch b = sample_exact_event(guided_reverse(m, g), 2.0, 50, 4);
  std::stringstream s2;
  write_samples_csv(s2, b);
  const auto srows = read_csv(s2);
  REQUIRE(srows.size() == 51);
  CHECK(srows[0] == std::vector<std::string>{"x1"});
  for (std::size_t k = 1; k < srows.size(); ++k) {
    CHECK(std::stoi(srows[k][0]) == m.space().state_of(b.samples[k - 1])[0] );
  }
}

TEST_CASE("SVG emitters produce well-formed-looking documents") {
  const MixtureModel m2 = two_square_mixture_2d();
  const MixtureModel m1 = cluster_mixture_1d(false);
  std::stringstream bar, heat, region, tvw;
  svg_bar_chart(bar, full_distribution(m1), "bar");
  svg_heatmap(heat, full_distribution(m2), "heat");
  svg_region_map(region, region_decomposition_2d(m2, 0, 1.0), "regions");
  svg_tv_vs_w(tvw, {0.0, 1.0, 2.0}, {-0.1, -1.0, -4.0}, "tv");
  for (const std::string s : {bar.str(), heat.str(), region.str(), tvw.str()}) {
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
  }
  CHECK_THROWS_AS(svg_bar_chart(bar, full_distribution(m2), "x"), DimensionMismatch);
  CHECK_THROWS_AS(svg_heatmap(heat, full_distribution(m1), "x"), DimensionMismatch);
}

TEST_CASE("region report JSON names the two-square regions") {
  const MixtureModel m = two_square_mixture_2d();
  const std::string doc = region_report_json(region_decomposition_2d(m, 0, 1.0));
  CHECK(doc.find("\"R1\"") != std::string::npos);
  CHECK(doc.find("\"R4\"") != std::string::npos);
  CHECK(doc.find("\"limit_weight\"") != std::string::npos);
  const MixtureModel back = load_mixture_json(mixture_to_json(m));  // keep json lib honest
  CHECK(back.num_classes() == 2);
}
