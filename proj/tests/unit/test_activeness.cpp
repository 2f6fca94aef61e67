#include <doctest.h>

#include <sstream>

#include "spaceprofiler/activeness.hpp"

using namespace spaceprofiler;

TEST_CASE("categorize reported means and edges") {
  CHECK(categorize(0.3850) == 1);
  CHECK(categorize(0.2301) == 2);
  CHECK(categorize(0.1621) == 3);
  CHECK(categorize(0.0577) == 4);
  CHECK(categorize(0.0105) == 5);
  CHECK(categorize(0.30) == 1);
  CHECK(categorize(0.20) == 2);
  CHECK(categorize(0.10) == 3);
  CHECK(categorize(0.03) == 4);
  CHECK(categorize(0.0) == 5);
  CHECK(categorize(1.0) == 1);
}

TEST_CASE("categorize is monotone and bands tile [0, 1]") {
  int previous = 5;
  for (int i = 0; i <= 100000; ++i) {
    const int c = categorize(i / 100000.0);
    CHECK(c >= 1);
    CHECK(c <= 5);
    CHECK(c <= previous);
    previous = c;
  }
}

TEST_CASE("category bounds validation") {
  CategoryBounds b;
  b.validate();
  b.lower_edges = {0.3, 0.3, 0.1, 0.03};
  CHECK_THROWS_AS(b.validate(), Error);
  b.lower_edges = {1.2, 0.3, 0.1, 0.03};
  CHECK_THROWS_AS(b.validate(), Error);
}

TEST_CASE("cluster_mean") {
  std::vector<std::vector<double>> profiles{std::vector<double>(288, 0.2)};
  std::vector<int> one{0};
  CHECK(cluster_mean(one, profiles, 1).at(0) == doctest::Approx(0.2));

  profiles = {std::vector<double>(288, 0.1), std::vector<double>(288, 0.3)};
  std::vector<int> both{0, 0};
  CHECK(cluster_mean(both, profiles, 1).at(0) == doctest::Approx(0.2));

  WarningLog log;
  auto m = cluster_mean(both, profiles, 2, &log);
  CHECK(m.size() == 1);
  CHECK(log.messages().size() == 1);

  std::vector<int> short_assign{0};
  CHECK_THROWS_AS(cluster_mean(short_assign, profiles, 1), Error);
}

TEST_CASE("classify_poi examples") {
  using C = std::array<std::optional<int>, 3>;
  CHECK(classify_poi(C{3, 3, 5}) == Verdict::active);
  CHECK(classify_poi(C{4, 4, 1}) == Verdict::less_active);
  CHECK(classify_poi(C{1, 2, 3}) == Verdict::active);
  CHECK_THROWS_AS(classify_poi(C{1, std::nullopt, 3}), Error);
  CHECK_THROWS_AS(classify_poi(C{0, 1, 1}), Error);
  const auto v = classify_poi("s1", PoiType::playground, C{2, 5, 3});
  CHECK(v.verdict == Verdict::active);
  CHECK(v.categories == std::array<int, 3>{2, 5, 3});
}

TEST_CASE("classify_poi is monotone under improving one category") {
  using C = std::array<std::optional<int>, 3>;
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 5; ++b)
      for (int c = 1; c <= 5; ++c) {
        const C base{a, b, c};
        if (classify_poi(base) != Verdict::active) continue;
        for (int i = 0; i < 3; ++i) {
          for (int better = 1; better < *base[i]; ++better) {
            C improved = base;
            improved[i] = better;
            CHECK(classify_poi(improved) == Verdict::active);
          }
        }
      }
}

TEST_CASE("verdict csv") {
  std::vector<PoIVerdict> v{{"s1", PoiType::link_way, {1, 4, 2}, Verdict::active},
                            {"s2", std::nullopt, {5, 5, 5}, Verdict::less_active}};
  std::ostringstream out;
  write_verdicts_csv(out, v);
  CHECK(out.str() ==
        "sensor_id,poi_type,cat_wd,cat_we,cat_sh,verdict\n"
        "s1,link_way,1,4,2,active\n"
        "s2,unknown,5,5,5,less_active\n");
}
