#include <doctest.h>

#include <random>
#include <sstream>

#include "../support/oracles.hpp"
#include "spaceprofiler/similarity.hpp"

using namespace spaceprofiler;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = u(rng);
  return v;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("wied_distance examples") {
  const std::vector<double> a{0, 1}, b{1, 0};
  CHECK(wied_distance(a, a, 1) == 0.0);
  CHECK(wied_distance(a, b, 0) == doctest::Approx(1.0));
  const std::vector<double> p{0, 1, 0}, q{1, 0, 0};
  CHECK(wied_distance(p, q, 1) == 0.0);
  CHECK(oracle::wied_brute(p, q, 1) == 0.0);
}

TEST_CASE("wied_distance errors") {
  const std::vector<double> a{0, 1, 2}, b{0, 1};
  CHECK(kind_of([&] { wied_distance(a, b, 0); }) == ErrorKind::dimension);
  CHECK(kind_of([&] { wied_distance(a, a, 3); }) == ErrorKind::domain);
  CHECK(kind_of([&] { wied_distance(a, a, -1); }) == ErrorKind::domain);
}

TEST_CASE("wied_distance matches the brute-force offset oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 40);
    auto a = random_vec(rng, n), b = random_vec(rng, n);
    const int w = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    CHECK(wied_distance(a, b, w) == doctest::Approx(oracle::wied_brute(a, b, w)).epsilon(1e-12));
  }
}

TEST_CASE("baseline kernels") {
  const std::vector<double> a{0, 0, 0, 0}, b{1, 0, 1, 0};
  CHECK(kernel_distance(a, b, Kernel::manhattan()) == doctest::Approx(0.5));
  CHECK(kernel_distance(a, b, Kernel::euclidean()) == doctest::Approx(std::sqrt(0.5)));
  CHECK(kernel_distance(a, b, Kernel::minkowski(3)) == doctest::Approx(std::cbrt(0.5)));
  CHECK(kernel_distance(a, b, Kernel::wied(0)) == doctest::Approx(0.5));
}

TEST_CASE("to_similarity") {
  CHECK(to_similarity(0.0) == 1.0);
  CHECK(to_similarity(1.0) == doctest::Approx(0.5));
  CHECK(to_similarity(0.25) == doctest::Approx(0.8));
  CHECK(kind_of([] { to_similarity(-0.1); }) == ErrorKind::domain);
  CHECK(to_similarity(0.3) > to_similarity(0.4));
}

TEST_CASE("sessions") {
  const SessionSet s = default_sessions();
  std::vector<double> profile(kBinsPerDay);
  for (int b = 0; b < kBinsPerDay; ++b) profile[b] = b;
  const std::array<std::size_t, 4> lengths{60, 36, 48, 72};
  std::vector<int> covered(kBinsPerDay, 0);
  for (std::size_t i = 0; i < 4; ++i) {
    auto slice = session_slice(profile, s[i]);
    CHECK(slice.size() == lengths[i]);
    for (double v : slice) covered[static_cast<std::size_t>(v)] += 1;
  }
  for (int b = 0; b < kBinsPerDay; ++b) CHECK(covered[b] == (b >= 72 ? 1 : 0));

  SessionSet overlap = s;
  overlap[1].start_minute = 10 * 60;
  CHECK(kind_of([&] { validate_sessions(overlap); }) == ErrorKind::config);
  SessionSet inverted = s;
  inverted[0].end_minute = 5 * 60;
  CHECK(kind_of([&] { validate_sessions(inverted); }) == ErrorKind::config);
}

TEST_CASE("similarity_matrix layout and properties") {
  std::mt19937_64 rng(23);
  std::vector<std::vector<double>> profiles;
  std::vector<std::string> ids;
  for (int i = 0; i < 7; ++i) {
    profiles.push_back(random_vec(rng, kBinsPerDay));
    ids.push_back("s" + std::to_string(i));
  }
  profiles.push_back(profiles[2]);
  ids.push_back("dup");
  for (const Kernel& k : {Kernel::wied(2), Kernel::wied(0), Kernel::euclidean(), Kernel::manhattan(),
                          Kernel::minkowski(3)}) {
    const auto m = similarity_matrix(ids, profiles, k);
    const auto ser = serial::similarity_matrix(ids, profiles, k);
    CHECK(m.values == ser.values);
    for (int i = 0; i < 8; ++i) {
      CHECK(m.values(i, i) == 0.0);
      for (int j = 0; j < 8; ++j) {
        CHECK(m.values(i, j) == m.values(j, i));
        if (i != j) {
          CHECK(m.values(i, j) > 0.0);
          CHECK(m.values(i, j) <= 1.0);
        }
      }
    }
    CHECK(m.values(2, 7) == 1.0);
    const auto sess = similarity_matrix(ids, profiles, k, default_sessions()[3]);
    CHECK(sess.values(2, 7) == 1.0);
  }
}

TEST_CASE("similarity_matrix errors") {
  std::vector<std::vector<double>> profiles{{0, 1}, {0, 1, 2}};
  CHECK(kind_of([&] { similarity_matrix({"a", "b"}, profiles, Kernel::euclidean()); }) ==
        ErrorKind::dimension);
}

TEST_CASE("appending a shared silent segment raises similarity") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = random_vec(rng, 60), b = random_vec(rng, 60);
    auto a2 = a, b2 = b;
    a2.insert(a2.begin(), 72, 0.0);
    b2.insert(b2.begin(), 72, 0.0);
    for (const Kernel& k : {Kernel::wied(2), Kernel::euclidean(), Kernel::manhattan(), Kernel::minkowski(3)}) {
      CHECK(to_similarity(kernel_distance(a2, b2, k)) > to_similarity(kernel_distance(a, b, k)));
    }
  }
}

TEST_CASE("matrix csv round trip") {
  Eigen::MatrixXd m(2, 2);
  m << 0.0, 0.1 / 3, 0.1 / 3, 0.0;
  std::stringstream buf;
  write_matrix_csv(buf, {"a", "b"}, m);
  auto back = read_matrix_csv(buf);
  CHECK(back.ids == std::vector<std::string>{"a", "b"});
  CHECK(back.values == m);
}
