#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <limits>

#include "agora/error.hpp"
#include "agora/synthpop.hpp"
#include "doctest.h"

using namespace agora;

namespace {

bool worlds_equal(const SyntheticWorld& a, const SyntheticWorld& b) {
  if (a.agents.size() != b.agents.size()) return false;
  for (std::size_t i = 0; i < a.agents.size(); ++i)
    if (a.agents[i].ideal_point != b.agents[i].ideal_point) return false;
  return a.statement_points == b.statement_points &&
         a.cluster_labels == b.cluster_labels;
}

}  // namespace

TEST_CASE("same seed gives identical worlds") {
  WorldParams params{.n = 20, .m = 10, .d = 3, .noise_scale = 0.1};
  std::vector<ClusterSpec> clusters{{{0, 0, 0}, 10, 0.5}, {{1, 1, 1}, 10, 0.5}};
  auto w1 = generate_world(params, clusters, 42);
  auto w2 = generate_world(params, clusters, 42);
  CHECK(worlds_equal(w1, w2));
  auto w3 = generate_world(params, clusters, 43);
  CHECK_FALSE(worlds_equal(w1, w3));
}

TEST_CASE("single agent world") {
  WorldParams params{.n = 1, .m = 2, .d = 1};
  auto w = generate_world(params, {{{0.0}, 1, 0.0}}, 1);
  CHECK(w.agents.size() == 1);
  CHECK(w.statement_points.size() == 2);
}

TEST_CASE("bad cluster spec rejected") {
  WorldParams params{.n = 5, .m = 2, .d = 1};
  CHECK_THROWS_WITH_AS(generate_world(params, {{{0.0}, 3, 0.1}}, 1),
                       doctest::Contains("BadSpec"), DomainError);
}

TEST_CASE("infinite pass band swallows everything") {
  WorldParams params{.n = 5, .m = 4, .d = 2,
                     .pass_band = std::numeric_limits<double>::max()};
  auto w = generate_world(params, {{{2, 2}, 5, 0.2}}, 3);
  auto m = cast_votes(w, 1.0, 9);
  for (const auto& [key, value] : m.entries()) CHECK(value == 0.0);
}

TEST_CASE("aligned agent with zero noise votes agree") {
  WorldParams params{.n = 1, .m = 1, .d = 1, .noise_scale = 0.0,
                     .pass_band = 0.1};
  auto w = generate_world(params, {{{1.0}, 1, 0.0}}, 5);
  w.statement_points[0] = {1.0};  // dot = 1 > band
  auto m = cast_votes(w, 1.0, 1);
  CHECK(m.value(0, 0) == 1.0);
}

TEST_CASE("density 1 gives a complete matrix") {
  WorldParams params{.n = 7, .m = 5, .d = 2};
  auto w = generate_world(params, {{{0, 0}, 7, 1.0}}, 2);
  auto m = cast_votes(w, 1.0, 2);
  CHECK(m.density() == 1.0);
}

TEST_CASE("partial density hits the requested count") {
  WorldParams params{.n = 10, .m = 10, .d = 2};
  auto w = generate_world(params, {{{0, 0}, 10, 1.0}}, 2);
  auto m = cast_votes(w, 0.3, 2);
  CHECK(m.n_votes() == 30);
  CHECK(cast_votes(w, 0.3, 2) == m);  // deterministic
}

TEST_CASE("negation symmetry flips non-pass votes (zero noise)") {
  WorldParams params{.n = 6, .m = 8, .d = 2, .noise_scale = 0.0,
                     .pass_band = 0.15};
  auto w = generate_world(params, {{{0.5, -0.5}, 6, 0.4}}, 11);
  SyntheticWorld neg = w;
  for (auto& a : neg.agents)
    for (double& x : a.ideal_point) x = -x;
  for (auto& s : neg.statement_points)
    for (double& x : s) x = -x;
  auto m1 = cast_votes(w, 1.0, 4);
  auto m2 = cast_votes(neg, 1.0, 4);
  for (const auto& [key, value] : m1.entries())
    CHECK(*m2.value(key.first, key.second) == value);
}

TEST_CASE("utility is zero at the ideal point and monotone in distance") {
  WorldParams params{.n = 1, .m = 2, .d = 2};
  auto w = generate_world(params, {{{0.3, 0.7}, 1, 0.0}}, 8);
  w.statement_points[0] = w.agents[0].ideal_point;
  w.statement_points[1] = {w.agents[0].ideal_point[0] + 1.0,
                           w.agents[0].ideal_point[1]};
  CHECK(utility(w, 0, 0) == 0.0);
  CHECK(utility(w, 0, 1) < utility(w, 0, 0));
  CHECK_THROWS_WITH_AS(utility(w, 5, 0), doctest::Contains("UnknownId"),
                       DomainError);
}

TEST_CASE("utilities match an independent distance computation") {
  WorldParams params{.n = 5, .m = 3, .d = 3};
  auto w = generate_world(params, {{{0, 0, 0}, 5, 1.0}}, 21);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t s = 0; s < 3; ++s) {
      double sq = 0.0;
      for (std::size_t k = 0; k < 3; ++k)
        sq += std::pow(w.agents[a].ideal_point[k] - w.statement_points[s][k], 2);
      CHECK(utility(w, a, s) == doctest::Approx(-std::sqrt(sq)).epsilon(1e-12));
    }
}

TEST_CASE("world save/load round-trip") {
  WorldParams params{.n = 4, .m = 3, .d = 2, .noise_scale = 0.2,
                     .pass_band = 0.3};
  auto w = generate_world(params, {{{1, 0}, 2, 0.1}, {{-1, 0}, 2, 0.1}}, 77);
  auto path = (std::filesystem::temp_directory_path() / "agora_world.json");
  save_world(w, path.string());
  auto loaded = load_world(path.string());
  CHECK(worlds_equal(w, loaded));
  CHECK(loaded.agents[0].noise_scale == w.agents[0].noise_scale);
  CHECK(loaded.agents[0].pass_band == w.agents[0].pass_band);
}
