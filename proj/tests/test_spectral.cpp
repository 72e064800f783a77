#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <vector>

#include "agora/error.hpp"
#include "agora/spectral.hpp"
#include "agora/synthpop.hpp"
#include "doctest.h"

using namespace agora;

namespace {

WillMatrix two_cluster_matrix(std::size_t n_per_side, std::size_t m,
                              std::uint64_t seed) {
  WorldParams params{.n = 2 * n_per_side, .m = m, .d = 2, .noise_scale = 0.0,
                     .pass_band = 0.05};
  std::vector<ClusterSpec> clusters{{{-1.0, 0.0}, n_per_side, 0.05},
                                    {{1.0, 0.0}, n_per_side, 0.05}};
  auto world = generate_world(params, clusters, seed);
  return cast_votes(world, 1.0, seed + 1);
}

double frobenius_diff(const WillMatrix& matrix, const Projection& proj) {
  const std::size_t n = matrix.n_participants();
  const std::size_t m = matrix.n_statements();
  // Rebuild the centered imputed matrix and compare to the reconstruction.
  std::vector<std::vector<double>> dense(n, std::vector<double>(m, 0.0));
  for (const auto& [key, value] : matrix.entries())
    dense[key.first][key.second] = value;
  for (std::size_t j = 0; j < m; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += dense[i][j];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) dense[i][j] -= mean;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double rec = 0.0;
      for (std::size_t c = 0; c < proj.components.size(); ++c)
        rec += proj.coordinates[i][c] * proj.components[c][j];
      sq += std::pow(dense[i][j] - rec, 2);
    }
  return std::sqrt(sq);
}

}  // namespace

TEST_CASE("rank-1 matrix: first component captures all variance") {
  // Outer product of sign vectors: v_ij = r_i * c_j.
  const std::vector<double> r{1, -1, 1, 1, -1};
  const std::vector<double> c{1, 1, -1};
  std::vector<Participant> ps;
  std::vector<Statement> ss;
  std::vector<Vote> votes;
  for (std::size_t i = 0; i < r.size(); ++i)
    ps.push_back({"p" + std::to_string(i), {}});
  for (std::size_t j = 0; j < c.size(); ++j)
    ss.push_back({"s" + std::to_string(j), "", {}, 0});
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      votes.push_back({ps[i].id, ss[j].id, r[i] * c[j]});
  auto m = build_matrix(votes, ps, ss, Schema::ternary());
  auto proj = reduce(m, 2);
  CHECK(proj.explained_variance[0] ==
        doctest::Approx(proj.total_variance).epsilon(1e-6));
  CHECK(proj.explained_variance[1] == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("components are orthonormal and variances non-increasing") {
  auto m = two_cluster_matrix(10, 12, 5);
  auto proj = reduce(m, 4);
  for (std::size_t a = 0; a < proj.components.size(); ++a) {
    double norm = 0.0;
    for (double x : proj.components[a]) norm += x * x;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t b = a + 1; b < proj.components.size(); ++b) {
      double dot = 0.0;
      for (std::size_t j = 0; j < proj.components[a].size(); ++j)
        dot += proj.components[a][j] * proj.components[b][j];
      CHECK(std::fabs(dot) <= 1e-9);
    }
  }
  for (std::size_t a = 1; a < proj.explained_variance.size(); ++a)
    CHECK(proj.explained_variance[a] <= proj.explained_variance[a - 1] + 1e-12);
}

TEST_CASE("two-cluster world separates on the first component") {
  WorldParams params{.n = 20, .m = 15, .d = 2, .noise_scale = 0.0,
                     .pass_band = 0.05};
  std::vector<ClusterSpec> clusters{{{-1.0, 0.0}, 10, 0.05},
                                    {{1.0, 0.0}, 10, 0.05}};
  auto world = generate_world(params, clusters, 17);
  auto m = cast_votes(world, 1.0, 18);
  auto proj = reduce(m, 2);
  // All of one cluster strictly on one side, the other strictly opposite.
  double min_a = 1e300, max_a = -1e300, min_b = 1e300, max_b = -1e300;
  for (std::size_t i = 0; i < 20; ++i) {
    const double x = proj.coordinates[i][0];
    if (world.cluster_labels[i] == 0) {
      min_a = std::min(min_a, x);
      max_a = std::max(max_a, x);
    } else {
      min_b = std::min(min_b, x);
      max_b = std::max(max_b, x);
    }
  }
  CHECK((max_a < min_b || max_b < min_a));
}

TEST_CASE("full-rank projection reconstructs the centered matrix") {
  auto m = two_cluster_matrix(5, 8, 9);
  auto proj = reduce(m, std::min(m.n_participants(), m.n_statements()));
  CHECK(frobenius_diff(m, proj) <= 1e-6);
}

TEST_CASE("reduce rejects single-row input") {
  auto m = build_matrix({}, {{"p1", {}}}, {{"s1", "", {}, 0}},
                        Schema::ternary());
  CHECK_THROWS_WITH_AS(reduce(m, 1), doctest::Contains("TooFewRows"),
                       DomainError);
}

TEST_CASE("reduce is equivariant under participant reordering") {
  auto m = two_cluster_matrix(4, 6, 31);
  auto proj = reduce(m, 2);
  // Reverse participant order.
  std::vector<Participant> ps(m.participants().rbegin(),
                              m.participants().rend());
  std::vector<Vote> votes;
  for (const auto& [key, value] : m.entries())
    votes.push_back({m.participants()[key.first].id,
                     m.statements()[key.second].id, value});
  auto rev = build_matrix(votes, ps, m.statements(), Schema::ternary());
  auto proj_rev = reduce(rev, 2);
  const std::size_t n = m.n_participants();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < 2; ++c)
      CHECK(proj_rev.coordinates[n - 1 - i][c] ==
            doctest::Approx(proj.coordinates[i][c]).epsilon(1e-9));
}

TEST_CASE("cluster recovers a clean 2-partition and k_max=2 forces 2 groups") {
  WorldParams params{.n = 24, .m = 16, .d = 2, .noise_scale = 0.0,
                     .pass_band = 0.05};
  std::vector<ClusterSpec> clusters{{{-10.0, 0.0}, 12, 0.1},
                                    {{10.0, 0.0}, 12, 0.1}};
  auto world = generate_world(params, clusters, 3);
  auto m = cast_votes(world, 1.0, 4);
  auto proj = reduce(m, 2);
  auto groups = cluster(proj, 5, 7);
  CHECK(groups.k == 2);
  // Label agreement up to relabeling.
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t i = 0; i < 24; ++i)
    seen.insert({world.cluster_labels[i], groups.assignment[i]});
  CHECK(seen.size() == 2);

  auto forced = cluster(proj, 2, 7);
  CHECK(forced.k == 2);
}

TEST_CASE("identical projected points are degenerate") {
  Projection proj;
  proj.coordinates.assign(5, {1.0, 2.0});
  CHECK_THROWS_WITH_AS(cluster(proj, 3, 1), doctest::Contains("DegenerateInput"),
                       DomainError);
}

TEST_CASE("clustering is deterministic and leaves no group empty") {
  auto m = two_cluster_matrix(8, 10, 41);
  auto proj = reduce(m, 2);
  auto g1 = cluster(proj, 5, 13);
  auto g2 = cluster(proj, 5, 13);
  CHECK(g1.assignment == g2.assignment);
  CHECK(g1.k == g2.k);
  std::vector<std::size_t> count(g1.k, 0);
  for (std::size_t a : g1.assignment) ++count[a];
  for (std::size_t c : count) CHECK(c > 0);
  // Chosen k has the best silhouette in range.
  for (double s : g1.silhouette_by_k) CHECK(g1.silhouette >= s - 1e-12);
}

TEST_CASE("repness evaluates the smoothed formula") {
  // Group 0 = {p0..p4}, group 1 = {p5..p9}; statement s with chosen votes.
  std::vector<Participant> ps;
  for (int i = 0; i < 10; ++i) ps.push_back({"p" + std::to_string(i), {}});
  std::vector<Statement> ss{{"s", "", {}, 0}};
  OpinionGroups groups;
  groups.k = 2;
  groups.assignment = {0, 0, 0, 0, 0, 1, 1, 1, 1, 1};

  SUBCASE("N=3 T=4 gives P=1") {
    std::vector<Vote> votes{{"p0", "s", 1}, {"p1", "s", 1}, {"p2", "s", 1},
                            {"p3", "s", -1}, {"p5", "s", 1}};
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto r = repness(m, groups, "s", 1.0, 0);
    CHECK(r.n_g == 3);
    CHECK(r.t_g == 4);
    CHECK(r.p_g == doctest::Approx(1.0));
  }

  SUBCASE("empty tally gives the P=2 anomaly, flagged") {
    std::vector<Vote> votes{{"p5", "s", 1}};
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto r = repness(m, groups, "s", 1.0, 0);
    CHECK(r.n_g == 0);
    CHECK(r.t_g == 0);
    CHECK(r.p_g == doctest::Approx(2.0));
    CHECK(r.anomaly);
  }

  SUBCASE("ratio orientations") {
    // N(g)=5, T(g)=9 within; N(g')=1, T(g')=9 outside needs 9 voters per
    // side, so use a wider population.
    std::vector<Participant> wide;
    for (int i = 0; i < 20; ++i) wide.push_back({"q" + std::to_string(i), {}});
    OpinionGroups wide_groups;
    wide_groups.k = 2;
    for (int i = 0; i < 20; ++i)
      wide_groups.assignment.push_back(i < 10 ? 0 : 1);
    std::vector<Vote> votes;
    for (int i = 0; i < 9; ++i)
      votes.push_back({"q" + std::to_string(i), "s", i < 5 ? 1.0 : -1.0});
    for (int i = 10; i < 19; ++i)
      votes.push_back({"q" + std::to_string(i), "s", i < 11 ? 1.0 : -1.0});
    auto m = build_matrix(votes, wide, ss, Schema::ternary());
    auto paper = repness(m, wide_groups, "s", 1.0, 0, true,
                         RepnessOrientation::PaperLiteral);
    CHECK(paper.p_g == doctest::Approx(0.7));
    CHECK(paper.p_gprime == doctest::Approx(0.3));
    CHECK(paper.ratio == doctest::Approx(3.0 / 7.0));
    auto polis = repness(m, wide_groups, "s", 1.0, 0, true,
                         RepnessOrientation::Polis);
    CHECK(polis.ratio == doctest::Approx(7.0 / 3.0));
  }

  SUBCASE("pass counting flag changes T") {
    std::vector<Vote> votes{{"p0", "s", 1}, {"p1", "s", 0}, {"p5", "s", 1}};
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    CHECK(repness(m, groups, "s", 1.0, 0, true).t_g == 2);
    CHECK(repness(m, groups, "s", 1.0, 0, false).t_g == 1);
  }
}

TEST_CASE("repness monotonicity in N for fixed T") {
  std::vector<Participant> ps;
  for (int i = 0; i < 8; ++i) ps.push_back({"p" + std::to_string(i), {}});
  std::vector<Statement> ss{{"s", "", {}, 0}};
  OpinionGroups groups;
  groups.k = 2;
  groups.assignment = {0, 0, 0, 0, 1, 1, 1, 1};
  double prev = -1.0;
  for (int agree = 0; agree <= 4; ++agree) {
    std::vector<Vote> votes;
    for (int i = 0; i < 4; ++i)
      votes.push_back({"p" + std::to_string(i), "s", i < agree ? 1.0 : -1.0});
    votes.push_back({"p4", "s", 1});
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto r = repness(m, groups, "s", 1.0, 0);
    CHECK(r.p_g > prev);
    prev = r.p_g;
  }
}

TEST_CASE("repness rejects an empty complement") {
  std::vector<Participant> ps{{"p0", {}}, {"p1", {}}};
  std::vector<Statement> ss{{"s", "", {}, 0}};
  auto m = build_matrix({{"p0", "s", 1}}, ps, ss, Schema::ternary());
  OpinionGroups groups;
  groups.k = 1;
  groups.assignment = {0, 0};
  CHECK_THROWS_WITH_AS(repness(m, groups, "s", 1.0, 0),
                       doctest::Contains("EmptyComplement"), DomainError);
}

TEST_CASE("group-informed consensus") {
  std::vector<Participant> ps;
  for (int i = 0; i < 8; ++i) ps.push_back({"p" + std::to_string(i), {}});
  OpinionGroups groups;
  groups.k = 2;
  groups.assignment = {0, 0, 0, 0, 1, 1, 1, 1};

  SUBCASE("unanimous statement scores 1 and ranks first") {
    std::vector<Statement> ss{{"sa", "", {}, 0}, {"sb", "", {}, 0}};
    std::vector<Vote> votes;
    for (int i = 0; i < 8; ++i) {
      votes.push_back({"p" + std::to_string(i), "sa", 1.0});
      votes.push_back({"p" + std::to_string(i), "sb", i % 2 ? 1.0 : -1.0});
    }
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto ranking = group_informed_consensus(m, groups);
    CHECK(ranking.ranking.front().statement == "sa");
    // T(g)=4, N=4 per group: P = (2+4)/(1+4) = 1.2 per group, product 1.44.
    CHECK(ranking.ranking.front().score == doctest::Approx(1.44));
  }

  SUBCASE("saturating case: T=4, all agree, product of exact 1.0 needs N=3") {
    // (2+N)/(1+T) = 1 exactly when N=3, T=4.
    std::vector<Statement> ss{{"sa", "", {}, 0}};
    std::vector<Vote> votes;
    for (int i = 0; i < 8; ++i)
      votes.push_back(
          {"p" + std::to_string(i), "sa", (i % 4) < 3 ? 1.0 : 0.0});
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto ranking = group_informed_consensus(m, groups);
    CHECK(ranking.ranking.front().score == doctest::Approx(1.0));
  }

  SUBCASE("unvoted statements are excluded and flagged") {
    std::vector<Statement> ss{{"sa", "", {}, 0}, {"ghost", "", {}, 0}};
    std::vector<Vote> votes;
    for (int i = 0; i < 8; ++i)
      votes.push_back({"p" + std::to_string(i), "sa", 1.0});
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto ranking = group_informed_consensus(m, groups);
    CHECK(ranking.ranking.size() == 1);
    REQUIRE(ranking.unvoted.size() == 1);
    CHECK(ranking.unvoted.front() == "ghost");
  }

  SUBCASE("bridging statement beats polarized ones") {
    std::vector<Statement> ss{{"bridge", "", {}, 0},
                              {"left", "", {}, 0},
                              {"right", "", {}, 0}};
    std::vector<Vote> votes;
    for (int i = 0; i < 8; ++i) {
      const bool left = i < 4;
      votes.push_back({"p" + std::to_string(i), "bridge", 1.0});
      votes.push_back({"p" + std::to_string(i), "left", left ? 1.0 : -1.0});
      votes.push_back({"p" + std::to_string(i), "right", left ? -1.0 : 1.0});
    }
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto ranking = group_informed_consensus(m, groups);
    CHECK(ranking.ranking.front().statement == "bridge");
    // Hand oracle: bridge P=1.2 per group -> 1.44; polarized: 1.2 * 0.4 = .48.
    CHECK(ranking.ranking.front().score == doctest::Approx(1.44));
    CHECK(ranking.ranking[1].score == doctest::Approx(0.48));
  }

  SUBCASE("score invariant under group relabeling") {
    std::vector<Statement> ss{{"sa", "", {}, 0}};
    std::vector<Vote> votes;
    for (int i = 0; i < 6; ++i)
      votes.push_back({"p" + std::to_string(i), "sa", i % 2 ? 1.0 : -1.0});
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    OpinionGroups swapped = groups;
    for (auto& a : swapped.assignment) a = 1 - a;
    CHECK(group_informed_consensus(m, groups).ranking.front().score ==
          doctest::Approx(
              group_informed_consensus(m, swapped).ranking.front().score));
  }
}
