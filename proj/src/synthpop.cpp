#include "agora/synthpop.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "agora/error.hpp"
#include "agora/rng.hpp"
#include "json.hpp"

namespace agora {

using json = nlohmann::ordered_json;

namespace {

// Zero-padded ids so lexicographic order equals index order.
std::string padded_id(char prefix, std::size_t i, std::size_t count) {
  std::size_t width = 1;
  for (std::size_t x = count > 0 ? count - 1 : 0; x >= 10; x /= 10) ++width;
  std::ostringstream os;
  os << prefix;
  std::string digits = std::to_string(i);
  os << std::string(width - digits.size(), '0') << digits;
  return os.str();
}

}  // namespace

SyntheticWorld generate_world(const WorldParams& params,
                              const std::vector<ClusterSpec>& clusters,
                              std::uint64_t seed) {
  if (params.n < 1 || params.m < 1 || params.d < 1)
    throw DomainError("BadSpec", "n, m, d must all be at least 1");
  std::size_t total = 0;
  for (const auto& c : clusters) {
    if (c.center.size() != params.d)
      throw DomainError("BadSpec", "cluster center dimension mismatch");
    total += c.count;
  }
  if (total != params.n)
    throw DomainError("BadSpec", "cluster counts do not sum to n");

  Rng rng(seed);
  SyntheticWorld world;
  world.seed = seed;
  world.agents.reserve(params.n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t i = 0; i < clusters[c].count; ++i) {
      AgentSpec a;
      a.noise_scale = params.noise_scale;
      a.pass_band = params.pass_band;
      a.ideal_point.resize(params.d);
      for (std::size_t k = 0; k < params.d; ++k)
        a.ideal_point[k] =
            clusters[c].center[k] + clusters[c].spread * rng.gaussian();
      world.agents.push_back(std::move(a));
      world.cluster_labels.push_back(c);
    }
  }
  world.statement_points.resize(params.m);
  for (std::size_t j = 0; j < params.m; ++j) {
    world.statement_points[j].resize(params.d);
    for (std::size_t k = 0; k < params.d; ++k)
      world.statement_points[j][k] = rng.uniform(-1.0, 1.0);
  }
  return world;
}

WillMatrix cast_votes(const SyntheticWorld& world, double density,
                      std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0))
    throw DomainError("BadSpec", "density must be in (0, 1]");
  const std::size_t n = world.agents.size();
  const std::size_t m = world.statement_points.size();
  const std::size_t d = world.dims();
  const std::size_t cells = n * m;
  const std::size_t take = std::min<std::size_t>(
      cells, static_cast<std::size_t>(std::llround(density * cells)));

  Rng rng(seed);
  std::vector<std::size_t> cell(cells);
  std::iota(cell.begin(), cell.end(), 0);
  // Partial Fisher-Yates: the first `take` slots are a uniform sample
  // without replacement.
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.below(cells - i);
    std::swap(cell[i], cell[j]);
  }
  std::vector<std::size_t> chosen(cell.begin(), cell.begin() + take);
  std::sort(chosen.begin(), chosen.end());

  std::vector<Participant> participants(n);
  for (std::size_t i = 0; i < n; ++i)
    participants[i].id = padded_id('p', i, n);
  std::vector<Statement> statements(m);
  for (std::size_t j = 0; j < m; ++j) {
    statements[j].id = padded_id('s', j, m);
    statements[j].round = 0;
  }

  std::vector<Vote> votes;
  votes.reserve(take);
  for (std::size_t c : chosen) {
    const std::size_t u = c / m;
    const std::size_t j = c % m;
    const AgentSpec& a = world.agents[u];
    double score = 0.0;
    for (std::size_t k = 0; k < d; ++k)
      score += a.ideal_point[k] * world.statement_points[j][k];
    if (a.noise_scale > 0.0) score += rng.gaussian(0.0, a.noise_scale);
    double value = 0.0;
    if (score > a.pass_band)
      value = 1.0;
    else if (score < -a.pass_band)
      value = -1.0;
    votes.push_back({participants[u].id, statements[j].id, value});
  }
  return build_matrix(votes, std::move(participants), std::move(statements),
                      Schema::ternary());
}

double utility(const SyntheticWorld& world, std::size_t agent,
               std::size_t statement) {
  if (agent >= world.agents.size() ||
      statement >= world.statement_points.size())
    throw DomainError("UnknownId", "agent or statement index out of range");
  const auto& a = world.agents[agent].ideal_point;
  const auto& s = world.statement_points[statement];
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - s[k];
    sq += diff * diff;
  }
  return -std::sqrt(sq);
}

void save_world(const SyntheticWorld& world, const std::string& path) {
  json j;
  j["seed"] = world.seed;
  json agents = json::array();
  for (std::size_t i = 0; i < world.agents.size(); ++i) {
    json a;
    a["ideal_point"] = world.agents[i].ideal_point;
    a["noise_scale"] = world.agents[i].noise_scale;
    a["pass_band"] = world.agents[i].pass_band;
    a["cluster"] = world.cluster_labels[i];
    agents.push_back(a);
  }
  j["agents"] = agents;
  j["statement_points"] = world.statement_points;
  std::ofstream f(path);
  f << j.dump(2) << "\n";
}

SyntheticWorld load_world(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("IoError", "cannot open " + path);
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded())
    throw DomainError("ParseError", "malformed world file: " + path);
  SyntheticWorld world;
  world.seed = j.value("seed", 0ULL);
  for (const auto& a : j.at("agents")) {
    AgentSpec spec;
    spec.ideal_point = a.at("ideal_point").get<std::vector<double>>();
    spec.noise_scale = a.value("noise_scale", 0.0);
    spec.pass_band = a.value("pass_band", 0.0);
    world.agents.push_back(std::move(spec));
    world.cluster_labels.push_back(a.value("cluster", 0));
  }
  world.statement_points =
      j.at("statement_points").get<std::vector<std::vector<double>>>();
  return world;
}

}  // namespace agora
