// agora: collective-judgment aggregation toolkit.
//
// One binary, subcommand style. Every command is a pure function of
// (inputs, flags, seed); a RunManifest embedded in each report records
// the command line, input/output digests and the seed so runs are
// auditable and reproducible.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "agora/ballots.hpp"
#include "agora/core.hpp"
#include "agora/error.hpp"
#include "agora/factor.hpp"
#include "agora/pipeline.hpp"
#include "agora/slates.hpp"
#include "agora/spectral.hpp"
#include "agora/synthpop.hpp"
#include "json.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace agora;

constexpr const char* kVersion = "1.0.0";

// FNV-1a 64-bit content digest; stable, dependency-free.
std::string digest_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DomainError("IoError", "cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;
  char buf[4096];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    for (std::streamsize i = 0; i < f.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

struct Manifest {
  std::string command;
  std::vector<std::string> argv;
  json inputs = json::object();
  json outputs = json::object();
  std::uint64_t seed = 0;
  bool has_seed = false;

  void input(const std::string& path) {
    if (std::filesystem::is_directory(path)) {
      for (const auto& e : std::filesystem::directory_iterator(path)) {
        if (e.is_regular_file())
          inputs[e.path().string()] = digest_file(e.path().string());
      }
    } else {
      inputs[path] = digest_file(path);
    }
  }
  void output(const std::string& path) {
    if (std::filesystem::is_directory(path)) {
      for (const auto& e : std::filesystem::directory_iterator(path)) {
        if (e.is_regular_file())
          outputs[e.path().string()] = digest_file(e.path().string());
      }
    } else {
      outputs[path] = digest_file(path);
    }
  }
  json to_json() const {
    json j;
    j["command"] = command;
    j["argv"] = argv;
    j["inputs"] = inputs;
    j["seed"] = has_seed ? json(seed) : json();
    j["version"] = kVersion;
    j["outputs"] = outputs;
    return j;
  }
};

struct Emit {
  std::string report_path;  // empty: stdout
  bool pretty = false;

  void operator()(json report, const Manifest& manifest,
                  const std::string& table) const {
    report["manifest"] = manifest.to_json();
    if (!report_path.empty()) {
      std::ofstream f(report_path);
      if (!f) throw DomainError("IoError", "cannot write " + report_path);
      f << report.dump(2) << "\n";
    }
    if (pretty && !table.empty())
      std::cout << table;
    else if (report_path.empty())
      std::cout << report.dump(pretty ? 2 : -1) << "\n";
  }
};

std::string table_line(const std::string& key, const std::string& value) {
  std::ostringstream ss;
  ss << "  " << key;
  for (std::size_t i = key.size(); i < 24; ++i) ss << ' ';
  ss << value << "\n";
  return ss.str();
}

// --clusters "2x100@(-1,0);(1,0)": <count>x<size>@ then centers ';'-joined.
std::vector<ClusterSpec> parse_clusters(const std::string& spec,
                                        double spread) {
  const auto x = spec.find('x');
  const auto at = spec.find('@');
  if (x == std::string::npos || at == std::string::npos || at < x)
    throw DomainError("BadSpec", "clusters spec must look like k x n @ ...");
  const std::size_t count = std::stoul(spec.substr(0, x));
  const std::size_t size = std::stoul(spec.substr(x + 1, at - x - 1));
  std::vector<ClusterSpec> out;
  std::stringstream centers(spec.substr(at + 1));
  std::string token;
  while (std::getline(centers, token, ';')) {
    if (token.size() < 2 || token.front() != '(' || token.back() != ')')
      throw DomainError("BadSpec", "cluster center must be (x,y,...)");
    ClusterSpec c;
    std::stringstream coords(token.substr(1, token.size() - 2));
    std::string num;
    while (std::getline(coords, num, ',')) c.center.push_back(std::stod(num));
    c.count = size;
    c.spread = spread;
    out.push_back(std::move(c));
  }
  if (out.size() != count)
    throw DomainError("BadSpec", "clusters spec declares " +
                                     std::to_string(count) + " centers, got " +
                                     std::to_string(out.size()));
  return out;
}

json projection_json(const Projection& projection) {
  json j;
  j["explained_variance"] = projection.explained_variance;
  j["total_variance"] = projection.total_variance;
  return j;
}

json groups_json(const WillMatrix& matrix, const OpinionGroups& groups) {
  json j;
  j["k"] = groups.k;
  json assignment = json::object();
  for (std::size_t i = 0; i < groups.assignment.size(); ++i)
    assignment[matrix.participants()[i].id] = groups.assignment[i];
  j["assignment"] = assignment;
  j["centroids"] = groups.centroids;
  j["silhouette"] = groups.silhouette;
  j["silhouette_by_k"] = groups.silhouette_by_k;
  return j;
}

json ballot_json(const BallotResult& r) {
  json j;
  j["rule"] = r.rule;
  j["winner"] = r.winner;
  j["tie"] = r.tie;
  j["scores"] = r.scores;
  j["order"] = r.order;
  return j;
}

json pairwise_json(const PairwiseMatrix& p) {
  json j;
  j["candidates"] = p.candidates;
  j["d"] = p.d;
  return j;
}

// Shared clustering flags for cluster/repness/consensus.
struct ClusterFlags {
  std::string in_dir;
  std::size_t dims = 2;
  std::size_t kmax = 5;
  std::string impute = "zero";
  std::uint64_t seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--in", in_dir, "dataset directory")->required();
    cmd->add_option("--dims", dims, "projection dimensions");
    cmd->add_option("--kmax", kmax, "maximum cluster count");
    cmd->add_option("--impute", impute, "zero|row-mean")
        ->check(CLI::IsMember({"zero", "row-mean"}));
    cmd->add_option("--seed", seed, "random seed");
  }
  OpinionGroups run(const WillMatrix& matrix, Projection* out = nullptr) const {
    auto projection = reduce(matrix, dims,
                             impute == "zero" ? Impute::Zero : Impute::RowMean);
    auto groups = cluster(projection, kmax, seed);
    if (out) *out = std::move(projection);
    return groups;
  }
};

double parse_vote_value(const std::string& s) {
  if (s == "agree") return 1.0;
  if (s == "disagree") return -1.0;
  if (s == "pass") return 0.0;
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw DomainError("BadSpec", "vote must be agree|disagree|pass|<number>");
  }
}

void assert_eq(const std::string& what, const json& got, const json& want) {
  if (got != want)
    throw DomainError("AssertionFailed", what + ": expected " + want.dump() +
                                             ", got " + got.dump());
}

void assert_near(const std::string& what, double got, double want) {
  if (std::abs(got - want) > 1e-12)
    throw DomainError("AssertionFailed", what + ": expected " +
                                             std::to_string(want) + ", got " +
                                             std::to_string(got));
}

RankingProfile fn28_profile() {
  RankingProfile p;
  p.candidates = {"a", "b", "c"};
  for (int i = 0; i < 4; ++i) p.rankings.push_back({"a", "b", "c"});
  for (int i = 0; i < 2; ++i) p.rankings.push_back({"b", "c", "a"});
  p.rankings.push_back({"c", "b", "a"});
  return p;
}

WillMatrix fn18_matrix(bool with_tiny) {
  std::vector<Participant> ps;
  for (int i = 0; i < 10; ++i)
    ps.push_back({"d" + std::to_string(i), {{"party", "D"}}});
  for (int i = 0; i < 20; ++i)
    ps.push_back({"r" + std::to_string(i), {{"party", "R"}}});
  std::vector<Statement> ss{{"A", "", {}, 0}, {"B", "", {}, 0}};
  if (with_tiny) ss.push_back({"tiny", "", {}, 0});
  std::vector<Vote> votes;
  for (int i = 0; i < 10; ++i) {
    votes.push_back({"d" + std::to_string(i), "A", i < 8 ? 1.0 : -1.0});
    votes.push_back({"d" + std::to_string(i), "B", i < 3 ? 1.0 : -1.0});
  }
  for (int i = 0; i < 20; ++i) {
    votes.push_back({"r" + std::to_string(i), "A", i < 2 ? 1.0 : -1.0});
    votes.push_back({"r" + std::to_string(i), "B", i < 7 ? 1.0 : -1.0});
  }
  if (with_tiny) {
    votes.push_back({"d0", "tiny", 1.0});
    votes.push_back({"r0", "tiny", 1.0});
  }
  return build_matrix(votes, ps, ss, Schema::ternary());
}

json reproduce_case(const std::string& case_id) {
  json report;
  report["case"] = case_id;
  if (case_id == "fn28") {
    auto profile = fn28_profile();
    auto p = plurality(profile);
    auto b = borda(profile);
    assert_eq("plurality winner", p.winner, "a");
    assert_eq("plurality score a", p.scores.at("a"), 4.0);
    assert_eq("borda winner", b.winner, "b");
    assert_eq("borda score a", b.scores.at("a"), 8.0);
    assert_eq("borda score b", b.scores.at("b"), 9.0);
    assert_eq("borda score c", b.scores.at("c"), 4.0);
    report["plurality"] = ballot_json(p);
    report["borda"] = ballot_json(b);
    report["note"] = "plurality and Borda disagree on the same profile";
  } else if (case_id == "fn29") {
    RankingProfile profile;
    profile.candidates = {"a", "b", "c"};
    profile.rankings = {{"a", "b", "c"}, {"b", "c", "a"}, {"c", "a", "b"}};
    auto c = condorcet(profile);
    assert_eq("cycle detected", c.cycle, true);
    assert_eq("no Condorcet winner", c.winner.has_value(), false);
    report["cycle"] = c.cycle;
    report["pairwise"] = pairwise_json(c.pairwise);
    report["note"] = "majority preference cycles: a>b, b>c, c>a";
  } else if (case_id == "fn13") {
    // Two groups of 10; 5/9 agree inside, 3/9 outside. The smoothed
    // probabilities come out 0.7 and 0.3; the paper-literal ratio is 3/7.
    std::vector<Participant> ps;
    for (int i = 0; i < 20; ++i) ps.push_back({"q" + std::to_string(i), {}});
    std::vector<Statement> ss{{"s", "", {}, 0}};
    OpinionGroups groups;
    groups.k = 2;
    for (int i = 0; i < 20; ++i)
      groups.assignment.push_back(i < 10 ? 0 : 1);
    std::vector<Vote> votes;
    for (int i = 0; i < 9; ++i)
      votes.push_back({"q" + std::to_string(i), "s", i < 5 ? 1.0 : -1.0});
    for (int i = 10; i < 19; ++i)
      votes.push_back({"q" + std::to_string(i), "s", i < 11 ? 1.0 : -1.0});
    auto m = build_matrix(votes, ps, ss, Schema::ternary());
    auto r = repness(m, groups, "s", 1.0, 0);
    assert_eq("N(g)", r.n_g, 5);
    assert_eq("T(g)", r.t_g, 9);
    assert_eq("P(g)", r.p_g, 0.7);
    assert_eq("P(g')", r.p_gprime, 0.3);
    assert_near("ratio", r.ratio, 3.0 / 7.0);
    json rep;
    rep["statement"] = r.statement;
    rep["group"] = r.group;
    rep["n_g"] = r.n_g;
    rep["t_g"] = r.t_g;
    rep["n_gprime"] = r.n_gprime;
    rep["t_gprime"] = r.t_gprime;
    rep["p_g"] = r.p_g;
    rep["p_gprime"] = r.p_gprime;
    rep["ratio"] = r.ratio;
    rep["anomaly"] = r.anomaly;
    report["repness"] = rep;
    report["note"] = "smoothed pseudo-probabilities (2+N)/(1+T) per group";
  } else if (case_id == "fn18") {
    auto ranking = bridging_minapproval(fn18_matrix(false), "party");
    assert_eq("top statement", ranking.ranking[0].statement, "B");
    assert_eq("B score", ranking.ranking[0].score, 0.30);
    assert_eq("A score", ranking.ranking[1].score, 0.10);
    json entries = json::array();
    for (const auto& e : ranking.ranking)
      entries.push_back({{"statement", e.statement},
                         {"score", e.score},
                         {"group_approval", e.group_approval}});
    report["group_names"] = ranking.group_names;
    report["ranking"] = entries;
    report["note"] =
        "B's minimum cross-group approval (0.30) beats A's (0.10)";
  } else if (case_id == "fn18-caveat") {
    auto ranking = bridging_minapproval(fn18_matrix(true), "party");
    assert_eq("top statement", ranking.ranking[0].statement, "tiny");
    assert_eq("tiny score", ranking.ranking[0].score, 1.0);
    json entries = json::array();
    for (const auto& e : ranking.ranking)
      entries.push_back({{"statement", e.statement},
                         {"score", e.score},
                         {"group_approval", e.group_approval}});
    report["ranking"] = entries;
    report["note"] =
        "one approving voter per group scores 1.0 and tops the ranking "
        "despite near-zero participation: the min-approval failure mode";
  } else {
    throw DomainError("BadSpec",
                      "unknown case " + case_id +
                          " (want fn13|fn18|fn28|fn29|fn18-caveat)");
  }
  return report;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"collective-judgment aggregation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Manifest manifest;
  for (int i = 0; i < argc; ++i) manifest.argv.push_back(argv[i]);

  Emit emit;

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate a synthetic population");
  struct {
    std::size_t n = 0, m = 0, d = 2;
    double density = 1.0, noise = 0.1, pass_band = 0.1, spread = 0.5;
    std::string clusters, out;
    std::uint64_t seed = 0;
  } sy;
  synth->add_option("--n", sy.n, "participant count")->required();
  synth->add_option("--m", sy.m, "statement count")->required();
  synth->add_option("--d", sy.d, "latent dimensions");
  synth->add_option("--density", sy.density, "vote density in (0,1]");
  synth->add_option("--clusters", sy.clusters, "e.g. \"2x100@(-1,0);(1,0)\"")
      ->required();
  synth->add_option("--noise", sy.noise, "agent noise scale");
  synth->add_option("--pass-band", sy.pass_band, "pass threshold band");
  synth->add_option("--spread", sy.spread, "cluster spread");
  synth->add_option("--seed", sy.seed, "random seed");
  synth->add_option("--out", sy.out, "output dataset directory")->required();

  // ---- ingest ----
  auto* ingest = app.add_subcommand("ingest", "load and summarize a dataset");
  std::string ingest_in;
  ingest->add_option("--in", ingest_in, "dataset directory")->required();

  // ---- cluster ----
  auto* cl = app.add_subcommand("cluster", "project and cluster participants");
  ClusterFlags clf;
  clf.attach(cl);

  // ---- repness ----
  auto* rep = app.add_subcommand("repness", "group representativeness");
  ClusterFlags repf;
  repf.attach(rep);
  struct {
    std::size_t group = 0;
    std::string statement, vote = "agree", orientation = "paper";
    bool no_pass_in_t = false;
  } rp;
  rep->add_option("--group", rp.group, "group index")->required();
  rep->add_option("--statement", rp.statement, "statement id")->required();
  rep->add_option("--vote", rp.vote, "agree|disagree|pass|<value>");
  rep->add_option("--orientation", rp.orientation, "paper|polis")
      ->check(CLI::IsMember({"paper", "polis"}));
  rep->add_flag("--no-pass-in-t", rp.no_pass_in_t,
                "exclude passes from the group tally T");

  // ---- consensus ----
  auto* cons = app.add_subcommand("consensus", "group-informed consensus");
  ClusterFlags consf;
  consf.attach(cons);
  bool cons_no_pass = false;
  cons->add_flag("--no-pass-in-t", cons_no_pass,
                 "exclude passes from group tallies");

  // ---- notes ----
  auto* notes = app.add_subcommand("notes", "latent factor model");
  notes->require_subcommand(1);
  auto* nfit = notes->add_subcommand("fit", "fit the factor model");
  struct {
    std::string in, out;
    double lambda_i = 0.15, lambda_f = 0.03;
    int epochs = 200;
    std::uint64_t seed = 0;
  } nf;
  nfit->add_option("--in", nf.in, "dataset directory")->required();
  nfit->add_option("--out", nf.out, "factors output file")->required();
  nfit->add_option("--lambda-i", nf.lambda_i, "intercept regularization");
  nfit->add_option("--lambda-f", nf.lambda_f, "factor regularization");
  nfit->add_option("--epochs", nf.epochs, "ALS sweep count");
  nfit->add_option("--seed", nf.seed, "random seed");
  auto* nstatus = notes->add_subcommand("status", "helpfulness statuses");
  struct {
    std::string factors, in;
    double threshold = 0.4, cap = 0.5;
  } ns;
  nstatus->add_option("--factors", ns.factors, "fitted factors file")
      ->required();
  nstatus->add_option("--in", ns.in, "dataset directory (for statement ids)");
  nstatus->add_option("--threshold", ns.threshold, "helpful intercept floor");
  nstatus->add_option("--cap", ns.cap, "polarity magnitude cap");

  // ---- bridge ----
  auto* bridge = app.add_subcommand("bridge", "min-approval bridging ranking");
  struct {
    std::string in, attr;
    bool no_pass = false;
  } br;
  bridge->add_option("--in", br.in, "dataset directory")->required();
  bridge->add_option("--attr", br.attr, "demographic attribute")->required();
  bridge->add_flag("--no-pass-in-denominator", br.no_pass,
                   "exclude passes from approval denominators");

  // ---- vote ----
  auto* vote = app.add_subcommand("vote", "ranked-ballot aggregation");
  struct {
    std::string rule, in;
  } vt;
  vote->add_option("--rule", vt.rule, "plurality|borda|condorcet|schulze")
      ->required()
      ->check(CLI::IsMember({"plurality", "borda", "condorcet", "schulze"}));
  vote->add_option("--in", vt.in, "rankings JSONL file")->required();

  // ---- slate ----
  auto* slate = app.add_subcommand("slate", "greedy n/k slate selection");
  struct {
    std::string utilities, pool, check = "none";
    std::size_t k = 0;
    double approve_above = 0.0;
  } sl;
  slate->add_option("--k", sl.k, "slate size")->required();
  slate->add_option("--utilities", sl.utilities, "dense utility JSONL")
      ->required();
  slate->add_option("--pool", sl.pool, "statements file (pool validation)");
  slate->add_option("--check", sl.check, "approval|rating|matched|none")
      ->check(CLI::IsMember({"approval", "rating", "matched", "none"}));
  slate->add_option("--approve-above", sl.approve_above,
                    "approval threshold on utilities");

  // ---- pipeline ----
  auto* pipe = app.add_subcommand("pipeline", "multi-round deliberation");
  struct {
    std::size_t rounds = 1, candidates = 5, top = 4;
    double eta = 0.3, predictor_noise = 0.0;
    std::uint64_t seed = 0;
    std::string world, trace;
  } pl;
  pipe->add_option("--rounds", pl.rounds, "round count");
  pipe->add_option("--candidates", pl.candidates, "candidates per round");
  pipe->add_option("--top", pl.top, "re-ranked candidate count");
  pipe->add_option("--eta", pl.eta, "revision step in [0,1]");
  pipe->add_option("--seed", pl.seed, "random seed");
  pipe->add_option("--world", pl.world, "world JSON file")->required();
  pipe->add_option("--trace", pl.trace, "trace output file")->required();
  pipe->add_option("--predictor-noise", pl.predictor_noise,
                   "Gaussian deviation on inferred scores");

  // ---- reproduce ----
  auto* repro = app.add_subcommand("reproduce", "run a named worked example");
  std::string case_id;
  repro->add_option("case", case_id, "fn13|fn18|fn28|fn29|fn18-caveat")
      ->required();

  // Global output flags on every subcommand.
  for (CLI::App* cmd : {synth, ingest, cl, rep, cons, nfit, nstatus, bridge,
                        vote, slate, pipe, repro}) {
    cmd->add_option("--report", emit.report_path, "write the JSON report here");
    cmd->add_flag("--pretty", emit.pretty, "human-readable table output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the offending flag / usage text
    return 2;
  }

  json report;
  std::string table;

  if (*synth) {
    manifest.command = "synth";
    manifest.seed = sy.seed;
    manifest.has_seed = true;
    WorldParams params{.n = sy.n, .m = sy.m, .d = sy.d,
                       .noise_scale = sy.noise, .pass_band = sy.pass_band};
    auto world = generate_world(params, parse_clusters(sy.clusters, sy.spread),
                                sy.seed);
    auto matrix = cast_votes(world, sy.density, sy.seed + 1);
    std::filesystem::create_directories(sy.out);
    save_dataset(matrix, sy.out);
    save_world(world, (std::filesystem::path(sy.out) / "world.json").string());
    manifest.output(sy.out);
    auto summary = summarize(matrix);
    report["n_participants"] = summary.n_participants;
    report["n_statements"] = summary.n_statements;
    report["n_votes"] = summary.n_votes;
    report["density"] = summary.density;
    table = "synthetic population\n" +
            table_line("participants", std::to_string(summary.n_participants)) +
            table_line("statements", std::to_string(summary.n_statements)) +
            table_line("votes", std::to_string(summary.n_votes));
  } else if (*ingest) {
    manifest.command = "ingest";
    manifest.input(ingest_in);
    auto matrix = load_dataset(ingest_in);
    auto summary = summarize(matrix);
    report["n_participants"] = summary.n_participants;
    report["n_statements"] = summary.n_statements;
    report["n_votes"] = summary.n_votes;
    report["density"] = summary.density;
    json tallies = json::array();
    table = "dataset summary\n";
    for (const auto& t : summary.tallies) {
      tallies.push_back({{"statement", t.statement},
                         {"agree", t.agree},
                         {"disagree", t.disagree},
                         {"pass", t.pass}});
      table += table_line(t.statement,
                          "+" + std::to_string(t.agree) + " -" +
                              std::to_string(t.disagree) + " =" +
                              std::to_string(t.pass));
    }
    report["tallies"] = tallies;
  } else if (*cl) {
    manifest.command = "cluster";
    manifest.seed = clf.seed;
    manifest.has_seed = true;
    manifest.input(clf.in_dir);
    auto matrix = load_dataset(clf.in_dir);
    Projection projection;
    auto groups = clf.run(matrix, &projection);
    report["projection"] = projection_json(projection);
    report["groups"] = groups_json(matrix, groups);
    table = "opinion groups\n" + table_line("k", std::to_string(groups.k)) +
            table_line("silhouette", std::to_string(groups.silhouette));
  } else if (*rep) {
    manifest.command = "repness";
    manifest.seed = repf.seed;
    manifest.has_seed = true;
    manifest.input(repf.in_dir);
    auto matrix = load_dataset(repf.in_dir);
    auto groups = repf.run(matrix);
    auto r = repness(matrix, groups, rp.statement, parse_vote_value(rp.vote),
                     rp.group, !rp.no_pass_in_t,
                     rp.orientation == "paper"
                         ? RepnessOrientation::PaperLiteral
                         : RepnessOrientation::Polis);
    report["statement"] = r.statement;
    report["group"] = r.group;
    report["vote_value"] = r.vote_value;
    report["n_g"] = r.n_g;
    report["t_g"] = r.t_g;
    report["n_gprime"] = r.n_gprime;
    report["t_gprime"] = r.t_gprime;
    report["p_g"] = r.p_g;
    report["p_gprime"] = r.p_gprime;
    report["ratio"] = r.ratio;
    report["anomaly"] = r.anomaly;
    table = "representativeness\n" +
            table_line("P(g)", std::to_string(r.p_g)) +
            table_line("P(g')", std::to_string(r.p_gprime)) +
            table_line("ratio", std::to_string(r.ratio));
  } else if (*cons) {
    manifest.command = "consensus";
    manifest.seed = consf.seed;
    manifest.has_seed = true;
    manifest.input(consf.in_dir);
    auto matrix = load_dataset(consf.in_dir);
    auto groups = consf.run(matrix);
    auto ranking = group_informed_consensus(matrix, groups, !cons_no_pass);
    json entries = json::array();
    table = "group-informed consensus\n";
    for (const auto& e : ranking.ranking) {
      entries.push_back({{"statement", e.statement}, {"score", e.score}});
      table += table_line(e.statement, std::to_string(e.score));
    }
    report["k"] = groups.k;
    report["ranking"] = entries;
    report["unvoted"] = ranking.unvoted;
  } else if (*nfit) {
    manifest.command = "notes fit";
    manifest.seed = nf.seed;
    manifest.has_seed = true;
    manifest.input(nf.in);
    auto matrix = load_dataset(nf.in);
    FitOptions opts;
    opts.lambda_intercept = nf.lambda_i;
    opts.lambda_factor = nf.lambda_f;
    opts.epochs = nf.epochs;
    opts.seed = nf.seed;
    auto [factors, fit_report] = fit(matrix, opts);
    save_factors(factors, nf.out);
    manifest.output(nf.out);
    report["objective"] = fit_report.objective;
    report["sweeps"] = fit_report.trace.size();
    report["mu"] = factors.mu;
    table = "factor fit\n" +
            table_line("objective", std::to_string(fit_report.objective)) +
            table_line("sweeps", std::to_string(fit_report.trace.size()));
  } else if (*nstatus) {
    manifest.command = "notes status";
    manifest.input(ns.factors);
    auto factors = load_factors(ns.factors);
    std::vector<std::string> ids;
    if (!ns.in.empty()) {
      manifest.input(ns.in);
      auto matrix = load_dataset(ns.in);
      for (const auto& s : matrix.statements()) ids.push_back(s.id);
    } else {
      for (std::size_t i = 0; i < factors.item_intercepts.size(); ++i)
        ids.push_back("item" + std::to_string(i));
    }
    if (ids.size() != factors.item_intercepts.size())
      throw DomainError("SchemaViolation",
                        "dataset statement count does not match factors");
    auto statuses = helpfulness_status(factors, ns.threshold, ns.cap);
    json entries = json::array();
    table = "note statuses\n";
    for (std::size_t i = 0; i < statuses.size(); ++i) {
      const char* s = statuses[i] == NoteStatus::Helpful ? "helpful"
                      : statuses[i] == NoteStatus::NotHelpful
                          ? "not_helpful"
                          : "needs_more_ratings";
      entries.push_back({{"statement", ids[i]},
                         {"status", s},
                         {"intercept", factors.item_intercepts[i]},
                         {"polarity", factors.item_factors[i]}});
      table += table_line(ids[i], s);
    }
    report["threshold"] = ns.threshold;
    report["cap"] = ns.cap;
    report["statuses"] = entries;
  } else if (*bridge) {
    manifest.command = "bridge";
    manifest.input(br.in);
    auto matrix = load_dataset(br.in);
    auto ranking = bridging_minapproval(matrix, br.attr, !br.no_pass);
    json entries = json::array();
    table = "min-approval bridging (" + br.attr + ")\n";
    for (const auto& e : ranking.ranking) {
      entries.push_back({{"statement", e.statement},
                         {"score", e.score},
                         {"group_approval", e.group_approval}});
      table += table_line(e.statement, std::to_string(e.score));
    }
    report["attribute"] = br.attr;
    report["group_names"] = ranking.group_names;
    report["ranking"] = entries;
    report["unranked"] = ranking.unranked;
  } else if (*vote) {
    manifest.command = "vote";
    manifest.input(vt.in);
    auto profile = load_rankings(vt.in);
    report["rule"] = vt.rule;
    if (vt.rule == "plurality" || vt.rule == "borda") {
      auto r = vt.rule == "plurality" ? plurality(profile) : borda(profile);
      report["result"] = ballot_json(r);
      report["pairwise"] = pairwise_json(pairwise(profile));
      table = vt.rule + "\n" + table_line("winner", r.winner);
      for (const auto& [cand, score] : r.scores)
        table += table_line(cand, std::to_string(score));
    } else if (vt.rule == "condorcet") {
      auto r = condorcet(profile);
      report["winner"] = r.winner ? json(*r.winner) : json();
      report["cycle"] = r.cycle;
      report["pairwise"] = pairwise_json(r.pairwise);
      table = "condorcet\n" +
              table_line("winner", r.winner ? *r.winner : "(none)") +
              table_line("cycle", r.cycle ? "yes" : "no");
    } else {
      auto r = schulze(profile);
      report["result"] = ballot_json(r.result);
      report["pairwise"] = pairwise_json(r.pairwise);
      report["strength"] = r.strength;
      table = "schulze\n" + table_line("winner", r.result.winner) +
              table_line("tie", r.result.tie ? "yes" : "no");
    }
  } else if (*slate) {
    manifest.command = "slate";
    manifest.input(sl.utilities);
    auto utilities = load_utilities(sl.utilities);
    if (!sl.pool.empty()) {
      manifest.input(sl.pool);
      // Pool file validation: every pool statement must have utilities.
      std::ifstream f(sl.pool);
      if (!f) throw DomainError("IoError", "cannot open " + sl.pool);
      std::string line;
      while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded())
          throw DomainError("ParseError", "malformed JSON in " + sl.pool);
        const auto id = j.at("id").get<std::string>();
        if (std::find(utilities.pool.begin(), utilities.pool.end(), id) ==
            utilities.pool.end())
          throw DomainError("UnknownId", "pool statement " + id +
                                             " missing from utilities");
      }
    }
    auto result = greedy_slate(utilities, sl.k);
    report["k"] = sl.k;
    report["selected"] = result.selected;
    report["matched"] = result.matched;
    report["unmatched"] = result.unmatched;
    if (sl.check == "approval") {
      std::vector<std::vector<bool>> approvals(
          utilities.n(), std::vector<bool>(utilities.m(), false));
      for (std::size_t p = 0; p < utilities.n(); ++p)
        for (std::size_t s = 0; s < utilities.m(); ++s)
          approvals[p][s] = utilities.utilities[p][s] > sl.approve_above;
      auto v = jr_check_approval(approvals, utilities.participants,
                                 utilities.pool, result.selected, sl.k);
      json check;
      check["kind"] = "approval";
      check["satisfied"] = v.satisfied;
      if (v.witness)
        check["witness"] = {{"candidate", v.witness->candidate},
                            {"group", v.witness->group}};
      report["check"] = check;
    } else if (sl.check == "rating") {
      auto v = jr_check_rating(utilities, result.selected, sl.k);
      json check;
      check["kind"] = "rating";
      check["satisfied"] = v.satisfied;
      if (v.witness)
        check["witness"] = {{"candidate", v.witness->candidate},
                            {"group", v.witness->group}};
      report["check"] = check;
    } else if (sl.check == "matched") {
      auto v = matched_jr_check(result, utilities);
      json check;
      check["kind"] = "matched";
      check["satisfied"] = v.satisfied;
      json slacks = json::array();
      for (const auto& r : v.report)
        slacks.push_back({{"participant", r.participant},
                          {"statement", r.matched_statement},
                          {"slack", r.slack}});
      check["slacks"] = slacks;
      report["check"] = check;
    }
    table = "slate (k=" + std::to_string(sl.k) + ")\n";
    for (const auto& s : result.selected) table += table_line("selected", s);
  } else if (*pipe) {
    manifest.command = "pipeline";
    manifest.seed = pl.seed;
    manifest.has_seed = true;
    manifest.input(pl.world);
    auto world = load_world(pl.world);
    RoundConfig cfg{.n_candidates = pl.candidates, .top_m = pl.top,
                    .eta = pl.eta, .rounds = pl.rounds, .seed = pl.seed};
    auto predictor = pl.predictor_noise > 0.0
                         ? noisy_predictor(pl.predictor_noise, pl.seed)
                         : exact_predictor();
    auto trace = run_pipeline(world, cfg, default_generator(), predictor);
    save_trace(trace, pl.trace);
    manifest.output(pl.trace);
    json rounds = json::array();
    table = "pipeline\n";
    for (const auto& r : trace.rounds) {
      rounds.push_back({{"round", r.round},
                        {"winner", r.winner},
                        {"dispersion_before", r.dispersion_before},
                        {"dispersion_after", r.dispersion_after}});
      table += table_line("round " + std::to_string(r.round),
                          r.winner + "  dispersion " +
                              std::to_string(r.dispersion_after));
    }
    report["rounds"] = rounds;
    report["trace_file"] = pl.trace;
  } else if (*repro) {
    manifest.command = "reproduce";
    report = reproduce_case(case_id);
    table = "reproduce " + case_id + ": all assertions hold\n";
  }

  emit(report, manifest, table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const agora::DomainError& e) {
    json err;
    err["error"] = e.name();
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    json err;
    err["error"] = "Internal";
    err["message"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
