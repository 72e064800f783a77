#include "agora/core.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "agora/error.hpp"
#include "json.hpp"

namespace agora {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

bool Schema::allows(double v) const {
  if (kind == Kind::Ternary) return v == -1.0 || v == 0.0 || v == 1.0;
  return std::isfinite(v) && v >= min && v <= max;
}

WillMatrix::WillMatrix(std::vector<Participant> participants,
                       std::vector<Statement> statements, Schema schema)
    : participants_(std::move(participants)),
      statements_(std::move(statements)),
      schema_(schema) {
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    auto [it, fresh] = row_index_.emplace(participants_[i].id, i);
    if (!fresh)
      throw DomainError("DuplicateId",
                        "participant id repeated: " + participants_[i].id);
  }
  for (std::size_t j = 0; j < statements_.size(); ++j) {
    auto [it, fresh] = col_index_.emplace(statements_[j].id, j);
    if (!fresh)
      throw DomainError("DuplicateId",
                        "statement id repeated: " + statements_[j].id);
  }
}

double WillMatrix::density() const {
  const std::size_t cells = participants_.size() * statements_.size();
  return cells == 0 ? 0.0 : static_cast<double>(entries_.size()) / cells;
}

std::optional<double> WillMatrix::value(std::size_t row, std::size_t col) const {
  auto it = entries_.find({row, col});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::size_t WillMatrix::row_of(const std::string& participant_id) const {
  auto it = row_index_.find(participant_id);
  if (it == row_index_.end())
    throw DomainError("UnknownId", "participant not found: " + participant_id);
  return it->second;
}

std::size_t WillMatrix::col_of(const std::string& statement_id) const {
  auto it = col_index_.find(statement_id);
  if (it == col_index_.end())
    throw DomainError("UnknownId", "statement not found: " + statement_id);
  return it->second;
}

bool WillMatrix::has_participant(const std::string& id) const {
  return row_index_.count(id) > 0;
}

bool WillMatrix::has_statement(const std::string& id) const {
  return col_index_.count(id) > 0;
}

bool WillMatrix::operator==(const WillMatrix& other) const {
  if (schema_.kind != other.schema_.kind || schema_.min != other.schema_.min ||
      schema_.max != other.schema_.max)
    return false;
  if (entries_ != other.entries_) return false;
  if (participants_.size() != other.participants_.size() ||
      statements_.size() != other.statements_.size())
    return false;
  for (std::size_t i = 0; i < participants_.size(); ++i) {
    if (participants_[i].id != other.participants_[i].id ||
        participants_[i].demographics != other.participants_[i].demographics)
      return false;
  }
  for (std::size_t j = 0; j < statements_.size(); ++j) {
    const auto& a = statements_[j];
    const auto& b = other.statements_[j];
    if (a.id != b.id || a.text != b.text || a.author != b.author ||
        a.round != b.round)
      return false;
  }
  return true;
}

WillMatrix build_matrix(const std::vector<Vote>& votes,
                        std::vector<Participant> participants,
                        std::vector<Statement> statements, Schema schema) {
  WillMatrix m(std::move(participants), std::move(statements), schema);
  for (const auto& v : votes) {
    if (!schema.allows(v.value)) {
      std::ostringstream os;
      os << "vote value " << v.value << " outside schema bounds";
      throw DomainError("SchemaViolation", os.str());
    }
    const std::size_t row = m.row_of(v.participant);
    const std::size_t col = m.col_of(v.statement);
    auto [it, fresh] = m.entries_.emplace(std::make_pair(row, col), v.value);
    if (!fresh && it->second != v.value)
      throw DomainError("DuplicateVote",
                        "conflicting votes for (" + v.participant + ", " +
                            v.statement + ")");
  }
  return m;
}

DatasetSummary summarize(const WillMatrix& matrix) {
  DatasetSummary s;
  s.n_participants = matrix.n_participants();
  s.n_statements = matrix.n_statements();
  s.n_votes = matrix.n_votes();
  s.density = matrix.density();
  s.tallies.resize(matrix.n_statements());
  for (std::size_t j = 0; j < matrix.n_statements(); ++j)
    s.tallies[j].statement = matrix.statements()[j].id;
  for (const auto& [key, value] : matrix.entries()) {
    auto& t = s.tallies[key.second];
    if (value > 0)
      ++t.agree;
    else if (value < 0)
      ++t.disagree;
    else
      ++t.pass;
  }
  return s;
}

namespace {

json parse_line(const std::string& line, const std::string& file, int lineno) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) {
    std::ostringstream os;
    os << "malformed JSON in " << file << " at line " << lineno;
    throw DomainError("ParseError", os.str());
  }
  return j;
}

}  // namespace

WillMatrix load_dataset(const std::string& dir) {
  const fs::path base(dir);
  const fs::path votes_path = base / "votes.jsonl";
  const fs::path stmts_path = base / "statements.jsonl";
  const fs::path parts_path = base / "participants.jsonl";

  std::ifstream sf(stmts_path);
  if (!sf) throw DomainError("IoError", "cannot open " + stmts_path.string());
  std::vector<Statement> statements;
  std::string line;
  int lineno = 0;
  while (std::getline(sf, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, stmts_path.string(), lineno);
    Statement st;
    st.id = j.at("id").get<std::string>();
    st.text = j.value("text", std::string());
    if (j.contains("author") && !j["author"].is_null())
      st.author = j["author"].get<std::string>();
    st.round = j.value("round", 0);
    statements.push_back(std::move(st));
  }

  std::vector<Participant> participants;
  bool have_participants = false;
  if (fs::exists(parts_path)) {
    have_participants = true;
    std::ifstream pf(parts_path);
    lineno = 0;
    while (std::getline(pf, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j = parse_line(line, parts_path.string(), lineno);
      Participant p;
      p.id = j.at("id").get<std::string>();
      if (j.contains("demographics"))
        for (auto& [k, v] : j["demographics"].items())
          p.demographics[k] = v.get<std::string>();
      participants.push_back(std::move(p));
    }
  }

  std::ifstream vf(votes_path);
  if (!vf) throw DomainError("IoError", "cannot open " + votes_path.string());
  lineno = 0;
  Schema schema = Schema::ternary();
  bool have_schema = false;
  std::vector<Vote> votes;
  while (std::getline(vf, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = parse_line(line, votes_path.string(), lineno);
    if (!have_schema) {
      if (!j.contains("schema")) {
        std::ostringstream os;
        os << "first line of " << votes_path.string()
           << " must declare the schema";
        throw DomainError("ParseError", os.str());
      }
      const std::string kind = j["schema"].get<std::string>();
      if (kind == "ternary") {
        schema = Schema::ternary();
      } else if (kind == "rating") {
        schema = Schema::rating(j.at("min").get<double>(),
                                j.at("max").get<double>());
      } else {
        throw DomainError("ParseError", "unknown schema kind: " + kind);
      }
      have_schema = true;
      continue;
    }
    Vote v;
    v.participant = j.at("participant").get<std::string>();
    v.statement = j.at("statement").get<std::string>();
    v.value = j.at("value").get<double>();
    votes.push_back(std::move(v));
  }
  if (!have_schema)
    throw DomainError("ParseError",
                      votes_path.string() + " is empty (no schema header)");

  if (!have_participants) {
    // No participants file: synthesize rows from the vote stream, first
    // appearance order.
    std::unordered_map<std::string, bool> seen;
    for (const auto& v : votes) {
      if (!seen.count(v.participant)) {
        seen[v.participant] = true;
        participants.push_back(Participant{v.participant, {}});
      }
    }
  }

  return build_matrix(votes, std::move(participants), std::move(statements),
                      schema);
}

void save_dataset(const WillMatrix& matrix, const std::string& dir) {
  const fs::path base(dir);
  fs::create_directories(base);

  {
    std::ofstream sf(base / "statements.jsonl");
    for (const auto& st : matrix.statements()) {
      json j;
      j["id"] = st.id;
      j["text"] = st.text;
      if (st.author)
        j["author"] = *st.author;
      else
        j["author"] = nullptr;
      j["round"] = st.round;
      sf << j.dump() << "\n";
    }
  }
  {
    std::ofstream pf(base / "participants.jsonl");
    for (const auto& p : matrix.participants()) {
      json j;
      j["id"] = p.id;
      json demo = json::object();
      for (const auto& [k, v] : p.demographics) demo[k] = v;
      j["demographics"] = demo;
      pf << j.dump() << "\n";
    }
  }
  {
    std::ofstream vf(base / "votes.jsonl");
    json header;
    if (matrix.schema().is_ternary()) {
      header["schema"] = "ternary";
    } else {
      header["schema"] = "rating";
      header["min"] = matrix.schema().min;
      header["max"] = matrix.schema().max;
    }
    vf << header.dump() << "\n";
    for (const auto& [key, value] : matrix.entries()) {
      json j;
      j["participant"] = matrix.participants()[key.first].id;
      j["statement"] = matrix.statements()[key.second].id;
      j["value"] = value;
      vf << j.dump() << "\n";
    }
  }
}

}  // namespace agora
