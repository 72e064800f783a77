#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace agora {

struct Participant {
  std::string id;
  std::map<std::string, std::string> demographics;
};

struct Statement {
  std::string id;
  std::string text;
  std::optional<std::string> author;
  int round = 0;
};

struct Vote {
  std::string participant;
  std::string statement;
  double value = 0.0;
};

struct Schema {
  enum class Kind { Ternary, Rating };
  Kind kind = Kind::Ternary;
  double min = -1.0;
  double max = 1.0;

  bool is_ternary() const { return kind == Kind::Ternary; }
  bool allows(double v) const;

  static Schema ternary() { return {Kind::Ternary, -1.0, 1.0}; }
  static Schema rating(double lo, double hi) { return {Kind::Rating, lo, hi}; }
};

// Sparse participant x statement matrix of votes. Immutable after
// construction; a pass (0) is a real entry, distinct from a missing one.
class WillMatrix {
 public:
  WillMatrix(std::vector<Participant> participants,
             std::vector<Statement> statements, Schema schema);

  std::size_t n_participants() const { return participants_.size(); }
  std::size_t n_statements() const { return statements_.size(); }
  std::size_t n_votes() const { return entries_.size(); }
  double density() const;

  const std::vector<Participant>& participants() const { return participants_; }
  const std::vector<Statement>& statements() const { return statements_; }
  const Schema& schema() const { return schema_; }

  // Entries keyed (row, col), iterated in row-major order.
  const std::map<std::pair<std::size_t, std::size_t>, double>& entries() const {
    return entries_;
  }

  std::optional<double> value(std::size_t row, std::size_t col) const;

  std::size_t row_of(const std::string& participant_id) const;
  std::size_t col_of(const std::string& statement_id) const;
  bool has_participant(const std::string& id) const;
  bool has_statement(const std::string& id) const;

  bool operator==(const WillMatrix& other) const;

 private:
  friend WillMatrix build_matrix(const std::vector<Vote>&,
                                 std::vector<Participant>,
                                 std::vector<Statement>, Schema);

  std::vector<Participant> participants_;
  std::vector<Statement> statements_;
  Schema schema_;
  std::map<std::pair<std::size_t, std::size_t>, double> entries_;
  std::unordered_map<std::string, std::size_t> row_index_;
  std::unordered_map<std::string, std::size_t> col_index_;
};

struct StatementTally {
  std::string statement;
  std::size_t agree = 0;
  std::size_t disagree = 0;
  std::size_t pass = 0;
  std::size_t total() const { return agree + disagree + pass; }
};

struct DatasetSummary {
  std::size_t n_participants = 0;
  std::size_t n_statements = 0;
  std::size_t n_votes = 0;
  double density = 0.0;
  std::vector<StatementTally> tallies;  // one per statement, input order
};

// Errors: UnknownId, DuplicateVote (conflicting values only; identical
// duplicates are dropped), SchemaViolation.
WillMatrix build_matrix(const std::vector<Vote>& votes,
                        std::vector<Participant> participants,
                        std::vector<Statement> statements, Schema schema);

DatasetSummary summarize(const WillMatrix& matrix);

// JSONL dataset directory: votes.jsonl (header line declares the schema),
// statements.jsonl, optional participants.jsonl.
WillMatrix load_dataset(const std::string& dir);
void save_dataset(const WillMatrix& matrix, const std::string& dir);

}  // namespace agora
