#ifndef SBCN_CNF_HPP
#define SBCN_CNF_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sbcn/dataset.hpp"

namespace sbcn {

struct Literal {
  std::size_t event = 0;
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

// Conjunction of disjunctive clauses over event indices.
class CnfFormula {
 public:
  // At least one clause, no empty clause, no duplicate literal in a clause.
  explicit CnfFormula(std::vector<Clause> clauses);

  const std::vector<Clause>& clauses() const noexcept { return clauses_; }
  std::size_t max_event() const noexcept { return max_event_; }
  // Sorted, unique event indices mentioned by any literal.
  std::vector<std::size_t> events() const;

  bool operator==(const CnfFormula&) const = default;

 private:
  std::vector<Clause> clauses_;
  std::size_t max_event_ = 0;
};

struct NamedFormula {
  std::string name;
  CnfFormula formula;
};

// Standard CNF semantics on a full assignment. Throws IndexError when a
// literal refers past the end of the assignment.
int eval_cnf(const CnfFormula& formula, std::span<const std::uint8_t> assignment);

// Appends one column per formula evaluated row-wise. Original columns are
// untouched.
Dataset lift_dataset(const Dataset& data, std::span<const NamedFormula> formulas);

// Renders with event names, e.g. "(A | B) & (!A | !B)".
std::string to_string(const CnfFormula& formula,
                      const std::vector<std::string>& event_names);

// One formula per line: "<name> = <cnf>", where <cnf> is a '&'-separated list
// of clauses, each a literal or a parenthesised '|' disjunction of literals,
// and a literal is an event name optionally prefixed by '!'. A bare
// disjunction without '&' is accepted as a single clause. Blank lines and
// '#' comments are ignored.
std::vector<NamedFormula> parse_formulas(std::string_view text,
                                         const std::vector<std::string>& event_names);

}  // namespace sbcn

#endif
