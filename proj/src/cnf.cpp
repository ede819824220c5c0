#include "sbcn/cnf.hpp"

#include <algorithm>
#include <cctype>

#include "sbcn/error.hpp"

namespace sbcn {

CnfFormula::CnfFormula(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {
  if (clauses_.empty()) throw InvalidArgument("CNF formula needs at least one clause");
  for (const auto& clause : clauses_) {
    if (clause.empty()) throw InvalidArgument("CNF clause needs at least one literal");
    for (std::size_t a = 0; a < clause.size(); ++a) {
      max_event_ = std::max(max_event_, clause[a].event);
      for (std::size_t b = a + 1; b < clause.size(); ++b) {
        if (clause[a] == clause[b]) throw InvalidArgument("duplicate literal in CNF clause");
      }
    }
  }
}

std::vector<std::size_t> CnfFormula::events() const {
  std::vector<std::size_t> out;
  for (const auto& clause : clauses_) {
    for (const auto& lit : clause) out.push_back(lit.event);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int eval_cnf(const CnfFormula& formula, std::span<const std::uint8_t> assignment) {
  if (formula.max_event() >= assignment.size()) {
    throw IndexError("literal refers to event " + std::to_string(formula.max_event()) +
                     " but the assignment has " + std::to_string(assignment.size()));
  }
  for (const auto& clause : formula.clauses()) {
    bool satisfied = false;
    for (const auto& lit : clause) {
      if ((assignment[lit.event] != 0) != lit.negated) {
        satisfied = true;
        break;
      }
    }
    if (!satisfied) return 0;
  }
  return 1;
}

Dataset lift_dataset(const Dataset& data, std::span<const NamedFormula> formulas) {
  if (formulas.empty()) return data;
  std::vector<std::string> names;
  std::vector<Dataset::Column> columns;
  for (const auto& f : formulas) {
    if (f.formula.max_event() >= data.event_count()) {
      throw IndexError("formula '" + f.name + "' refers to event " +
                       std::to_string(f.formula.max_event()) + " outside the dataset");
    }
    if (std::find(names.begin(), names.end(), f.name) != names.end()) {
      throw SchemaError("duplicate formula name '" + f.name + "'");
    }
    Dataset::Column col(data.sample_count());
    for (std::size_t r = 0; r < data.sample_count(); ++r) {
      bool all = true;
      for (const auto& clause : f.formula.clauses()) {
        bool any = false;
        for (const auto& lit : clause) {
          if ((data.column(lit.event)[r] != 0) != lit.negated) {
            any = true;
            break;
          }
        }
        if (!any) {
          all = false;
          break;
        }
      }
      col[r] = all ? 1 : 0;
    }
    names.push_back(f.name);
    columns.push_back(std::move(col));
  }
  return data.with_columns(std::move(names), std::move(columns));
}

std::string to_string(const CnfFormula& formula, const std::vector<std::string>& event_names) {
  std::string out;
  for (std::size_t c = 0; c < formula.clauses().size(); ++c) {
    const auto& clause = formula.clauses()[c];
    if (c > 0) out += " & ";
    if (clause.size() > 1) out += '(';
    for (std::size_t k = 0; k < clause.size(); ++k) {
      if (k > 0) out += " | ";
      if (clause[k].negated) out += '!';
      const auto v = clause[k].event;
      out += v < event_names.size() ? event_names[v] : "#" + std::to_string(v);
    }
    if (clause.size() > 1) out += ')';
  }
  return out;
}

namespace {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const std::vector<std::string>& names, std::size_t line)
      : text_(text), names_(names), line_(line) {}

  CnfFormula parse() {
    std::vector<Clause> clauses;
    bool saw_and = false;
    bool bare_disjunction = false;
    while (true) {
      skip_space();
      if (peek() == '(') {
        ++pos_;
        clauses.push_back(parse_disjunction());
        skip_space();
        expect(')');
      } else {
        Clause clause{parse_literal()};
        skip_space();
        while (peek() == '|') {
          ++pos_;
          clause.push_back(parse_literal());
          bare_disjunction = true;
          skip_space();
        }
        clauses.push_back(std::move(clause));
      }
      skip_space();
      if (peek() == '&') {
        ++pos_;
        saw_and = true;
        continue;
      }
      break;
    }
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    if (saw_and && bare_disjunction) fail("disjunctions must be parenthesised when combined with '&'");
    try {
      return CnfFormula(std::move(clauses));
    } catch (const InvalidArgument& e) {
      fail(e.what());
    }
  }

 private:
  Clause parse_disjunction() {
    Clause clause{parse_literal()};
    skip_space();
    while (peek() == '|') {
      ++pos_;
      clause.push_back(parse_literal());
      skip_space();
    }
    return clause;
  }

  Literal parse_literal() {
    skip_space();
    bool negated = false;
    while (peek() == '!') {
      negated = !negated;
      ++pos_;
      skip_space();
    }
    const auto begin = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    if (begin == pos_) fail("expected an event name");
    const auto name = text_.substr(begin, pos_ - begin);
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) fail("unknown event '" + std::string(name) + "'");
    return {static_cast<std::size_t>(it - names_.begin()), negated};
  }

  static bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' ||
           c == ':' || c == '+' || c == '/';
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("formula line " + std::to_string(line_) + ": " + what, line_, "");
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<NamedFormula> parse_formulas(std::string_view text,
                                         const std::vector<std::string>& event_names) {
  std::vector<NamedFormula> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                 : end - start);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError("formula line " + std::to_string(line_no) + ": expected '<name> = <cnf>'",
                         line_no, "");
      }
      const auto name = trim(line.substr(0, eq));
      if (name.empty()) {
        throw ParseError("formula line " + std::to_string(line_no) + ": empty formula name",
                         line_no, "");
      }
      for (const auto& f : out) {
        if (f.name == name) {
          throw SchemaError("duplicate formula name '" + std::string(name) + "'");
        }
      }
      FormulaParser parser(line.substr(eq + 1), event_names, line_no);
      out.push_back({std::string(name), parser.parse()});
    }
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace sbcn
