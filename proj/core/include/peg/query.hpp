#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "peg/model.hpp"
#include "peg/store.hpp"

namespace peg {

struct Variable {
  std::string name;  // without the leading '?'

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using PatternTerm = std::variant<Variable, Iri, Literal>;

struct TriplePattern {
  PatternTerm s;
  PatternTerm p;
  PatternTerm o;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

struct Query {
  std::vector<std::string> select;        // projected variables, in order
  bool distinct = false;
  std::optional<std::string> count_var;   // set for SELECT COUNT(DISTINCT ?v)
  std::vector<TriplePattern> patterns;

  bool is_count() const noexcept { return count_var.has_value(); }
};

// Grammar (keywords case-insensitive, '#' starts a comment):
//   query   := SELECT ( DISTINCT? var+ | COUNT '(' DISTINCT var ')' )
//              WHERE '{' pattern ( '.' pattern )* '.'? '}'
//   pattern := term term term
//   term    := ?name | prefix:local | <absolute-iri> | a | "literal" ( ^^datatype )?
// Prefixes come from the fixed table; there are no PREFIX declarations.
// Throws QuerySyntaxError, UnboundSelectVariable, DisconnectedPattern.
Query parse_query(std::string_view text);

struct QueryResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Term>> rows;  // sorted
  std::optional<std::size_t> count;
};

// Pattern indexes in evaluation order: fewest matching triples first, then
// the cheapest pattern sharing a variable with those already placed.
std::vector<std::size_t> join_order(const TripleStore& store, const Query& query);

QueryResult evaluate(const TripleStore& store, const Query& query);

// IRIs in prefixed form, literals as their lexical form.
std::string render_term(const Term& term);

// Count queries: the integer followed by '\n'. Otherwise CSV with a header of
// variable names and rows sorted lexicographically.
std::string format_result(const QueryResult& result);

}  // namespace peg
