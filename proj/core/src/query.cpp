#include "peg/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <set>

#include "peg/errors.hpp"
#include "peg/table.hpp"
#include "peg/text.hpp"

namespace peg {

namespace {

constexpr std::string_view kXsdBase = "http://www.w3.org/2001/XMLSchema#";

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || u >= 0x80;
}

bool is_delim(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '{' || c == '}' || c == '(' ||
         c == ')' || c == '#';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : src_(text) {}

  Query parse() {
    Query q;
    expect_keyword("SELECT");
    if (accept_keyword("COUNT")) {
      expect_char('(');
      expect_keyword("DISTINCT");
      skip_ws();
      q.count_var = parse_variable_name();
      q.select.push_back(*q.count_var);
      expect_char(')');
    } else {
      q.distinct = accept_keyword("DISTINCT");
      skip_ws();
      while (peek() == '?' || peek() == '$') {
        const std::size_t at = pos_;
        std::string name = parse_variable_name();
        if (std::find(q.select.begin(), q.select.end(), name) != q.select.end()) {
          fail(at, "duplicate variable ?" + name + " in SELECT");
        }
        q.select.push_back(std::move(name));
        skip_ws();
      }
      if (q.select.empty()) fail(pos_, "expected a variable or COUNT after SELECT");
    }
    expect_keyword("WHERE");
    expect_char('{');
    skip_ws();
    while (peek() != '}') {
      if (at_end()) fail(pos_, "unterminated WHERE block");
      TriplePattern tp{parse_term(false), parse_term(true), parse_term(false)};
      q.patterns.push_back(std::move(tp));
      skip_ws();
      if (peek() == '.') {
        ++pos_;
        skip_ws();
      } else if (peek() != '}') {
        fail(pos_, "expected '.' or '}' after triple pattern");
      }
    }
    ++pos_;
    skip_ws();
    if (!at_end()) fail(pos_, "unexpected text after '}'");
    return q;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& what) const {
    throw QuerySyntaxError(at, what);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }

  void skip_ws() {
    while (!at_end()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (!at_end() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool accept_keyword(std::string_view kw) {
    skip_ws();
    if (src_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(src_[pos_ + i])) != kw[i]) return false;
    }
    const std::size_t after = pos_ + kw.size();
    if (after < src_.size() && is_name_char(src_[after])) return false;
    pos_ = after;
    return true;
  }

  void expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) fail(pos_, "expected " + std::string(kw));
  }

  void expect_char(char c) {
    skip_ws();
    if (peek() != c) fail(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string parse_variable_name() {
    const std::size_t start = pos_;
    if (peek() != '?' && peek() != '$') fail(pos_, "expected a variable");
    ++pos_;
    while (!at_end() && is_name_char(src_[pos_])) ++pos_;
    if (pos_ == start + 1) fail(start, "empty variable name");
    return std::string(src_.substr(start + 1, pos_ - start - 1));
  }

  PatternTerm parse_term(bool predicate) {
    skip_ws();
    const std::size_t start = pos_;
    if (at_end() || peek() == '}' || peek() == '.') fail(pos_, "expected a term");
    const char c = peek();
    if (c == '?' || c == '$') return Variable{parse_variable_name()};
    if (c == '<') return parse_absolute_iri();
    if (c == '"') {
      if (predicate) fail(start, "a literal cannot be a predicate");
      return parse_literal();
    }
    std::string word = read_word();
    if (word == "a") {
      if (!predicate) fail(start, "'a' is only allowed as a predicate");
      return vocab::rdf_type();
    }
    return resolve_prefixed(word, start);
  }

  // Reads up to a delimiter; a final '.' terminates the pattern instead.
  std::string read_word() {
    const std::size_t start = pos_;
    while (!at_end() && !is_delim(src_[pos_]) && src_[pos_] != '"' && src_[pos_] != '<') ++pos_;
    if (pos_ > start && src_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail(start, "unexpected character");
    return std::string(src_.substr(start, pos_ - start));
  }

  Iri resolve_prefixed(const std::string& word, std::size_t at) const {
    const auto colon = word.find(':');
    if (colon == std::string::npos) fail(at, "expected a prefixed name, got '" + word + "'");
    const auto ns = namespace_from_label(word.substr(0, colon));
    if (!ns) fail(at, "unknown prefix '" + word.substr(0, colon) + "'");
    const std::string local = word.substr(colon + 1);
    try {
      return Iri(*ns, local);
    } catch (const ModelError& e) {
      fail(at, e.what());
    }
  }

  Iri parse_absolute_iri() {
    const std::size_t start = pos_;
    const auto close = src_.find('>', pos_);
    if (close == std::string_view::npos) fail(start, "unterminated IRI");
    const std::string_view body = src_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    auto iri = Iri::from_absolute(body);
    if (!iri) fail(start, "IRI outside the fixed prefix table: <" + std::string(body) + ">");
    return *iri;
  }

  Literal parse_literal() {
    const std::size_t start = pos_;
    ++pos_;
    std::string lexical;
    for (;;) {
      if (at_end()) fail(start, "unterminated literal");
      const char c = src_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lexical += c;
        continue;
      }
      if (at_end()) fail(start, "unterminated literal");
      const char esc = src_[pos_++];
      switch (esc) {
        case '"': lexical += '"'; break;
        case '\\': lexical += '\\'; break;
        case 'n': lexical += '\n'; break;
        case 'r': lexical += '\r'; break;
        case 't': lexical += '\t'; break;
        case 'u':
        case 'U': {
          const std::size_t width = esc == 'u' ? 4 : 8;
          if (src_.size() - pos_ < width) fail(pos_ - 2, "truncated unicode escape");
          char32_t cp = 0;
          for (std::size_t i = 0; i < width; ++i) {
            const char h = src_[pos_ + i];
            if (!std::isxdigit(static_cast<unsigned char>(h))) fail(pos_ + i, "bad hex digit");
            cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h))
                                                     ? h - '0'
                                                     : std::tolower(h) - 'a' + 10);
          }
          pos_ += width;
          text::append_utf8(lexical, cp);
          break;
        }
        default:
          fail(pos_ - 2, std::string("unknown escape \\") + esc);
      }
    }
    if (src_.substr(pos_, 2) != "^^") return Literal::plain(std::move(lexical));
    pos_ += 2;
    const std::size_t dt_at = pos_;
    std::optional<Datatype> dt;
    if (peek() == '<') {
      const auto close = src_.find('>', pos_);
      if (close == std::string_view::npos) fail(dt_at, "unterminated datatype IRI");
      dt = datatype_from_iri(src_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
    } else {
      const std::string word = read_word();
      if (word.rfind("xsd:", 0) == 0) {
        dt = datatype_from_iri(std::string(kXsdBase) + word.substr(4));
      }
    }
    if (!dt) fail(dt_at, "unsupported datatype");
    try {
      return Literal::typed(std::move(lexical), *dt);
    } catch (const InvalidLiteral& e) {
      fail(start, e.what());
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void collect_vars(const TriplePattern& tp, std::set<std::string>& out) {
  for (const PatternTerm* t : {&tp.s, &tp.p, &tp.o}) {
    if (const auto* v = std::get_if<Variable>(t)) out.insert(v->name);
  }
}

void check_connected(const Query& q) {
  const std::size_t n = q.patterns.size();
  if (n <= 1) return;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::map<std::string, std::size_t> first_seen;
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::string> vars;
    collect_vars(q.patterns[i], vars);
    for (const auto& v : vars) {
      auto [it, inserted] = first_seen.emplace(v, i);
      if (!inserted) parent[find(i)] = find(it->second);
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) != find(0)) {
      throw DisconnectedPattern("pattern " + std::to_string(i + 1) +
                                " shares no variable with the rest of the query");
    }
  }
}

// A pattern with ground terms resolved to store ids and variables to slots.
struct CompiledPattern {
  struct Slot {
    std::optional<TermId> ground;
    int var = -1;
    bool missing = false;  // ground term absent from the store
  };
  Slot s, p, o;
};

struct Compiled {
  std::vector<std::string> var_names;
  std::vector<CompiledPattern> patterns;
  bool impossible = false;
};

Compiled compile(const TripleStore& store, const Query& q) {
  Compiled c;
  std::map<std::string, int> index;
  auto slot = [&](const PatternTerm& t) {
    CompiledPattern::Slot sl;
    if (const auto* v = std::get_if<Variable>(&t)) {
      auto [it, inserted] = index.emplace(v->name, static_cast<int>(c.var_names.size()));
      if (inserted) c.var_names.push_back(v->name);
      sl.var = it->second;
    } else {
      const Term term = std::holds_alternative<Iri>(t) ? Term(std::get<Iri>(t))
                                                       : Term(std::get<Literal>(t));
      sl.ground = store.id_of(term);
      if (!sl.ground) {
        sl.missing = true;
        c.impossible = true;
      }
    }
    return sl;
  };
  for (const auto& tp : q.patterns) c.patterns.push_back({slot(tp.s), slot(tp.p), slot(tp.o)});
  return c;
}

std::size_t ground_count(const TripleStore& store, const CompiledPattern& cp) {
  if (cp.s.missing || cp.p.missing || cp.o.missing) return 0;
  return store.scan(cp.s.ground, cp.p.ground, cp.o.ground).size();
}

std::vector<std::size_t> plan(const TripleStore& store, const Compiled& c) {
  const std::size_t n = c.patterns.size();
  std::vector<std::size_t> cost(n);
  for (std::size_t i = 0; i < n; ++i) cost[i] = ground_count(store, c.patterns[i]);

  std::vector<std::size_t> order;
  std::vector<bool> placed(n, false);
  std::vector<bool> bound(c.var_names.size(), false);
  auto touches_bound = [&](const CompiledPattern& cp) {
    for (const auto* sl : {&cp.s, &cp.p, &cp.o}) {
      if (sl->var >= 0 && bound[static_cast<std::size_t>(sl->var)]) return true;
    }
    return false;
  };
  while (order.size() < n) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      if (!order.empty() && !touches_bound(c.patterns[i])) continue;
      if (!pick || cost[i] < cost[*pick]) pick = i;
    }
    // Only reachable for disconnected queries, which parse_query rejects.
    if (!pick) {
      for (std::size_t i = 0; i < n && !pick; ++i) {
        if (!placed[i]) pick = i;
      }
    }
    placed[*pick] = true;
    order.push_back(*pick);
    const auto& cp = c.patterns[*pick];
    for (const auto* sl : {&cp.s, &cp.p, &cp.o}) {
      if (sl->var >= 0) bound[static_cast<std::size_t>(sl->var)] = true;
    }
  }
  return order;
}

class Executor {
 public:
  Executor(const TripleStore& store, const Compiled& c, std::vector<std::size_t> order,
           std::vector<int> projection)
      : store_(store),
        c_(c),
        order_(std::move(order)),
        projection_(std::move(projection)),
        binding_(c.var_names.size()) {}

  std::vector<std::vector<TermId>> run() {
    if (!c_.impossible) step(0);
    return std::move(out_);
  }

 private:
  std::optional<TermId> value(const CompiledPattern::Slot& sl) const {
    if (sl.ground) return sl.ground;
    return binding_[static_cast<std::size_t>(sl.var)];
  }

  bool bind(const CompiledPattern::Slot& sl, TermId v, std::vector<int>& newly) {
    if (sl.var < 0) return true;
    auto& b = binding_[static_cast<std::size_t>(sl.var)];
    if (b) return *b == v;
    b = v;
    newly.push_back(sl.var);
    return true;
  }

  void step(std::size_t depth) {
    if (depth == order_.size()) {
      std::vector<TermId> row;
      row.reserve(projection_.size());
      for (int v : projection_) row.push_back(*binding_[static_cast<std::size_t>(v)]);
      out_.push_back(std::move(row));
      return;
    }
    const auto& cp = c_.patterns[order_[depth]];
    for (const auto& t : store_.scan(value(cp.s), value(cp.p), value(cp.o))) {
      std::vector<int> newly;
      if (bind(cp.s, t.s, newly) && bind(cp.p, t.p, newly) && bind(cp.o, t.o, newly)) {
        step(depth + 1);
      }
      for (int v : newly) binding_[static_cast<std::size_t>(v)].reset();
    }
  }

  const TripleStore& store_;
  const Compiled& c_;
  std::vector<std::size_t> order_;
  std::vector<int> projection_;
  std::vector<std::optional<TermId>> binding_;
  std::vector<std::vector<TermId>> out_;
};

}  // namespace

Query parse_query(std::string_view text) {
  Query q = Parser(text).parse();
  std::set<std::string> vars;
  for (const auto& tp : q.patterns) collect_vars(tp, vars);
  for (const auto& v : q.select) {
    if (!vars.count(v)) {
      throw UnboundSelectVariable("selected variable ?" + v + " does not occur in any pattern");
    }
  }
  check_connected(q);
  return q;
}

std::vector<std::size_t> join_order(const TripleStore& store, const Query& query) {
  return plan(store, compile(store, query));
}

QueryResult evaluate(const TripleStore& store, const Query& query) {
  const Compiled c = compile(store, query);
  std::vector<int> projection;
  for (const auto& name : query.select) {
    const auto it = std::find(c.var_names.begin(), c.var_names.end(), name);
    if (it == c.var_names.end()) {
      throw UnboundSelectVariable("selected variable ?" + name + " does not occur in any pattern");
    }
    projection.push_back(static_cast<int>(it - c.var_names.begin()));
  }
  auto rows = Executor(store, c, plan(store, c), projection).run();

  QueryResult result;
  if (query.is_count()) {
    std::set<TermId> distinct;
    for (const auto& r : rows) distinct.insert(r.front());
    result.columns = {"count"};
    result.count = distinct.size();
    return result;
  }
  result.columns = query.select;
  result.rows.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<Term> terms;
    terms.reserve(r.size());
    for (TermId id : r) terms.push_back(store.term(id));
    result.rows.push_back(std::move(terms));
  }
  std::sort(result.rows.begin(), result.rows.end());
  if (query.distinct) {
    result.rows.erase(std::unique(result.rows.begin(), result.rows.end()), result.rows.end());
  }
  return result;
}

std::string render_term(const Term& term) {
  if (const auto* iri = std::get_if<Iri>(&term)) return iri->prefixed();
  return std::get<Literal>(term).lexical;
}

std::string format_result(const QueryResult& result) {
  if (result.count) return std::to_string(*result.count) + "\n";
  std::vector<std::string> lines;
  lines.reserve(result.rows.size());
  for (const auto& row : result.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const auto& t : row) fields.push_back(render_term(t));
    lines.push_back(csv_line(fields));
  }
  std::sort(lines.begin(), lines.end());
  std::string out = csv_line(result.columns);
  for (const auto& l : lines) out += l;
  return out;
}

}  // namespace peg
