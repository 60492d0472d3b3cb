#include "peg/ntriples.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "peg/errors.hpp"
#include "peg/table.hpp"
#include "peg/text.hpp"

namespace peg {

namespace {

void append_iri(std::string& out, std::string_view absolute) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  out.push_back('<');
  for (char ch : absolute) {
    auto c = static_cast<unsigned char>(ch);
    bool escape = c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' ||
                  c == '|' || c == '^' || c == '`' || c == '\\';
    if (escape) {
      out += "\\u00";
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    } else {
      out.push_back(ch);
    }
  }
  out.push_back('>');
}

void append_literal(std::string& out, const Literal& lit) {
  out.push_back('"');
  for (char c : lit.lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  if (lit.datatype) {
    out += "^^";
    append_iri(out, datatype_iri(*lit.datatype));
  }
}

// Cursor over one line of N-Triples input.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(line_, what); }

  std::string iri_text() {
    skip_ws();
    if (peek() == '_') fail("blank nodes are not supported");
    if (peek() != '<') fail("expected '<'");
    ++pos_;
    std::string out;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated IRI");
      char c = s_[pos_++];
      if (c == '>') break;
      if (c == '\\') {
        out += unicode_escape();
        continue;
      }
      if (c == ' ' || c == '<' || c == '"') fail("illegal character in IRI");
      out.push_back(c);
    }
    return out;
  }

  Iri iri() {
    std::string abs = iri_text();
    auto iri = Iri::from_absolute(abs);
    if (!iri) throw UnknownNamespace("line " + std::to_string(line_) + ": <" + abs + ">");
    return *iri;
  }

  Literal literal() {
    skip_ws();
    if (peek() != '"') fail("expected literal");
    ++pos_;
    std::string lex;
    while (true) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        lex.push_back(c);
        continue;
      }
      if (pos_ >= s_.size()) fail("dangling escape");
      char e = s_[pos_];
      switch (e) {
        case 't': lex.push_back('\t'); ++pos_; break;
        case 'b': lex.push_back('\b'); ++pos_; break;
        case 'n': lex.push_back('\n'); ++pos_; break;
        case 'r': lex.push_back('\r'); ++pos_; break;
        case 'f': lex.push_back('\f'); ++pos_; break;
        case '"': lex.push_back('"'); ++pos_; break;
        case '\'': lex.push_back('\''); ++pos_; break;
        case '\\': lex.push_back('\\'); ++pos_; break;
        default: lex += unicode_escape();
      }
    }
    if (peek() == '@') fail("language-tagged literals are not supported");
    if (s_.substr(pos_).starts_with("^^")) {
      pos_ += 2;
      std::string dt_iri = iri_text();
      auto dt = datatype_from_iri(dt_iri);
      if (!dt) throw UnknownNamespace("line " + std::to_string(line_) + ": datatype <" + dt_iri + ">");
      try {
        return Literal::typed(std::move(lex), *dt);
      } catch (const InvalidLiteral& e) {
        fail(e.what());
      }
    }
    return Literal::plain(std::move(lex));
  }

  Term object() {
    skip_ws();
    if (peek() == '"') return literal();
    return iri();
  }

  void expect_dot() {
    skip_ws();
    if (peek() != '.') fail("missing terminal '.'");
    ++pos_;
    if (!at_end_or_comment()) fail("trailing characters after '.'");
  }

 private:
  // Called with pos_ on the character after the backslash.
  std::string unicode_escape() {
    if (pos_ >= s_.size()) fail("dangling escape");
    char kind = s_[pos_++];
    std::size_t n = kind == 'u' ? 4 : kind == 'U' ? 8 : 0;
    if (n == 0) fail(std::string("invalid escape '\\") + kind + "'");
    if (pos_ + n > s_.size()) fail("truncated unicode escape");
    char32_t cp = 0;
    for (std::size_t i = 0; i < n; ++i) {
      char h = s_[pos_++];
      int v = (h >= '0' && h <= '9')   ? h - '0'
              : (h >= 'a' && h <= 'f') ? h - 'a' + 10
              : (h >= 'A' && h <= 'F') ? h - 'A' + 10
                                       : -1;
      if (v < 0) fail("invalid hex digit in unicode escape");
      cp = cp * 16 + static_cast<char32_t>(v);
    }
    if (cp > 0x10FFFF) fail("code point out of range");
    std::string out;
    text::append_utf8(out, cp);
    return out;
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string ntriples_term(const Term& term) {
  std::string out;
  if (const auto* iri = std::get_if<Iri>(&term)) {
    append_iri(out, iri->absolute());
  } else {
    append_literal(out, std::get<Literal>(term));
  }
  return out;
}

std::string ntriples_line(const Triple& t) {
  std::string out;
  append_iri(out, t.subject().absolute());
  out.push_back(' ');
  append_iri(out, t.predicate().absolute());
  out.push_back(' ');
  out += ntriples_term(t.object());
  out += " .";
  return out;
}

std::size_t serialize_ntriples(std::span<const Triple> triples, std::ostream& sink) {
  std::vector<std::string> lines;
  lines.reserve(triples.size());
  for (const auto& t : triples) lines.push_back(ntriples_line(t));
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::size_t bytes = 0;
  for (const auto& l : lines) {
    sink << l << '\n';
    bytes += l.size() + 1;
  }
  if (!sink) throw IoError("failed writing N-Triples output");
  return bytes;
}

std::string serialize_ntriples(std::span<const Triple> triples) {
  std::ostringstream ss;
  serialize_ntriples(triples, ss);
  return std::move(ss).str();
}

std::vector<Triple> parse_ntriples(std::string_view source) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < source.size()) {
    std::size_t nl = source.find('\n', start);
    std::string_view line =
        source.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? source.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    LineParser p(line, line_no);
    if (p.at_end_or_comment()) continue;
    Iri s = p.iri();
    Iri pred = p.iri();
    Term o = p.object();
    p.expect_dot();
    if (pred.ns() == Namespace::PegR) p.fail("predicate in the resource namespace");
    out.emplace_back(std::move(s), std::move(pred), std::move(o));
  }
  return out;
}

std::vector<Triple> read_ntriples_file(const std::filesystem::path& path) {
  return parse_ntriples(read_text_file(path));
}

void write_ntriples_file(const std::filesystem::path& path, std::span<const Triple> triples) {
  write_text_file(path, serialize_ntriples(triples));
}

}  // namespace peg
