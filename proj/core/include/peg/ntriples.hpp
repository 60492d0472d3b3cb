#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "peg/model.hpp"

namespace peg {

// N-Triples token for a term: <absolute-iri> or "escaped"^^<datatype>.
std::string ntriples_term(const Term& term);
// "<s> <p> o ." without the trailing newline.
std::string ntriples_line(const Triple& triple);

// Canonical N-Triples: one line per distinct triple, lines sorted bytewise,
// each terminated by '\n'. Returns the number of bytes written; throws IoError
// when the stream fails.
std::size_t serialize_ntriples(std::span<const Triple> triples, std::ostream& sink);
std::string serialize_ntriples(std::span<const Triple> triples);

// Accepts the subset produced by serialize_ntriples plus comments, blank
// lines, and any xsd datatype in the Literal enumeration. Throws SyntaxError
// (with line number) or UnknownNamespace.
std::vector<Triple> parse_ntriples(std::string_view source);

std::vector<Triple> read_ntriples_file(const std::filesystem::path& path);
void write_ntriples_file(const std::filesystem::path& path, std::span<const Triple> triples);

}  // namespace peg
