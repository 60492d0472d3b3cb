#pragma once

#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers shared by the preprocessing, matching and serialization code.
namespace peg::text {

// Decodes UTF-8 into code points. Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view s);
std::string encode_utf8(std::u32string_view s);
void append_utf8(std::string& out, char32_t cp);

// Unicode-aware enough for EMR cells: ASCII whitespace, NBSP and the
// ideographic space U+3000.
bool is_space(char32_t cp) noexcept;

// Strips leading/trailing whitespace as defined by is_space.
std::string trim(std::string_view s);

bool contains_space(std::string_view s);

// Percent-encodes bytes that may not appear in an IRI: ASCII controls,
// space, <>"{}|\^` and '%' itself. Non-ASCII UTF-8 is kept verbatim.
std::string percent_encode_iri_local(std::string_view s);

}  // namespace peg::text
