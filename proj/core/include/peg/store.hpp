#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "peg/model.hpp"

namespace peg {

using TermId = std::uint32_t;

struct IdTriple {
  TermId s;
  TermId p;
  TermId o;

  friend bool operator==(const IdTriple&, const IdTriple&) = default;
};

// Immutable, deduplicated triple set with SPO, POS and OSP sorted indexes.
// Safe for concurrent readers once constructed.
class TripleStore {
 public:
  TripleStore() = default;

  static TripleStore load(std::span<const Triple> triples);
  // Loads and merges N-Triples files. Temporal edges are closed with
  // infer_closure before indexing, so reduced-mode output answers like full.
  static TripleStore load_files(std::span<const std::filesystem::path> paths);

  std::size_t size() const noexcept { return spo_.size(); }
  bool empty() const noexcept { return spo_.empty(); }

  std::optional<TermId> id_of(const Term& term) const;
  const Term& term(TermId id) const { return terms_.at(id); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  // Contiguous run of triples matching the bound positions, taken from the
  // index whose key order has the bound positions as a prefix.
  std::span<const IdTriple> scan(std::optional<TermId> s, std::optional<TermId> p,
                                 std::optional<TermId> o) const;

  // Every triple in (s, p, o) term order.
  std::vector<Triple> triples() const;

  // True when all three indexes hold the same triple set.
  bool consistent() const;

 private:
  std::vector<Term> terms_;
  std::map<Term, TermId> ids_;
  std::vector<IdTriple> spo_;
  std::vector<IdTriple> pos_;
  std::vector<IdTriple> osp_;
};

}  // namespace peg
