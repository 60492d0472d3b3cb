#include "peg/store.hpp"

#include <algorithm>
#include <tuple>

#include "peg/ntriples.hpp"
#include "peg/temporal.hpp"

namespace peg {

namespace {

auto spo_key(const IdTriple& t) { return std::tie(t.s, t.p, t.o); }
auto pos_key(const IdTriple& t) { return std::tie(t.p, t.o, t.s); }
auto osp_key(const IdTriple& t) { return std::tie(t.o, t.s, t.p); }

template <typename Key>
void sort_by(std::vector<IdTriple>& v, Key key) {
  std::sort(v.begin(), v.end(),
            [key](const IdTriple& a, const IdTriple& b) { return key(a) < key(b); });
}

// Range of `index` whose first `n` key components equal those of `probe`.
template <typename Key>
std::span<const IdTriple> prefix_range(const std::vector<IdTriple>& index, Key key,
                                       const IdTriple& probe, int n) {
  auto cmp_prefix = [key, n](const IdTriple& a, const IdTriple& b) {
    auto ka = key(a);
    auto kb = key(b);
    if (std::get<0>(ka) != std::get<0>(kb) || n == 1) return std::get<0>(ka) < std::get<0>(kb);
    if (std::get<1>(ka) != std::get<1>(kb) || n == 2) return std::get<1>(ka) < std::get<1>(kb);
    return std::get<2>(ka) < std::get<2>(kb);
  };
  auto [lo, hi] = std::equal_range(index.begin(), index.end(), probe, cmp_prefix);
  return {index.data() + (lo - index.begin()), static_cast<std::size_t>(hi - lo)};
}

}  // namespace

TripleStore TripleStore::load(std::span<const Triple> triples) {
  TripleStore st;
  auto intern = [&st](const Term& t) -> TermId {
    auto [it, inserted] = st.ids_.try_emplace(t, static_cast<TermId>(st.terms_.size()));
    if (inserted) st.terms_.push_back(t);
    return it->second;
  };
  st.spo_.reserve(triples.size());
  for (const auto& t : triples) {
    st.spo_.push_back({intern(t.subject()), intern(t.predicate()), intern(t.object())});
  }
  sort_by(st.spo_, spo_key);
  st.spo_.erase(std::unique(st.spo_.begin(), st.spo_.end()), st.spo_.end());
  st.pos_ = st.spo_;
  sort_by(st.pos_, pos_key);
  st.osp_ = st.spo_;
  sort_by(st.osp_, osp_key);
  return st;
}

TripleStore TripleStore::load_files(std::span<const std::filesystem::path> paths) {
  std::vector<Triple> all;
  for (const auto& path : paths) {
    auto part = read_ntriples_file(path);
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  const auto edges = edges_from_triples(all);
  if (!edges.empty()) {
    auto closed = edges_to_triples(infer_closure(edges));
    all.insert(all.end(), std::make_move_iterator(closed.begin()),
               std::make_move_iterator(closed.end()));
  }
  return load(all);
}

std::optional<TermId> TripleStore::id_of(const Term& term) const {
  auto it = ids_.find(term);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const IdTriple> TripleStore::scan(std::optional<TermId> s, std::optional<TermId> p,
                                            std::optional<TermId> o) const {
  const IdTriple probe{s.value_or(0), p.value_or(0), o.value_or(0)};
  if (s && p && o) return prefix_range(spo_, spo_key, probe, 3);
  if (s && p) return prefix_range(spo_, spo_key, probe, 2);
  if (s && o) return prefix_range(osp_, osp_key, probe, 2);
  if (p && o) return prefix_range(pos_, pos_key, probe, 2);
  if (s) return prefix_range(spo_, spo_key, probe, 1);
  if (p) return prefix_range(pos_, pos_key, probe, 1);
  if (o) return prefix_range(osp_, osp_key, probe, 1);
  return spo_;
}

std::vector<Triple> TripleStore::triples() const {
  std::vector<Triple> out;
  out.reserve(spo_.size());
  for (const auto& t : spo_) {
    out.emplace_back(std::get<Iri>(terms_[t.s]), std::get<Iri>(terms_[t.p]), terms_[t.o]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool TripleStore::consistent() const {
  auto as_set = [](std::vector<IdTriple> v) {
    sort_by(v, spo_key);
    return v;
  };
  return spo_.size() == pos_.size() && spo_.size() == osp_.size() && as_set(pos_) == spo_ &&
         as_set(osp_) == spo_;
}

}  // namespace peg
