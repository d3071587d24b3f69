// Brute-force reference implementations used by the tests. Nothing here
// calls into the library's combinatorics.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

// All |levels|^L sequences in lexicographic order.
inline std::vector<std::vector<int>> all_sequences(const std::vector<int>& levels, std::size_t L) {
  std::vector<std::vector<int>> out;
  std::vector<std::size_t> idx(L, 0);
  while (true) {
    std::vector<int> s(L);
    for (std::size_t i = 0; i < L; ++i) s[i] = levels[idx[i]];
    out.push_back(std::move(s));
    std::size_t p = L;
    while (p > 0 && ++idx[p - 1] == levels.size()) idx[--p] = 0;
    if (p == 0) break;
  }
  return out;
}

inline long energy(const std::vector<int>& s) {
  long e = 0;
  for (int a : s) e += a * a;
  return e;
}

inline std::vector<std::uint32_t> counts_of(const std::vector<int>& levels, const std::vector<int>& s) {
  std::vector<std::uint32_t> c(levels.size(), 0);
  for (int a : s) ++c[static_cast<std::size_t>(std::find(levels.begin(), levels.end(), a) - levels.begin())];
  return c;
}

struct Shell {
  std::vector<std::uint32_t> counts;
  long energy = 0;
  std::vector<std::vector<int>> sequences;  // lexicographic
};

// Shells found by grouping every sequence, sorted by (energy, counts).
inline std::vector<Shell> shells(const std::vector<int>& levels, std::size_t L) {
  std::map<std::pair<long, std::vector<std::uint32_t>>, std::vector<std::vector<int>>> groups;
  for (auto& s : all_sequences(levels, L)) {
    auto key = std::make_pair(energy(s), counts_of(levels, s));
    groups[key].push_back(s);
  }
  std::vector<Shell> out;
  for (auto& [key, seqs] : groups) out.push_back({key.second, key.first, seqs});
  return out;
}

inline std::uint64_t pow2_floor(std::uint64_t v) {
  std::uint64_t p = 1;
  while (p * 2 <= v) p *= 2;
  return p;
}

struct Selection {
  std::vector<std::uint32_t> counts;
  long energy = 0;
  std::uint64_t n_seq = 0;
};

// Dyadic greedy selection over the brute-force shells; empty when infeasible.
inline std::vector<Selection> dyadic_greedy(const std::vector<int>& levels, std::size_t L, std::size_t k) {
  std::uint64_t remaining = std::uint64_t{1} << k;
  std::vector<Selection> out;
  for (const auto& sh : shells(levels, L)) {
    if (remaining == 0) break;
    const std::uint64_t take = std::min(pow2_floor(sh.sequences.size()), pow2_floor(remaining));
    out.push_back({sh.counts, sh.energy, take});
    remaining -= take;
  }
  if (remaining != 0) out.clear();
  return out;
}

// 2^k lowest-energy sequences (energy, then lexicographic).
inline std::vector<std::vector<int>> sphere_selection(const std::vector<int>& levels, std::size_t L, std::size_t k) {
  auto all = all_sequences(levels, L);
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return energy(a) < energy(b); });
  all.resize(std::size_t{1} << k);
  return all;
}

// Multinomial by multiplying binomials from Pascal's triangle.
inline std::uint64_t multinomial(const std::vector<std::uint32_t>& c) {
  std::size_t n = 0;
  for (auto x : c) n += x;
  std::vector<std::vector<std::uint64_t>> pascal(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    pascal[i].assign(i + 1, 1);
    for (std::size_t j = 1; j < i; ++j) pascal[i][j] = pascal[i - 1][j - 1] + pascal[i - 1][j];
  }
  std::uint64_t m = 1;
  std::size_t left = n;
  for (auto x : c) {
    m *= pascal[left][x];
    left -= x;
  }
  return m;
}

// Canonical Huffman codes from code lengths, the deflate way (RFC 1951 3.2.2).
inline std::vector<std::vector<std::uint8_t>> canonical_codes(const std::vector<std::size_t>& lengths) {
  std::size_t max_len = 0;
  for (auto l : lengths) max_len = std::max(max_len, l);
  std::vector<std::uint64_t> bl_count(max_len + 1, 0), next_code(max_len + 2, 0);
  for (auto l : lengths) ++bl_count[l];
  std::uint64_t code = 0;
  bl_count[0] = 0;
  for (std::size_t bits = 1; bits <= max_len; ++bits) {
    code = (code + bl_count[bits - 1]) << 1;
    next_code[bits] = code;
  }
  std::vector<std::vector<std::uint8_t>> out(lengths.size());
  for (std::size_t n = 0; n < lengths.size(); ++n) {
    const std::size_t len = lengths[n];
    if (len == 0) continue;
    const std::uint64_t c = next_code[len]++;
    for (std::size_t b = 0; b < len; ++b) out[n].push_back(static_cast<std::uint8_t>((c >> (len - 1 - b)) & 1));
  }
  return out;
}

// Law of D consecutive amplitudes (aligned blocks) over every permutation of
// every dyadic-greedy shell, each shell weighted by n_seq / 2^k.
inline std::vector<double> permutation_ensemble(const std::vector<int>& levels, std::size_t L, std::size_t k,
                                                std::size_t D) {
  const std::size_t n = levels.size();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < D; ++i) cells *= n;
  std::vector<double> out(cells, 0.0);
  for (const auto& sel : dyadic_greedy(levels, L, k)) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i) s.insert(s.end(), sel.counts[i], i);
    const double w = static_cast<double>(sel.n_seq) / static_cast<double>(std::uint64_t{1} << k) /
                     static_cast<double>(multinomial(sel.counts)) / static_cast<double>(L / D);
    do {
      for (std::size_t b = 0; b + D <= L; b += D) {
        std::size_t cell = 0;
        for (std::size_t j = 0; j < D; ++j) cell = cell * n + s[b + j];
        out[cell] += w;
      }
    } while (std::next_permutation(s.begin(), s.end()));
  }
  return out;
}

}  // namespace oracle
