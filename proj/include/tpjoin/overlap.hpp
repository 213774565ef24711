#pragma once

// Conventional theta join with an interval-overlap predicate. Every engine
// funnels its interval comparisons through this primitive so the number of
// executions can be counted.

#include <algorithm>
#include <chrono>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tpjoin/instrument.hpp"
#include "tpjoin/model.hpp"
#include "tpjoin/theta.hpp"

namespace tpjoin {

template <class T>
concept Temporal = requires(const T& t) {
  { t.fact } -> std::convertible_to<const Fact&>;
  { t.interval } -> std::convertible_to<const Interval&>;
};

/// All index pairs (i, j) with left[i] and right[j] overlapping in time and
/// satisfying th. Equality conjuncts hash-partition both inputs; each
/// partition is joined with a forward-scan plane sweep. Pair order is
/// unspecified.
template <Temporal L, Temporal R>
std::vector<std::pair<std::size_t, std::size_t>> overlap_pairs(std::span<const L> left, std::span<const R> right,
                                                               const Theta& th, Counters* counters = nullptr) {
  auto started = std::chrono::steady_clock::now();
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto equi = th.equi_columns();

  auto key_of = [&](const Fact& f, bool is_left) {
    Fact k;
    k.reserve(equi.size());
    for (const auto& [lc, rc] : equi) k.push_back(f[is_left ? lc : rc]);
    return k;
  };

  std::unordered_map<Fact, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, FactHash> parts;
  for (std::size_t i = 0; i < left.size(); ++i) parts[key_of(left[i].fact, true)].first.push_back(i);
  for (std::size_t j = 0; j < right.size(); ++j) {
    auto it = parts.find(key_of(right[j].fact, false));
    if (it != parts.end()) it->second.second.push_back(j);
  }

  for (auto& [_, part] : parts) {
    auto& li = part.first;
    auto& ri = part.second;
    if (li.empty() || ri.empty()) continue;
    std::sort(li.begin(), li.end(), [&](auto a, auto b) { return left[a].interval.ts < left[b].interval.ts; });
    std::sort(ri.begin(), ri.end(), [&](auto a, auto b) { return right[a].interval.ts < right[b].interval.ts; });
    std::size_t i = 0, j = 0;
    while (i < li.size() && j < ri.size()) {
      const auto& l = left[li[i]];
      const auto& r = right[ri[j]];
      if (l.interval.ts <= r.interval.ts) {
        for (std::size_t k = j; k < ri.size() && right[ri[k]].interval.ts < l.interval.te; ++k) {
          if (th.eval(l.fact, right[ri[k]].fact)) out.emplace_back(li[i], ri[k]);
        }
        ++i;
      } else {
        for (std::size_t k = i; k < li.size() && left[li[k]].interval.ts < r.interval.te; ++k) {
          if (th.eval(left[li[k]].fact, r.fact)) out.emplace_back(li[k], ri[j]);
        }
        ++j;
      }
    }
  }

  if (counters) {
    ++counters->join_execs;
    counters->xrecords += out.size();
    counters->join_time += std::chrono::steady_clock::now() - started;
  }
  return out;
}

}  // namespace tpjoin
