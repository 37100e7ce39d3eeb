// Copyright 2026 The captionrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "captionrace/rng.hpp"

// Reference computations written independently of the library: brute force
// where possible, textbook formulas otherwise. Tests compare the library
// against these, never against its own output.
namespace captionrace::oracle {

/// Integer verified count k in [0, n] whose percentage is closest to `pct`.
inline int back_derive_count(int n, double pct) {
  int best = 0;
  for (int k = 1; k <= n; ++k)
    if (std::abs(100.0 * k / n - pct) < std::abs(100.0 * best / n - pct)) best = k;
  return best;
}

/// Welch t by the textbook formula, two passes.
inline double welch_t(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::pair{m, ss / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double se = std::sqrt(va / a.size() + vb / b.size());
  return se == 0.0 ? 0.0 : (ma - mb) / se;
}

/// Two-sided permutation p-value with |Welch t| as the statistic. Exact
/// enumeration of all label reassignments when both sides have at most 8
/// values, otherwise `draws` random reassignments.
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b, std::uint64_t seed = 7,
                            std::size_t draws = 100000) {
  std::vector<double> pooled(a);
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double observed = std::abs(welch_t(a, b)) - 1e-12;
  const std::size_t na = a.size(), n = pooled.size();
  std::size_t extreme = 0, total = 0;
  auto score = [&](const std::vector<bool>& in_a) {
    std::vector<double> xa, xb;
    for (std::size_t i = 0; i < n; ++i) (in_a[i] ? xa : xb).push_back(pooled[i]);
    ++total;
    if (std::abs(welch_t(xa, xb)) >= observed) ++extreme;
  };
  if (a.size() <= 8 && b.size() <= 8) {
    std::vector<bool> in_a(n, false);
    std::fill(in_a.begin(), in_a.begin() + static_cast<long>(na), true);
    // prev_permutation walks every distinct arrangement of the bool mask.
    do score(in_a);
    while (std::prev_permutation(in_a.begin(), in_a.end()));
  } else {
    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    for (std::size_t d = 0; d < draws; ++d) {
      std::iota(idx.begin(), idx.end(), 0);
      rng.shuffle(idx);
      std::vector<bool> in_a(n, false);
      for (std::size_t i = 0; i < na; ++i) in_a[idx[i]] = true;
      score(in_a);
    }
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

/// Rank of each value: 1 + number smaller + half the number of other equal values.
inline std::vector<double> brute_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      else if (v[j] == v[i] && j != i) ++equal;
    }
    r[i] = 1.0 + less + equal / 2.0;
  }
  return r;
}

/// Spearman rho for tie-free data: 1 - 6 sum d^2 / (n (n^2 - 1)).
inline double spearman_tie_free(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = brute_ranks(x), ry = brute_ranks(y);
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (rx[i] - ry[i]) * (rx[i] - ry[i]);
  const double n = static_cast<double>(x.size());
  return 1.0 - 6.0 * d2 / (n * (n * n - 1.0));
}

/// Spearman rho with ties: Pearson over brute ranks.
inline double spearman_ranked(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = brute_ranks(x), ry = brute_ranks(y);
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
    sxy += rx[i] * ry[i];
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
  }
  const double cov = sxy - sx * sy / n, vx = sxx - sx * sx / n, vy = syy - sy * sy / n;
  return (vx == 0 || vy == 0) ? 0.0 : cov / std::sqrt(vx * vy);
}

/// Lowercases and drops punctuation from both ends; empty means "no word".
inline std::string naive_norm(const std::string& raw) {
  static const std::string strip = ".,!?;:'\"()[]-";
  std::size_t b = 0, e = raw.size();
  while (b < e && strip.find(raw[b]) != std::string::npos) ++b;
  while (e > b && strip.find(raw[e - 1]) != std::string::npos) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i)
    out += (raw[i] >= 'A' && raw[i] <= 'Z') ? static_cast<char>(raw[i] - 'A' + 'a') : raw[i];
  return out;
}

/// Unique content norms of a sentence still hidden after a list of guesses,
/// recomputed from scratch.
inline int brute_blanks(const std::string& sentence, const std::set<std::string>& stops,
                        const std::vector<std::string>& guesses) {
  std::set<std::string> hidden;
  std::string word;
  auto flush = [&] {
    const auto n = naive_norm(word);
    if (!n.empty() && !stops.count(n)) hidden.insert(n);
    word.clear();
  };
  for (char c : sentence) {
    if (c == ' ' || c == '\t' || c == '\n') flush();
    else word += c;
  }
  flush();
  for (const auto& g : guesses) {
    std::string t = g;
    while (!t.empty() && (t.front() == ' ' || t.front() == '\t')) t.erase(t.begin());
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
    hidden.erase(naive_norm(t));
  }
  return static_cast<int>(hidden.size());
}

}  // namespace captionrace::oracle
