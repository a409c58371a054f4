// Copyright 2026 The mmxeval Authors. All Rights Reserved.
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

#include "mmxeval/stats.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <utility>

#include "mmxeval/error.h"

namespace mmxeval {
namespace {

void require_paired(std::span<const double> x, std::span<const double> y, const char* what) {
  if (x.size() != y.size()) throw DataError(std::string(what) + ": length mismatch");
  if (x.size() < 2) throw DataError(std::string(what) + ": need at least 2 observations");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DataError(std::string(what) + ": non-finite input");
    }
  }
}

// Sum of t(t-1)/2 over runs of equal values in a sorted range.
template <typename It, typename Eq>
std::int64_t tied_pairs(It first, It last, Eq eq) {
  std::int64_t total = 0;
  while (first != last) {
    It run = first + 1;
    while (run != last && eq(*first, *run)) ++run;
    const std::int64_t t = run - first;
    total += t * (t - 1) / 2;
    first = run;
  }
  return total;
}

// Stable merge sort on `v`, returning the number of inversions (pairs moved
// past a strictly smaller element).
std::int64_t sort_count_swaps(std::vector<double>& v, std::vector<double>& buf, std::size_t lo,
                              std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = sort_count_swaps(v, buf, lo, mid) + sort_count_swaps(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      buf[k++] = v[j++];
    } else {
      buf[k++] = v[i++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
  return swaps;
}

// Midranks of the concatenation a ++ b, plus the tie term sum(t^3 - t).
std::pair<std::vector<double>, double> midranks(std::span<const double> a,
                                                std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return all[l] < all[r]; });
  std::vector<double> rank(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && all[idx[j]] == all[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) rank[idx[k]] = r;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  return {std::move(rank), tie_term};
}

// Number of arrangements of m "a" and n "b" values with each possible U_a,
// indexed 0..m*n.
std::vector<double> u_distribution(std::size_t m, std::size_t n) {
  // f[i][j] is the distribution for (i, j), built up along j.
  std::vector<std::vector<std::vector<double>>> f(m + 1, std::vector<std::vector<double>>(n + 1));
  for (std::size_t i = 0; i <= m; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      std::vector<double>& d = f[i][j];
      d.assign(i * j + 1, 0.0);
      if (i == 0 || j == 0) {
        d[0] = 1.0;
        continue;
      }
      // The largest value belongs to a (beating all j b's) or to b.
      const auto& with_a = f[i - 1][j];
      const auto& with_b = f[i][j - 1];
      for (std::size_t u = 0; u < with_a.size(); ++u) d[u + j] += with_a[u];
      for (std::size_t u = 0; u < with_b.size(); ++u) d[u] += with_b[u];
    }
  }
  return f[m][n];
}

}  // namespace

std::optional<double> pearson_r(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, "pearson_r");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, "kendall_tau_b");
  const std::size_t n = x.size();
  std::vector<std::pair<double, double>> xy(n);
  for (std::size_t i = 0; i < n; ++i) xy[i] = {x[i], y[i]};
  std::sort(xy.begin(), xy.end());

  const std::int64_t n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const std::int64_t n1 =
      tied_pairs(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a.first == b.first; });
  const std::int64_t n3 = tied_pairs(xy.begin(), xy.end(), [](const auto& a, const auto& b) { return a == b; });

  std::vector<double> ys(n), buf(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = xy[i].second;
  const std::int64_t swaps = sort_count_swaps(ys, buf, 0, n);
  const std::int64_t n2 = tied_pairs(ys.begin(), ys.end(), [](double a, double b) { return a == b; });

  if (n0 == n1 || n0 == n2) return std::nullopt;
  const double numer = static_cast<double>(n0 - n1 - n2 + n3 - 2 * swaps);
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) * std::sqrt(static_cast<double>(n0 - n2));
  return std::clamp(numer / denom, -1.0, 1.0);
}

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("mann_whitney_u: both samples must be nonempty");
  for (double v : a) {
    if (!std::isfinite(v)) throw DataError("mann_whitney_u: non-finite input");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw DataError("mann_whitney_u: non-finite input");
  }
  const std::size_t m = a.size(), n = b.size();
  const auto [rank, tie_term] = midranks(a, b);
  double rank_sum_a = 0.0;
  for (std::size_t i = 0; i < m; ++i) rank_sum_a += rank[i];
  const double md = static_cast<double>(m), nd = static_cast<double>(n);

  MannWhitneyResult r;
  r.u = rank_sum_a - md * (md + 1.0) / 2.0;

  if (m + n <= kMannWhitneyExactLimit && tie_term == 0.0) {
    const std::vector<double> dist = u_distribution(m, n);
    const auto u = static_cast<std::size_t>(std::llround(r.u));
    double lower = 0.0, upper = 0.0, total = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
      total += dist[k];
      if (k <= u) lower += dist[k];
      if (k >= u) upper += dist[k];
    }
    r.p = std::min(1.0, 2.0 * std::min(lower, upper) / total);
    r.exact = true;
    return r;
  }

  const double big_n = md + nd;
  const double mean = md * nd / 2.0;
  const double var = md * nd / 12.0 * ((big_n + 1.0) - tie_term / (big_n * (big_n - 1.0)));
  if (var <= 0.0) {
    r.p = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.u - mean) - 0.5) / std::sqrt(var);
  r.p = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  return r;
}

StarLevel star_level(double p) {
  if (p < 0.001) return StarLevel::kThree;
  if (p < 0.01) return StarLevel::kTwo;
  if (p < 0.05) return StarLevel::kOne;
  return StarLevel::kNotSignificant;
}

std::string to_string(StarLevel level) {
  switch (level) {
    case StarLevel::kThree:
      return "★★★";
    case StarLevel::kTwo:
      return "★★";
    case StarLevel::kOne:
      return "★";
    case StarLevel::kNotSignificant:
      break;
  }
  return "NS";
}

InformativenessResult informativeness_test(std::span<const double> msfi,
                                           const std::vector<bool>& correct,
                                           std::span<const double> prob) {
  if (msfi.size() != correct.size() || msfi.size() != prob.size()) {
    throw DataError("informativeness_test: per-case vectors differ in length");
  }
  InformativenessResult r;
  std::vector<double> right, wrong;
  for (std::size_t i = 0; i < msfi.size(); ++i) (correct[i] ? right : wrong).push_back(msfi[i]);
  r.n_correct = right.size();
  r.n_incorrect = wrong.size();
  if (msfi.size() >= 2) r.pearson_r = pearson_r(msfi, prob);
  if (!right.empty() && !wrong.empty()) {
    r.u_test = mann_whitney_u(right, wrong);
    r.stars = star_level(r.u_test->p);
  }
  return r;
}

AlphaLevel parse_alpha_level(const std::string& name) {
  if (name == "nominal") return AlphaLevel::kNominal;
  if (name == "ordinal") return AlphaLevel::kOrdinal;
  if (name == "interval") return AlphaLevel::kInterval;
  throw ConfigError("unknown agreement level '" + name + "' (nominal, ordinal, interval)");
}

std::string to_string(AlphaLevel level) {
  switch (level) {
    case AlphaLevel::kNominal:
      return "nominal";
    case AlphaLevel::kInterval:
      return "interval";
    case AlphaLevel::kOrdinal:
      break;
  }
  return "ordinal";
}

double krippendorff_alpha(const RatingMatrix& ratings, AlphaLevel level) {
  std::map<double, std::size_t> category;
  for (const auto& item : ratings) {
    for (const auto& v : item) {
      if (!v) continue;
      if (!std::isfinite(*v)) throw DataError("krippendorff_alpha: non-finite rating");
      category.emplace(*v, 0);
    }
  }
  std::vector<double> values;
  for (auto& [v, index] : category) {
    index = values.size();
    values.push_back(v);
  }
  const std::size_t k = values.size();

  std::vector<double> o(k * k, 0.0);
  std::size_t pairable_items = 0;
  for (const auto& item : ratings) {
    std::vector<std::size_t> present;
    for (const auto& v : item) {
      if (v) present.push_back(category.at(*v));
    }
    if (present.size() < 2) continue;
    ++pairable_items;
    const double w = 1.0 / static_cast<double>(present.size() - 1);
    for (std::size_t i = 0; i < present.size(); ++i) {
      for (std::size_t j = 0; j < present.size(); ++j) {
        if (i != j) o[present[i] * k + present[j]] += w;
      }
    }
  }
  if (pairable_items == 0) {
    throw UndefinedError("Krippendorff's alpha undefined: insufficient pairable values");
  }

  std::vector<double> marginal(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) marginal[c] += o[c * k + d];
  }
  const double total = std::accumulate(marginal.begin(), marginal.end(), 0.0);

  auto delta2 = [&](std::size_t c, std::size_t d) -> double {
    if (c == d) return 0.0;
    switch (level) {
      case AlphaLevel::kNominal:
        return 1.0;
      case AlphaLevel::kInterval:
        return (values[c] - values[d]) * (values[c] - values[d]);
      case AlphaLevel::kOrdinal: {
        const std::size_t lo = std::min(c, d), hi = std::max(c, d);
        double s = 0.0;
        for (std::size_t g = lo; g <= hi; ++g) s += marginal[g];
        s -= 0.5 * (marginal[lo] + marginal[hi]);
        return s * s;
      }
    }
    return 1.0;
  };

  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < k; ++d) {
      const double dd = delta2(c, d);
      observed += o[c * k + d] * dd;
      expected += marginal[c] * marginal[d] * dd;
    }
  }
  if (expected <= 0.0) {
    throw UndefinedError("Krippendorff's alpha undefined: ratings show no variation");
  }
  return 1.0 - (total - 1.0) * observed / expected;
}

std::optional<double> fleiss_kappa(const std::vector<std::vector<std::size_t>>& counts) {
  if (counts.empty()) throw DataError("fleiss_kappa: no items");
  const std::size_t k = counts.front().size();
  if (k == 0) throw DataError("fleiss_kappa: no categories");
  const std::size_t raters = std::accumulate(counts.front().begin(), counts.front().end(), std::size_t{0});
  if (raters < 2) throw DataError("fleiss_kappa: each item needs at least 2 ratings");
  const double nr = static_cast<double>(raters);
  const double items = static_cast<double>(counts.size());

  std::vector<double> column(k, 0.0);
  double p_bar = 0.0;
  for (const auto& row : counts) {
    if (row.size() != k) throw DataError("fleiss_kappa: ragged count matrix");
    if (std::accumulate(row.begin(), row.end(), std::size_t{0}) != raters) {
      throw DataError("fleiss_kappa: every item must have the same number of ratings");
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double c = static_cast<double>(row[j]);
      sq += c * c;
      column[j] += c;
    }
    p_bar += (sq - nr) / (nr * (nr - 1.0));
  }
  p_bar /= items;
  double p_e = 0.0;
  for (double c : column) {
    const double pj = c / (items * nr);
    p_e += pj * pj;
  }
  if (p_e >= 1.0) return std::nullopt;
  return (p_bar - p_e) / (1.0 - p_e);
}

std::vector<std::vector<std::size_t>> category_counts(const RatingMatrix& ratings,
                                                       std::span<const double> categories) {
  std::vector<std::vector<std::size_t>> counts;
  counts.reserve(ratings.size());
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    std::vector<std::size_t> row(categories.size(), 0);
    for (const auto& v : ratings[i]) {
      if (!v) throw DataError("fleiss_kappa needs complete ratings; item " + std::to_string(i) + " has a gap");
      const auto it = std::find(categories.begin(), categories.end(), *v);
      if (it == categories.end()) {
        throw DataError("rating " + std::to_string(*v) + " is not on the declared scale");
      }
      ++row[static_cast<std::size_t>(it - categories.begin())];
    }
    counts.push_back(std::move(row));
  }
  return counts;
}

}  // namespace mmxeval
