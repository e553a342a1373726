// Copyright 2026 The trajmia Authors
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

#include "trajmia/data/split.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "trajmia/rng.h"

namespace trajmia::data {

void ValidateSplit(const SplitSpec& spec, size_t n) {
  Require(spec.target_train >= 1 && spec.target_test >= 1 &&
              spec.shadow_train >= 1 && spec.shadow_test >= 1,
          "every split part needs at least one sample");
  const size_t used = spec.target_train + spec.target_test +
                      spec.shadow_train + spec.shadow_test;
  Require(used <= n, "split sizes (" + std::to_string(used) +
                         ") exceed dataset size (" + std::to_string(n) + ")");
  if (spec.distill_cap) {
    Require(*spec.distill_cap >= 1, "distillation cap must be positive");
  }
}

namespace {

constexpr int kParts = 6;  // five named parts plus "unused" past the cap

// Rounds the proportional allocation quota[c][p] = n_c * size_p / n to
// integers with every cell at floor or ceil, exact row sums n_c and exact
// column sums size_p. Such a rounding always exists; the round-ups are
// found as a bipartite flow from classes to parts.
std::vector<std::array<size_t, kParts>> RoundAllocation(
    const std::vector<size_t>& class_sizes,
    const std::array<size_t, kParts>& part_sizes, size_t n) {
  const size_t classes = class_sizes.size();
  std::vector<std::array<size_t, kParts>> alloc(classes);
  std::vector<std::array<bool, kParts>> fractional(classes);
  std::vector<size_t> row_need(classes);
  std::array<size_t, kParts> col_need{};
  std::array<size_t, kParts> col_floor{};
  for (size_t c = 0; c < classes; ++c) {
    size_t row_floor = 0;
    for (int p = 0; p < kParts; ++p) {
      // Exact integer floor of n_c * size_p / n.
      const unsigned __int128 prod =
          static_cast<unsigned __int128>(class_sizes[c]) * part_sizes[p];
      alloc[c][p] = static_cast<size_t>(prod / n);
      fractional[c][p] = prod % n != 0;
      row_floor += alloc[c][p];
      col_floor[p] += alloc[c][p];
    }
    row_need[c] = class_sizes[c] - row_floor;
  }
  for (int p = 0; p < kParts; ++p) col_need[p] = part_sizes[p] - col_floor[p];

  // Nodes: source 0, classes 1..C, parts C+1..C+6, sink C+7.
  const size_t source = 0;
  const size_t sink = classes + kParts + 1;
  const size_t nodes = sink + 1;
  std::vector<std::map<size_t, long>> cap(nodes);
  for (size_t c = 0; c < classes; ++c) {
    cap[source][1 + c] = static_cast<long>(row_need[c]);
    for (int p = 0; p < kParts; ++p) {
      if (fractional[c][p]) cap[1 + c][1 + classes + p] = 1;
    }
  }
  for (int p = 0; p < kParts; ++p) {
    cap[1 + classes + p][sink] = static_cast<long>(col_need[p]);
  }
  auto residual = [&](size_t u, size_t v) -> long {
    auto it = cap[u].find(v);
    return it == cap[u].end() ? 0 : it->second;
  };
  while (true) {
    std::vector<size_t> parent(nodes, std::numeric_limits<size_t>::max());
    parent[source] = source;
    std::deque<size_t> queue{source};
    while (!queue.empty() && parent[sink] == std::numeric_limits<size_t>::max()) {
      const size_t u = queue.front();
      queue.pop_front();
      for (const auto& [v, c] : cap[u]) {
        if (c > 0 && parent[v] == std::numeric_limits<size_t>::max()) {
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (parent[sink] == std::numeric_limits<size_t>::max()) break;
    long flow = std::numeric_limits<long>::max();
    for (size_t v = sink; v != source; v = parent[v]) {
      flow = std::min(flow, residual(parent[v], v));
    }
    for (size_t v = sink; v != source; v = parent[v]) {
      cap[parent[v]][v] -= flow;
      cap[v][parent[v]] += flow;
    }
  }
  std::array<size_t, kParts> col_total{};
  for (size_t c = 0; c < classes; ++c) {
    size_t row_total = 0;
    for (int p = 0; p < kParts; ++p) {
      if (fractional[c][p] && residual(1 + c, 1 + classes + p) == 0) {
        ++alloc[c][p];
      }
      row_total += alloc[c][p];
      col_total[p] += alloc[c][p];
    }
    if (row_total != class_sizes[c]) {
      Fail(ErrorCode::kInternal, "stratified allocation lost samples");
    }
  }
  if (col_total != part_sizes) {
    Fail(ErrorCode::kInternal, "stratified allocation missed a part size");
  }
  return alloc;
}

}  // namespace

DataSplit Split(const FeatureDataset& data, const SplitSpec& spec) {
  const size_t n = data.size();
  ValidateSplit(spec, n);
  const size_t used = spec.target_train + spec.target_test +
                      spec.shadow_train + spec.shadow_test;
  size_t distill = n - used;
  if (spec.distill_cap) distill = std::min(distill, *spec.distill_cap);
  const std::array<size_t, kParts> sizes = {
      spec.target_train, spec.target_test, spec.shadow_train,
      spec.shadow_test,  distill,          n - used - distill};

  Rng rng(spec.seed);
  std::array<std::vector<size_t>, kParts> parts;
  if (!spec.stratified) {
    const std::vector<size_t> order = rng.Permutation(n);
    size_t offset = 0;
    for (int p = 0; p < kParts; ++p) {
      parts[p].assign(order.begin() + offset, order.begin() + offset + sizes[p]);
      offset += sizes[p];
    }
  } else {
    std::vector<std::vector<size_t>> by_class(data.class_count);
    for (size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);
    std::vector<size_t> class_sizes;
    for (auto& rows : by_class) {
      rng.Shuffle(std::span<size_t>(rows));
      class_sizes.push_back(rows.size());
    }
    const auto alloc = RoundAllocation(class_sizes, sizes, n);
    for (size_t c = 0; c < by_class.size(); ++c) {
      size_t offset = 0;
      for (int p = 0; p < kParts; ++p) {
        parts[p].insert(parts[p].end(), by_class[c].begin() + offset,
                        by_class[c].begin() + offset + alloc[c][p]);
        offset += alloc[c][p];
      }
    }
    for (auto& rows : parts) rng.Shuffle(std::span<size_t>(rows));
  }

  DataSplit out;
  out.target_train = data.Subset(parts[0]);
  out.target_test = data.Subset(parts[1]);
  out.shadow_train = data.Subset(parts[2]);
  out.shadow_test = data.Subset(parts[3]);
  out.distill = data.Subset(parts[4]);
  return out;
}

}  // namespace trajmia::data
