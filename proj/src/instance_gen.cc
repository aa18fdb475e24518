// Copyright 2026 the bprb Authors
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

#include "bprb/instance_gen.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "bprb/error.h"
#include "bprb/rng.h"

namespace bprb {

Graph Graph::FromEdges(int n_nodes, std::vector<std::pair<int, int>> edges) {
  if (n_nodes < 0) throw InvalidParameterError("negative node count");
  for (auto& [u, v] : edges) {
    if (u > v) std::swap(u, v);
    if (u == v) throw InvalidParameterError("self-loop on node " + std::to_string(u));
    if (u < 0 || v >= n_nodes) throw IndexError("edge endpoint out of range");
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw InvalidParameterError("duplicate edge");
  }
  return Graph{n_nodes, std::move(edges)};
}

std::vector<std::vector<int>> Graph::Adjacency() const {
  std::vector<std::vector<int>> adjacency(n_nodes);
  for (const auto& [u, v] : edges) {
    adjacency[u].push_back(v);
    adjacency[v].push_back(u);
  }
  for (auto& neighbors : adjacency) std::sort(neighbors.begin(), neighbors.end());
  return adjacency;
}

Graph GenerateGraph(int n_nodes, int affinity, uint64_t seed) {
  if (affinity < 1 || n_nodes <= affinity) {
    throw InvalidParameterError("preferential attachment needs n_nodes > affinity >= 1 (got n_nodes=" +
                                std::to_string(n_nodes) + ", affinity=" +
                                std::to_string(affinity) + ")");
  }
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<size_t>(affinity) * (n_nodes - affinity));
  // Every node appears once per incident edge, so a uniform draw from this
  // list is a degree-proportional draw.
  std::vector<int> repeated;
  std::vector<int> targets(affinity);
  for (int k = 0; k < affinity; ++k) targets[k] = k;
  for (int source = affinity; source < n_nodes; ++source) {
    for (int t : targets) {
      edges.emplace_back(t, source);
      repeated.push_back(t);
      repeated.push_back(source);
    }
    std::set<int> chosen;
    while (static_cast<int>(chosen.size()) < affinity) {
      chosen.insert(repeated[rng.UniformInt(repeated.size())]);
    }
    targets.assign(chosen.begin(), chosen.end());
  }
  return Graph::FromEdges(n_nodes, std::move(edges));
}

Graph GenerateGraphEr(int n_nodes, double edge_probability, uint64_t seed) {
  if (n_nodes < 1 || !(edge_probability >= 0.0 && edge_probability <= 1.0)) {
    throw InvalidParameterError("Erdos-Renyi graph needs n_nodes >= 1 and p in [0,1]");
  }
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n_nodes; ++u) {
    for (int v = u + 1; v < n_nodes; ++v) {
      if (rng.Bernoulli(edge_probability)) edges.emplace_back(u, v);
    }
  }
  return Graph::FromEdges(n_nodes, std::move(edges));
}

MipInstance VertexCoverInstance(const Graph& graph, std::string name) {
  std::vector<Row> rows;
  rows.reserve(graph.edges.size());
  for (const auto& [u, v] : graph.edges) rows.push_back(Row{{{u, -1.0}, {v, -1.0}}, -1.0});
  return MipInstance::Binary(std::move(name), Sense::kMinimize,
                             std::vector<double>(graph.n_nodes, 1.0), std::move(rows));
}

MipInstance IndependentSetInstance(const Graph& graph, std::string name) {
  std::vector<Row> rows;
  rows.reserve(graph.edges.size());
  for (const auto& [u, v] : graph.edges) rows.push_back(Row{{{u, 1.0}, {v, 1.0}}, 1.0});
  return MipInstance::Binary(std::move(name), Sense::kMaximize,
                             std::vector<double>(graph.n_nodes, -1.0), std::move(rows));
}

MipInstance DominatingSetInstance(const Graph& graph, std::string name) {
  const auto adjacency = graph.Adjacency();
  std::vector<Row> rows;
  rows.reserve(graph.n_nodes);
  for (int v = 0; v < graph.n_nodes; ++v) {
    Row row;
    row.rhs = -1.0;
    row.entries.push_back({v, -1.0});
    for (int u : adjacency[v]) row.entries.push_back({u, -1.0});
    rows.push_back(std::move(row));
  }
  return MipInstance::Binary(std::move(name), Sense::kMinimize,
                             std::vector<double>(graph.n_nodes, 1.0), std::move(rows));
}

AuctionSpec GenerateAuction(int n_items, int n_bids, uint64_t seed) {
  if (n_items < 1 || n_bids < 1) {
    throw InvalidParameterError("auction needs n_items >= 1 and n_bids >= 1");
  }
  Rng rng(seed);
  std::vector<std::vector<int>> compatible(n_items);
  if (n_items >= 2) {
    const int affinity = std::min(4, n_items - 1);
    compatible = GenerateGraph(n_items, affinity, rng.NextU64()).Adjacency();
  }
  AuctionSpec spec;
  spec.n_items = n_items;
  spec.bids.reserve(n_bids);
  for (int b = 0; b < n_bids; ++b) {
    const int size = std::min<int>(n_items, 2 + static_cast<int>(rng.UniformInt(9)));
    int current = static_cast<int>(rng.UniformInt(n_items));
    std::set<int> bundle{current};
    for (int step = 0; step < 10 * size && static_cast<int>(bundle.size()) < size; ++step) {
      const auto& neighbors = compatible[current];
      if (neighbors.empty()) break;
      current = neighbors[rng.UniformInt(neighbors.size())];
      bundle.insert(current);
    }
    Bid bid;
    bid.items.assign(bundle.begin(), bundle.end());
    const double raw = static_cast<double>(bid.items.size()) * (1.0 + rng.Uniform(0.0, 0.5));
    bid.price = std::round(raw * 100.0) / 100.0;
    spec.bids.push_back(std::move(bid));
  }
  return spec;
}

MipInstance AuctionInstance(const AuctionSpec& spec, std::string name) {
  std::vector<std::vector<int>> bids_of_item(spec.n_items);
  std::vector<double> objective;
  objective.reserve(spec.bids.size());
  for (size_t j = 0; j < spec.bids.size(); ++j) {
    const Bid& bid = spec.bids[j];
    if (bid.items.empty()) throw InvalidParameterError("bid " + std::to_string(j) + " is empty");
    if (!(bid.price > 0.0)) throw InvalidParameterError("bid " + std::to_string(j) + " has non-positive price");
    for (int item : bid.items) {
      if (item < 0 || item >= spec.n_items) {
        throw IndexError("bid " + std::to_string(j) + " references item " + std::to_string(item));
      }
      if (!bids_of_item[item].empty() && bids_of_item[item].back() == static_cast<int>(j)) {
        throw InvalidParameterError("bid " + std::to_string(j) + " repeats an item");
      }
      bids_of_item[item].push_back(static_cast<int>(j));
    }
    objective.push_back(-bid.price);
  }
  std::vector<Row> rows;
  for (const auto& bidders : bids_of_item) {
    if (bidders.empty()) continue;
    Row row;
    row.rhs = 1.0;
    for (int j : bidders) row.entries.push_back({j, 1.0});
    rows.push_back(std::move(row));
  }
  return MipInstance::Binary(std::move(name), Sense::kMaximize, std::move(objective),
                             std::move(rows));
}

MipInstance GenerateCombinatorialAuction(int n_items, int n_bids, uint64_t seed) {
  return AuctionInstance(GenerateAuction(n_items, n_bids, seed),
                         "ca_" + std::to_string(seed));
}

int DefaultAuctionItems(int n_bids) {
  return std::max(1, static_cast<int>(std::lround(n_bids * 560.0 / 1500.0)));
}

std::string FamilyName(Family family) {
  switch (family) {
    case Family::kVertexCover: return "vc";
    case Family::kIndependentSet: return "mis";
    case Family::kDominatingSet: return "ds";
    case Family::kAuction: return "ca";
  }
  return "unknown";
}

Family ParseFamily(const std::string& name) {
  if (name == "vc") return Family::kVertexCover;
  if (name == "mis") return Family::kIndependentSet;
  if (name == "ds") return Family::kDominatingSet;
  if (name == "ca") return Family::kAuction;
  throw InvalidParameterError("unknown family '" + name + "' (expected vc, mis, ds or ca)");
}

MipInstance GenerateFamilyInstance(Family family, const FamilyScale& scale, uint64_t seed) {
  const std::string name = FamilyName(family) + "_" + std::to_string(seed);
  switch (family) {
    case Family::kVertexCover:
      return VertexCoverInstance(GenerateGraph(scale.n_nodes, scale.affinity, seed), name);
    case Family::kIndependentSet:
      return IndependentSetInstance(GenerateGraph(scale.n_nodes, scale.affinity, seed), name);
    case Family::kDominatingSet:
      return DominatingSetInstance(GenerateGraph(scale.n_nodes, scale.affinity, seed), name);
    case Family::kAuction:
      return AuctionInstance(GenerateAuction(scale.n_items, scale.n_bids, seed), name);
  }
  throw InvalidParameterError("unknown family");
}

}  // namespace bprb
