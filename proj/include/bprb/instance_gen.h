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

#ifndef BPRB_INSTANCE_GEN_H_
#define BPRB_INSTANCE_GEN_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bprb/mip.h"

namespace bprb {

// Simple undirected graph. Edges are stored as (u, v) with u < v, sorted,
// without duplicates or self-loops.
struct Graph {
  int n_nodes = 0;
  std::vector<std::pair<int, int>> edges;

  // Validates the invariants above (sorting is enforced, not just checked).
  static Graph FromEdges(int n_nodes, std::vector<std::pair<int, int>> edges);
  std::vector<std::vector<int>> Adjacency() const;
  bool operator==(const Graph&) const = default;
};

// Preferential attachment: nodes 0..affinity-1 start isolated; every later
// node attaches to `affinity` distinct earlier nodes drawn proportionally to
// their degree (the first arrival attaches to all seed nodes). The result has
// exactly affinity * (n_nodes - affinity) edges. Requires n_nodes > affinity.
Graph GenerateGraph(int n_nodes, int affinity, uint64_t seed);

// Erdos-Renyi G(n, p).
Graph GenerateGraphEr(int n_nodes, double edge_probability, uint64_t seed);

// min sum x_v  s.t.  x_u + x_v >= 1 for every edge.
MipInstance VertexCoverInstance(const Graph& graph, std::string name = "vc");
// max sum x_v  s.t.  x_u + x_v <= 1 for every edge.
MipInstance IndependentSetInstance(const Graph& graph, std::string name = "mis");
// min sum x_v  s.t.  x_v + sum_{u in N(v)} x_u >= 1 for every node.
MipInstance DominatingSetInstance(const Graph& graph, std::string name = "ds");

struct Bid {
  std::vector<int> items;  // sorted, distinct
  double price = 0.0;
};

struct AuctionSpec {
  int n_items = 0;
  std::vector<Bid> bids;
};

// Bundles are random walks over a preferential-attachment item compatibility
// graph; sizes are uniform in [2, 10] (capped at n_items) and the price is
// size * (1 + U[0, 0.5]) rounded to cents.
AuctionSpec GenerateAuction(int n_items, int n_bids, uint64_t seed);

// max sum price_j x_j  s.t.  sum_{j : i in bid_j} x_j <= 1 for every item
// that appears in at least one bid.
MipInstance AuctionInstance(const AuctionSpec& spec, std::string name = "ca");

MipInstance GenerateCombinatorialAuction(int n_items, int n_bids, uint64_t seed);

// Item count giving roughly the 1500:560 variable/row ratio of the large
// auction benchmark for a given number of bids.
int DefaultAuctionItems(int n_bids);

enum class Family { kVertexCover, kIndependentSet, kDominatingSet, kAuction };

std::string FamilyName(Family family);
Family ParseFamily(const std::string& name);

struct FamilyScale {
  int n_nodes = 50;    // graph families
  int affinity = 4;    // graph families
  int n_items = 100;   // auctions
  int n_bids = 150;    // auctions
};

// Generates one instance of `family` named "<family>_<seed>".
MipInstance GenerateFamilyInstance(Family family, const FamilyScale& scale,
                                   uint64_t seed);

}  // namespace bprb

#endif  // BPRB_INSTANCE_GEN_H_
