#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hyperobs/system.hpp"

namespace hyperobs {

// Weight-free view of a system: head sets and tails only. Dynamic hyperedges
// come from the supports of the A_k (heads = leading indices, tail = last);
// output hyperedges take every index of a C_{i,k} entry as a head, anchored
// at output i.
struct DirectedHyperedge {
  std::set<int> heads;
  int tail = 0;  // state node for dynamic edges, output index for output edges

  auto operator<=>(const DirectedHyperedge&) const = default;
};

struct StructuralHypergraph {
  int n = 0;
  std::set<DirectedHyperedge> dynamic_edges;
  // output_edges[i] = head sets of output i (tails are the output itself)
  std::vector<std::set<std::set<int>>> output_edges;

  static StructuralHypergraph from_system(const HypergraphSystem& sys);
};

// R^0 = union of output heads; R^{t+1} adds heads of dynamic edges whose tail
// already lies in R^t; runs to the fixpoint (at most n steps).
std::vector<std::set<int>> observational_closure(const StructuralHypergraph& h);

struct DiameterResult {
  std::optional<int> diameter;                // nullopt = infinity
  std::vector<std::optional<int>> distance;   // backward distance per node (1-based order)
  std::vector<std::set<int>> layers;          // L_t = R^t \ R^{t-1}
};
DiameterResult observational_diameter(const StructuralHypergraph& h);

struct AutomorphismOptions {
  int node_cap = 10;             // brute-force bound
  bool permute_outputs = false;  // exploratory mode: outputs may swap
};

// All node permutations preserving the dynamic edge set and each output's
// edge set (outputs fixed pointwise unless permute_outputs). Identity always
// included. Throws SystemError above the node cap.
std::vector<std::vector<int>> automorphisms(const StructuralHypergraph& h,
                                            const AutomorphismOptions& opts = {});

struct StructuralVerdict {
  bool certified = false;
  std::string reason;                             // violated condition if any
  std::optional<int> diameter;
  std::vector<std::vector<int>> nontrivial_automorphisms;
};

// Sufficient test: certified iff the observational diameter is finite and the
// automorphism group is trivial.
StructuralVerdict structural_observability_test(const StructuralHypergraph& h,
                                                const AutomorphismOptions& opts = {});

}  // namespace hyperobs
