#include "hyperobs/structural.hpp"

#include <algorithm>
#include <numeric>

namespace hyperobs {

StructuralHypergraph StructuralHypergraph::from_system(const HypergraphSystem& sys) {
  StructuralHypergraph h;
  h.n = sys.n;
  for (const auto& t : sys.dynamics) {
    for (const auto& [idx, v] : t.entries()) {
      DirectedHyperedge e;
      e.heads.insert(idx.begin(), idx.end() - 1);
      e.tail = idx.back();
      h.dynamic_edges.insert(std::move(e));
    }
  }
  h.output_edges.resize(sys.outputs.size());
  for (size_t i = 0; i < sys.outputs.size(); ++i) {
    for (const auto& t : sys.outputs[i]) {
      for (const auto& [idx, v] : t.entries())
        h.output_edges[i].insert(std::set<int>(idx.begin(), idx.end()));
    }
  }
  return h;
}

std::vector<std::set<int>> observational_closure(const StructuralHypergraph& h) {
  std::vector<std::set<int>> closure;
  std::set<int> reached;
  for (const auto& edges : h.output_edges)
    for (const auto& heads : edges) reached.insert(heads.begin(), heads.end());
  closure.push_back(reached);
  for (;;) {
    std::set<int> next = reached;
    for (const auto& e : h.dynamic_edges)
      if (reached.count(e.tail)) next.insert(e.heads.begin(), e.heads.end());
    if (next == reached) break;
    reached = std::move(next);
    closure.push_back(reached);
  }
  return closure;
}

DiameterResult observational_diameter(const StructuralHypergraph& h) {
  DiameterResult result;
  auto closure = observational_closure(h);
  result.distance.assign(h.n, std::nullopt);
  for (size_t t = 0; t < closure.size(); ++t) {
    std::set<int> layer;
    for (int node : closure[t]) {
      if (!result.distance[node - 1]) {
        result.distance[node - 1] = static_cast<int>(t);
        layer.insert(node);
      }
    }
    result.layers.push_back(std::move(layer));
  }
  bool all = std::all_of(result.distance.begin(), result.distance.end(),
                         [](const auto& d) { return d.has_value(); });
  if (all) {
    int t = 0;
    for (const auto& d : result.distance) t = std::max(t, *d);
    result.diameter = t;
  }
  return result;
}

namespace {

std::set<int> apply_perm(const std::vector<int>& perm, const std::set<int>& nodes) {
  std::set<int> out;
  for (int v : nodes) out.insert(perm[v - 1]);
  return out;
}

bool preserves(const StructuralHypergraph& h, const std::vector<int>& perm,
               bool permute_outputs) {
  std::set<DirectedHyperedge> mapped;
  for (const auto& e : h.dynamic_edges)
    mapped.insert(DirectedHyperedge{apply_perm(perm, e.heads), perm[e.tail - 1]});
  if (mapped != h.dynamic_edges) return false;

  auto map_edges = [&](const std::set<std::set<int>>& edges) {
    std::set<std::set<int>> out;
    for (const auto& heads : edges) out.insert(apply_perm(perm, heads));
    return out;
  };
  if (!permute_outputs) {
    // sensors are physically distinct: each output's edge set must map to itself
    for (const auto& edges : h.output_edges)
      if (map_edges(edges) != edges) return false;
    return true;
  }
  // exploratory mode: the multiset of per-output edge sets must be preserved
  std::vector<std::set<std::set<int>>> mapped_outputs;
  for (const auto& edges : h.output_edges) mapped_outputs.push_back(map_edges(edges));
  std::vector<std::set<std::set<int>>> original = h.output_edges;
  std::sort(mapped_outputs.begin(), mapped_outputs.end());
  std::sort(original.begin(), original.end());
  return mapped_outputs == original;
}

// node invariants for pruning: (tail multiset of orders, head membership
// counts, output membership)
struct NodeSignature {
  std::vector<int> tail_orders;
  std::vector<int> head_orders;
  std::set<size_t> outputs;

  auto operator<=>(const NodeSignature&) const = default;
};

NodeSignature signature_of(const StructuralHypergraph& h, int node, bool permute_outputs) {
  NodeSignature s;
  for (const auto& e : h.dynamic_edges) {
    int card = static_cast<int>(e.heads.size()) + 1;
    if (e.tail == node) s.tail_orders.push_back(card);
    if (e.heads.count(node)) s.head_orders.push_back(card);
  }
  std::sort(s.tail_orders.begin(), s.tail_orders.end());
  std::sort(s.head_orders.begin(), s.head_orders.end());
  if (!permute_outputs) {
    for (size_t i = 0; i < h.output_edges.size(); ++i)
      for (const auto& heads : h.output_edges[i])
        if (heads.count(node)) s.outputs.insert(i);
  } else {
    // only the number of output memberships is invariant when outputs swap
    size_t count = 0;
    for (const auto& edges : h.output_edges)
      for (const auto& heads : edges)
        if (heads.count(node)) ++count;
    if (count > 0) s.outputs.insert(count);
  }
  return s;
}

}  // namespace

std::vector<std::vector<int>> automorphisms(const StructuralHypergraph& h,
                                            const AutomorphismOptions& opts) {
  if (h.n > opts.node_cap)
    throw SystemError("hypergraph too large for exact automorphism search (n = " +
                      std::to_string(h.n) + ", cap = " + std::to_string(opts.node_cap) + ")");

  std::vector<NodeSignature> sig;
  for (int v = 1; v <= h.n; ++v) sig.push_back(signature_of(h, v, opts.permute_outputs));

  std::vector<std::vector<int>> result;
  std::vector<int> perm(h.n, 0);
  std::vector<bool> used(h.n + 1, false);

  // backtracking over images, pruned by signature equality
  auto search = [&](auto&& self, int node) -> void {
    if (node > h.n) {
      if (preserves(h, perm, opts.permute_outputs)) result.push_back(perm);
      return;
    }
    for (int image = 1; image <= h.n; ++image) {
      if (used[image] || sig[node - 1] != sig[image - 1]) continue;
      perm[node - 1] = image;
      used[image] = true;
      self(self, node + 1);
      used[image] = false;
    }
  };
  search(search, 1);
  return result;
}

StructuralVerdict structural_observability_test(const StructuralHypergraph& h,
                                                const AutomorphismOptions& opts) {
  StructuralVerdict verdict;
  auto diam = observational_diameter(h);
  verdict.diameter = diam.diameter;
  if (!diam.diameter) {
    verdict.certified = false;
    std::string missing;
    for (int v = 1; v <= h.n; ++v)
      if (!diam.distance[v - 1]) missing += (missing.empty() ? "" : ", ") + std::to_string(v);
    verdict.reason = "reachability: nodes {" + missing + "} never enter the closure";
    return verdict;
  }

  auto perms = automorphisms(h, opts);
  for (const auto& p : perms) {
    bool identity = true;
    for (int v = 1; v <= h.n; ++v)
      if (p[v - 1] != v) identity = false;
    if (!identity) verdict.nontrivial_automorphisms.push_back(p);
  }
  if (!verdict.nontrivial_automorphisms.empty()) {
    verdict.certified = false;
    std::string perm_str;
    for (int v : verdict.nontrivial_automorphisms.front())
      perm_str += (perm_str.empty() ? "" : " ") + std::to_string(v);
    verdict.reason = "symmetry: nontrivial automorphism (" + perm_str + ")";
    return verdict;
  }
  verdict.certified = true;
  return verdict;
}

}  // namespace hyperobs
