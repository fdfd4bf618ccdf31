#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "epg/folded.hpp"

namespace epg {

// Crossing-count matrix over a fixed edge list: entry (i, j) counts how
// often the raw image of edges[j] crosses edges[i], in either direction.
inline IntMatrix transition_counts(const GraphMapPresentation& m,
                                   const std::vector<EdgeAddr>& edges) {
  std::map<EdgeAddr, size_t> idx;
  for (size_t i = 0; i < edges.size(); ++i) idx[edges[i]] = i;
  IntMatrix out = zero_matrix(edges.size());
  for (size_t j = 0; j < edges.size(); ++j) {
    for (const auto& o : edge_image(m, edges[j])) {
      auto it = idx.find(o.edge);
      if (it != idx.end()) out[it->second][j] += 1;
    }
  }
  return out;
}

struct Stratum {
  std::vector<EdgeAddr> edges;  // sorted by address
  IntMatrix matrix;
  double radius = 0.0;
  std::vector<double> eigenvector;  // right PF vector of `matrix`
  bool exponential = false;
};

// The canonical filtration of an endperiodic system: an infinite bottom
// piece of escaping edges, finitely many irreducible middle strata ordered
// so images flow downward, and an infinite top piece of backward escaping
// edges.  strata[k] is the k+1-st finite stratum from the bottom.
struct Filtration {
  std::map<std::string, EndKind> end_kinds;
  std::map<std::string, int> windows;
  std::vector<Stratum> strata;
  std::vector<EdgeAddr> escaping_window, backward_window;
  std::vector<FateNode> escaping_folded, backward_folded;

  double lambda() const {
    double best = 0.0;
    for (const auto& s : strata) best = std::max(best, s.radius);
    return best;
  }

  LambdaVector lambda_vector() const {
    std::vector<double> radii;
    for (const auto& s : strata) {
      if (s.exponential) radii.push_back(s.radius);
    }
    return LambdaVector::of(std::move(radii));
  }

  // Stratum index of a middle edge, or -1.
  int stratum_of(const EdgeAddr& e) const {
    for (size_t k = 0; k < strata.size(); ++k) {
      for (const auto& x : strata[k].edges) {
        if (x == e) return static_cast<int>(k);
      }
    }
    return -1;
  }
};

inline Filtration build_filtration(const GraphPresentation& g,
                                   const GraphMapPresentation& m) {
  Filtration out;
  out.end_kinds = classify_ends(g, m);
  FateDigraph fd(g, m, out.end_kinds);
  for (const auto& end : g.ends) out.windows[end.id] = fd.window(end.id);
  if (!fd.middle_is_finite()) {
    for (const auto& n : fd.folded_with_fate(Fate::Middle)) {
      throw Error(ErrorKind::NotGeneralizedEndperiodic,
                  "infinitely many middle edges (" + format_node(n) + ")");
    }
  }
  out.escaping_window = fd.window_edges_with_fate(Fate::Escaping);
  out.backward_window = fd.window_edges_with_fate(Fate::BackwardEscaping);
  out.escaping_folded = fd.folded_with_fate(Fate::Escaping);
  out.backward_folded = fd.folded_with_fate(Fate::BackwardEscaping);

  std::vector<EdgeAddr> middle = fd.middle_edges();
  std::sort(middle.begin(), middle.end());
  if (middle.empty()) return out;

  IntMatrix counts = transition_counts(m, middle);
  size_t n = middle.size();
  std::vector<std::vector<int>> adj(n);
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      if (counts[i][j] > 0 && i != j) adj[j].push_back(static_cast<int>(i));
    }
  }
  std::vector<std::vector<int>> comps = strongly_connected_components(adj);

  // Evaluate each irreducible block before ordering, since the tie-break
  // prefers non-exponential strata.
  std::map<EdgeAddr, size_t> gidx;
  for (size_t i = 0; i < n; ++i) gidx[middle[i]] = i;
  std::vector<Stratum> blocks(comps.size());
  std::vector<int> comp_of(n, -1);
  for (size_t c = 0; c < comps.size(); ++c) {
    for (int v : comps[c]) comp_of[static_cast<size_t>(v)] = static_cast<int>(c);
    Stratum& s = blocks[c];
    for (int v : comps[c]) s.edges.push_back(middle[static_cast<size_t>(v)]);
    std::sort(s.edges.begin(), s.edges.end());
    s.matrix = zero_matrix(s.edges.size());
    for (size_t jj = 0; jj < s.edges.size(); ++jj) {
      for (size_t ii = 0; ii < s.edges.size(); ++ii) {
        s.matrix[ii][jj] = counts[gidx[s.edges[ii]]][gidx[s.edges[jj]]];
      }
    }
    SpectralResult sr = spectral_radius(s.matrix);
    s.radius = sr.radius;
    s.eigenvector = sr.eigenvector;
    s.exponential = is_exponential_radius(s.radius);
  }

  // Order strata bottom-up: a stratum whose images cross another must come
  // later, so components are placed once all their successors are.  Among
  // simultaneously ready components, non-exponential ones are placed first,
  // then by smallest edge address.
  std::vector<std::set<int>> succ(comps.size());
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      if (counts[i][j] > 0 && comp_of[i] != comp_of[j]) {
        succ[static_cast<size_t>(comp_of[j])].insert(comp_of[i]);
      }
    }
  }
  std::vector<char> placed(comps.size(), 0);
  for (size_t round = 0; round < comps.size(); ++round) {
    int best = -1;
    for (size_t c = 0; c < comps.size(); ++c) {
      if (placed[c]) continue;
      bool ready = true;
      for (int s : succ[c]) {
        if (!placed[static_cast<size_t>(s)]) ready = false;
      }
      if (!ready) continue;
      if (best == -1) {
        best = static_cast<int>(c);
        continue;
      }
      const Stratum& cand = blocks[c];
      const Stratum& cur = blocks[static_cast<size_t>(best)];
      if (std::make_pair(cand.exponential ? 1 : 0, cand.edges.front()) <
          std::make_pair(cur.exponential ? 1 : 0, cur.edges.front())) {
        best = static_cast<int>(c);
      }
    }
    if (best == -1) {
      throw Error(ErrorKind::Internal, "stratum ordering is not acyclic");
    }
    placed[static_cast<size_t>(best)] = 1;
    out.strata.push_back(blocks[static_cast<size_t>(best)]);
  }
  return out;
}

// Re-derives the fates and checks that the filtration is compatible with the
// map: images of stratum k stay within {escaping} + strata <= k, escaping
// edges have escaping images, and anything crossing a backward edge is
// itself backward.  Returns human-readable violations (empty when valid).
inline std::vector<std::string> check_invariance(const GraphPresentation& g,
                                                 const GraphMapPresentation& m,
                                                 const Filtration& f) {
  std::vector<std::string> bad;
  FateDigraph fd(g, m, f.end_kinds);
  auto check_edge = [&](const EdgeAddr& e) {
    Fate fe = fd.fate_of(e);
    int level = f.stratum_of(e);
    for (const auto& o : edge_image(m, e)) {
      Fate fx = fd.fate_of(o.edge);
      if (fx == Fate::BackwardEscaping && fe != Fate::BackwardEscaping) {
        bad.push_back("image of " + format_edge(e) + " crosses backward edge " +
                      format_edge(o.edge));
      }
      if (fe == Fate::Escaping && fx != Fate::Escaping) {
        bad.push_back("escaping edge " + format_edge(e) + " crosses " +
                      format_edge(o.edge));
      }
      if (fe == Fate::Middle && fx == Fate::Middle) {
        int lx = f.stratum_of(o.edge);
        if (lx > level) {
          bad.push_back("image of " + format_edge(e) + " (stratum " +
                        std::to_string(level + 1) + ") crosses higher stratum edge " +
                        format_edge(o.edge));
        }
      }
    }
  };
  for (const auto& e : g.core.edges) check_edge(core_edge(e.id));
  for (const auto& end : g.ends) {
    for (int c = 0; c < fd.window(end.id); ++c) {
      for (const auto& e : end.domain.edges) check_edge(end_edge(end.id, c, e.id));
    }
  }
  return bad;
}

}  // namespace epg
