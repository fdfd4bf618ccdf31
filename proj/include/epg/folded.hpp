#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "epg/ends.hpp"
#include "epg/map_presentation.hpp"
#include "epg/spectral.hpp"

namespace epg {

// Every edge of the (infinite) graph is eventually either escaping (its
// forward images drift out an attracting end), backward escaping (it drifts
// out a repelling end under preimages), or neither.  This module decides the
// fate of every edge with a finite digraph: edges of the core and of a
// bounded window of each end appear as explicit nodes, and for each end all
// copies of a domain edge beyond the window are folded into one node.  The
// window is wide enough that (a) every stored image lands on explicit or
// core nodes and (b) folded nodes behave uniformly, so the folded digraph is
// an exact quotient of the true crossing digraph.

enum class Fate { Escaping, BackwardEscaping, Middle };

inline const char* to_string(Fate f) {
  switch (f) {
    case Fate::Escaping: return "escaping";
    case Fate::BackwardEscaping: return "backward-escaping";
    case Fate::Middle: return "middle";
  }
  return "?";
}

struct FateNode {
  enum Kind { Core, Explicit, Folded } kind;
  std::string end;    // empty for Core
  int copy = 0;       // Explicit only
  std::string local;  // edge id

  friend bool operator<(const FateNode& a, const FateNode& b) {
    return std::tie(a.kind, a.end, a.copy, a.local) <
           std::tie(b.kind, b.end, b.copy, b.local);
  }
};

inline std::string format_node(const FateNode& n) {
  switch (n.kind) {
    case FateNode::Core: return "core:" + n.local;
    case FateNode::Explicit:
      return n.end + "@" + std::to_string(n.copy) + ":" + n.local;
    case FateNode::Folded:
      return n.end + "@n:" + n.local + " (n>=window)";
  }
  return "?";
}

class FateDigraph {
 public:
  FateDigraph(const GraphPresentation& g, const GraphMapPresentation& m,
              const std::map<std::string, EndKind>& kinds)
      : graph_(g), map_(m), kinds_(kinds) {
    compute_windows();
    build_nodes();
    build_arcs();
    classify();
  }

  int window(const std::string& end) const { return windows_.at(end); }

  Fate fate_of(const EdgeAddr& e) const { return fates_[node_of(e)]; }

  // True when only finitely many edges are neither escaping nor backward
  // escaping, i.e. no folded node is stuck in the middle.
  bool middle_is_finite() const {
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].kind == FateNode::Folded && fates_[i] == Fate::Middle) {
        return false;
      }
    }
    return true;
  }

  // Concrete middle edges (there are finitely many iff middle_is_finite).
  std::vector<EdgeAddr> middle_edges() const {
    std::vector<EdgeAddr> out;
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (fates_[i] != Fate::Middle) continue;
      const FateNode& n = nodes_[i];
      if (n.kind == FateNode::Core) {
        out.push_back(core_edge(n.local));
      } else if (n.kind == FateNode::Explicit) {
        out.push_back(end_edge(n.end, n.copy, n.local));
      } else {
        throw Error(ErrorKind::NotGeneralizedEndperiodic,
                    "infinitely many middle edges at " + format_node(n));
      }
    }
    return out;
  }

  // Explicit (window) edges with the given fate; folded tails are reported
  // separately by folded_with_fate.
  std::vector<EdgeAddr> window_edges_with_fate(Fate f) const {
    std::vector<EdgeAddr> out;
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (fates_[i] != f) continue;
      const FateNode& n = nodes_[i];
      if (n.kind == FateNode::Core) {
        out.push_back(core_edge(n.local));
      } else if (n.kind == FateNode::Explicit) {
        out.push_back(end_edge(n.end, n.copy, n.local));
      }
    }
    return out;
  }

  std::vector<FateNode> folded_with_fate(Fate f) const {
    std::vector<FateNode> out;
    for (size_t i = 0; i < nodes_.size(); ++i) {
      if (fates_[i] == f && nodes_[i].kind == FateNode::Folded) {
        out.push_back(nodes_[i]);
      }
    }
    return out;
  }

  const std::vector<FateNode>& nodes() const { return nodes_; }
  Fate fate_of_node(size_t i) const { return fates_[i]; }

 private:
  void compute_windows() {
    std::map<std::string, EndShift> shifts = end_shifts(graph_, map_);
    // Deepest copy any stored image crossing reaches, per target end.
    std::map<std::string, int> deepest;
    for (const auto& [e, img] : map_.edge_images) {
      for (const auto& o : img) {
        if (o.edge.is_core()) continue;
        auto it = deepest.find(o.edge.end);
        if (it == deepest.end()) {
          deepest[o.edge.end] = o.edge.copy;
        } else {
          it->second = std::max(it->second, o.edge.copy);
        }
      }
    }
    for (const auto& end : graph_.ends) {
      const EndShift& s = shifts.at(end.id);
      int amp = std::max(std::abs(s.delta_min), std::abs(s.delta_max));
      int w = std::max(map_.depth + amp, map_.depth);
      auto it = deepest.find(end.id);
      if (it != deepest.end()) w = std::max(w, it->second + 1);
      windows_[end.id] = w;
    }
  }

  void build_nodes() {
    for (const auto& e : graph_.core.edges) {
      add_node(FateNode{FateNode::Core, "", 0, e.id});
    }
    for (const auto& end : graph_.ends) {
      for (int n = 0; n < windows_.at(end.id); ++n) {
        for (const auto& e : end.domain.edges) {
          add_node(FateNode{FateNode::Explicit, end.id, n, e.id});
        }
      }
      for (const auto& e : end.domain.edges) {
        add_node(FateNode{FateNode::Folded, end.id, 0, e.id});
      }
    }
  }

  void add_node(FateNode n) {
    index_[n] = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(n));
  }

  int node_of(const EdgeAddr& e) const {
    FateNode key;
    if (e.is_core()) {
      key = FateNode{FateNode::Core, "", 0, e.local};
    } else if (e.copy < windows_.at(e.end)) {
      key = FateNode{FateNode::Explicit, e.end, e.copy, e.local};
    } else {
      key = FateNode{FateNode::Folded, e.end, 0, e.local};
    }
    auto it = index_.find(key);
    if (it == index_.end()) {
      throw Error(ErrorKind::InvalidInput, "unknown edge '" + format_edge(e) + "'");
    }
    return it->second;
  }

  void add_arc(int from, int to) { arc_set_.insert({from, to}); }

  void build_arcs() {
    // Arcs from core and explicit nodes follow the concrete image crossings.
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const FateNode& n = nodes_[i];
      if (n.kind == FateNode::Folded) continue;
      EdgeAddr e = n.kind == FateNode::Core ? core_edge(n.local)
                                            : end_edge(n.end, n.copy, n.local);
      for (const auto& o : edge_image(map_, e)) {
        add_arc(static_cast<int>(i), node_of(o.edge));
      }
    }
    // Arcs from a folded node (copies n >= W of one domain edge) follow the
    // translated template.  A crossing with shift delta lands at copy
    // n + delta: explicitly for the finitely many n below the target window,
    // and on the target's folded node for the infinite tail.
    for (size_t i = 0; i < nodes_.size(); ++i) {
      const FateNode& n = nodes_[i];
      if (n.kind != FateNode::Folded) continue;
      int w_src = windows_.at(n.end);
      const EdgePath& tmpl =
          stored_edge_image(map_, end_edge(n.end, map_.depth - 1, n.local));
      for (const auto& o : tmpl) {
        int delta = o.edge.copy - (map_.depth - 1);
        int w_tgt = windows_.at(o.edge.end);
        for (int src_copy = w_src; src_copy < w_tgt - delta; ++src_copy) {
          add_arc(static_cast<int>(i),
                  node_of(end_edge(o.edge.end, src_copy + delta, o.edge.local)));
        }
        add_arc(static_cast<int>(i),
                node_of(end_edge(o.edge.end, std::max(w_src + delta, w_tgt),
                                 o.edge.local)));
      }
    }
    adj_.assign(nodes_.size(), {});
    for (const auto& [from, to] : arc_set_) {
      adj_[static_cast<size_t>(from)].push_back(to);
    }
  }

  bool node_in_end_kind(const FateNode& n, EndKind k) const {
    if (n.kind == FateNode::Core) return false;
    return kinds_.at(n.end) == k;
  }

  void classify() {
    size_t nn = nodes_.size();
    std::vector<std::vector<int>> comps = strongly_connected_components(adj_);
    std::vector<int> comp_of(nn, -1);
    for (size_t c = 0; c < comps.size(); ++c) {
      for (int v : comps[c]) comp_of[static_cast<size_t>(v)] = static_cast<int>(c);
    }
    std::vector<char> has_cycle(comps.size(), 0);
    for (size_t c = 0; c < comps.size(); ++c) {
      if (comps[c].size() > 1) {
        has_cycle[c] = 1;
      } else {
        int v = comps[c][0];
        for (int w : adj_[static_cast<size_t>(v)]) {
          if (w == v) has_cycle[c] = 1;
        }
      }
    }
    auto all_folded_of_kind = [&](const std::vector<int>& comp, EndKind k) {
      for (int v : comp) {
        const FateNode& n = nodes_[static_cast<size_t>(v)];
        if (n.kind != FateNode::Folded || !node_in_end_kind(n, k)) return false;
      }
      return true;
    };
    // A cycle is harmless for the forward test only when it lives entirely
    // on folded attracting nodes (the concrete copies drift outward, so the
    // apparent cycle is an artifact of folding); same for backward with
    // repelling nodes.
    std::vector<char> bad_fwd(comps.size(), 0), bad_bwd(comps.size(), 0);
    for (size_t c = 0; c < comps.size(); ++c) {
      if (!has_cycle[c]) continue;
      if (!all_folded_of_kind(comps[c], EndKind::Attracting)) bad_fwd[c] = 1;
      if (!all_folded_of_kind(comps[c], EndKind::Repelling)) bad_bwd[c] = 1;
    }
    // Tarjan emits components sinks-first, so in emission order every
    // successor of a component is already processed, and in reverse order
    // every predecessor is.
    std::vector<char> fwd_bad_reach(comps.size(), 0);
    std::vector<char> seed_reach(comps.size(), 0);
    std::vector<char> bwd_bad_reach(comps.size(), 0);
    std::vector<char> comp_has_seed(comps.size(), 0);
    std::vector<std::set<int>> comp_succ(comps.size());
    for (size_t v = 0; v < nn; ++v) {
      for (int w : adj_[v]) {
        int cv = comp_of[v], cw = comp_of[static_cast<size_t>(w)];
        if (cv != cw) comp_succ[static_cast<size_t>(cv)].insert(cw);
      }
    }
    // Forward: emission order has successors first.
    for (size_t c = 0; c < comps.size(); ++c) {
      if (bad_fwd[c]) fwd_bad_reach[c] = 1;
      for (int s : comp_succ[c]) {
        if (fwd_bad_reach[static_cast<size_t>(s)]) fwd_bad_reach[c] = 1;
      }
    }
    // Backward: reverse emission order has predecessors first, so a single
    // relaxation pass pushes spoilage from bad components to everything they
    // reach.
    for (size_t c = comps.size(); c-- > 0;) {
      if (bad_bwd[c]) bwd_bad_reach[c] = 1;
      if (!bwd_bad_reach[c]) continue;
      for (int s : comp_succ[c]) bwd_bad_reach[static_cast<size_t>(s)] = 1;
    }
    std::vector<char> bwd_eligible(nn, 0), fwd_eligible(nn, 0);
    for (size_t v = 0; v < nn; ++v) {
      fwd_eligible[v] = !fwd_bad_reach[static_cast<size_t>(comp_of[v])];
      bwd_eligible[v] = !bwd_bad_reach[static_cast<size_t>(comp_of[v])];
    }
    // Seeds: backward-eligible nodes inside repelling end regions.  An edge
    // is backward escaping when it is backward eligible and flows forward
    // into such a region.
    for (size_t v = 0; v < nn; ++v) {
      if (bwd_eligible[v] && node_in_end_kind(nodes_[v], EndKind::Repelling)) {
        comp_has_seed[static_cast<size_t>(comp_of[v])] = 1;
      }
    }
    for (size_t c = 0; c < comps.size(); ++c) {
      if (comp_has_seed[c]) seed_reach[c] = 1;
      for (int s : comp_succ[c]) {
        if (seed_reach[static_cast<size_t>(s)]) seed_reach[c] = 1;
      }
    }
    fates_.assign(nn, Fate::Middle);
    for (size_t v = 0; v < nn; ++v) {
      if (bwd_eligible[v] && seed_reach[static_cast<size_t>(comp_of[v])]) {
        fates_[v] = Fate::BackwardEscaping;
      } else if (fwd_eligible[v]) {
        fates_[v] = Fate::Escaping;
      } else {
        fates_[v] = Fate::Middle;
      }
    }
  }

  const GraphPresentation& graph_;
  const GraphMapPresentation& map_;
  std::map<std::string, EndKind> kinds_;
  std::map<std::string, int> windows_;
  std::vector<FateNode> nodes_;
  std::map<FateNode, int> index_;
  std::set<std::pair<int, int>> arc_set_;
  std::vector<std::vector<int>> adj_;
  std::vector<Fate> fates_;
};

}  // namespace epg
