#pragma once

// Independent fate computation used only by tests: explores the concrete
// (infinite) crossing digraph directly, with depth pruning justified by the
// end drift bounds, and decides eligibility by running a cycle search on the
// explored subgraph.  Shares no machinery with the folded digraph it checks.

#include <map>
#include <set>
#include <vector>

#include "epg/ends.hpp"
#include "epg/folded.hpp"

namespace epg_test {

using namespace epg;

class FateOracle {
 public:
  FateOracle(const GraphPresentation& g, const GraphMapPresentation& m)
      : g_(g), m_(m), kinds_(classify_ends(g, m)) {
    std::map<std::string, EndShift> shifts = end_shifts(g, m);
    int max_amp = 0;
    for (const auto& [id, s] : shifts) {
      max_amp = std::max({max_amp, std::abs(s.delta_min), std::abs(s.delta_max)});
    }
    int orbit = static_cast<int>(g.ends.size());
    prune_depth_ = 8 + m.depth + (orbit + 2) * (max_amp + 2);
  }

  Fate fate(const EdgeAddr& e) {
    bool bwd = bwd_eligible(e);
    if (bwd && reaches_repelling_eligible(e)) return Fate::BackwardEscaping;
    if (fwd_eligible(e)) return Fate::Escaping;
    return Fate::Middle;
  }

 private:
  bool in_kind(const EdgeAddr& e, EndKind k) const {
    return !e.is_core() && kinds_.at(e.end) == k;
  }
  bool pruned_fwd(const EdgeAddr& e) const {
    return in_kind(e, EndKind::Attracting) && e.copy >= prune_depth_;
  }
  bool pruned_bwd(const EdgeAddr& e) const {
    return in_kind(e, EndKind::Repelling) && e.copy >= prune_depth_;
  }

  std::vector<EdgeAddr> successors(const EdgeAddr& e) const {
    std::vector<EdgeAddr> out;
    std::set<EdgeAddr> seen;
    for (const auto& o : edge_image(m_, e)) {
      if (seen.insert(o.edge).second) out.push_back(o.edge);
    }
    return out;
  }

  std::vector<EdgeAddr> predecessors(const EdgeAddr& e) const {
    std::set<EdgeAddr> out;
    // Stored cells whose image crosses e directly.
    for (const auto& [src, img] : m_.edge_images) {
      for (const auto& o : img) {
        if (o.edge == e) out.insert(src);
      }
    }
    // Translated copies: crossings of the depth-1 template shifted upward.
    if (!e.is_core()) {
      for (const auto& end : g_.ends) {
        for (const auto& de : end.domain.edges) {
          const EdgePath& tmpl =
              stored_edge_image(m_, end_edge(end.id, m_.depth - 1, de.id));
          for (const auto& o : tmpl) {
            if (o.edge.end != e.end || o.edge.local != e.local) continue;
            int delta = o.edge.copy - (m_.depth - 1);
            int src_copy = e.copy - delta;
            if (src_copy >= m_.depth) {
              out.insert(end_edge(end.id, src_copy, de.id));
            }
          }
        }
      }
    }
    return std::vector<EdgeAddr>(out.begin(), out.end());
  }

  // Explores from `start` along `step`, stopping at pruned leaves, and
  // reports whether the explored subgraph contains a directed cycle.
  template <typename StepFn, typename PruneFn>
  bool explore_has_cycle(const EdgeAddr& start, StepFn step, PruneFn prune,
                         std::set<EdgeAddr>* visited_out) const {
    std::vector<EdgeAddr> order{start};
    std::set<EdgeAddr> visited{start};
    for (size_t i = 0; i < order.size(); ++i) {
      if (visited.size() > 200000) {
        throw Error(ErrorKind::CapExceeded, "oracle exploration too large");
      }
      EdgeAddr cur = order[i];
      if (prune(cur)) continue;
      for (const auto& nxt : step(cur)) {
        if (visited.insert(nxt).second) order.push_back(nxt);
      }
    }
    if (visited_out) *visited_out = visited;
    // Cycle search: index the finite explored set and run an SCC pass.
    std::map<EdgeAddr, int> idx;
    int k = 0;
    for (const auto& e : visited) idx[e] = k++;
    std::vector<std::vector<int>> adj(static_cast<size_t>(k));
    for (const auto& e : visited) {
      if (prune(e)) continue;  // pruned leaves keep no out-arcs
      for (const auto& nxt : step(e)) {
        adj[static_cast<size_t>(idx[e])].push_back(idx[nxt]);
      }
    }
    for (const auto& comp : strongly_connected_components(adj)) {
      if (comp.size() > 1) return true;
      int v = comp[0];
      for (int w : adj[static_cast<size_t>(v)]) {
        if (w == v) return true;
      }
    }
    return false;
  }

  bool fwd_eligible(const EdgeAddr& e) {
    auto it = fwd_memo_.find(e);
    if (it != fwd_memo_.end()) return it->second;
    bool ok = !explore_has_cycle(
        e, [&](const EdgeAddr& x) { return successors(x); },
        [&](const EdgeAddr& x) { return pruned_fwd(x); }, nullptr);
    fwd_memo_[e] = ok;
    return ok;
  }

  bool bwd_eligible(const EdgeAddr& e) {
    auto it = bwd_memo_.find(e);
    if (it != bwd_memo_.end()) return it->second;
    bool ok = !explore_has_cycle(
        e, [&](const EdgeAddr& x) { return predecessors(x); },
        [&](const EdgeAddr& x) { return pruned_bwd(x); }, nullptr);
    bwd_memo_[e] = ok;
    return ok;
  }

  bool reaches_repelling_eligible(const EdgeAddr& e) {
    std::set<EdgeAddr> fwd_set;
    explore_has_cycle(
        e, [&](const EdgeAddr& x) { return successors(x); },
        [&](const EdgeAddr& x) { return pruned_fwd(x); }, &fwd_set);
    for (const auto& x : fwd_set) {
      if (in_kind(x, EndKind::Repelling) && bwd_eligible(x)) return true;
    }
    return false;
  }

  const GraphPresentation& g_;
  const GraphMapPresentation& m_;
  std::map<std::string, EndKind> kinds_;
  int prune_depth_;
  std::map<EdgeAddr, bool> fwd_memo_, bwd_memo_;
};

}  // namespace epg_test
