#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "epg/filtration.hpp"
#include "epg/moves.hpp"
#include "epg/turns.hpp"

namespace epg {

// Fast fate lookup derived from a built filtration.
class FateTable {
 public:
  explicit FateTable(const Filtration& f) : windows_(f.windows) {
    for (const auto& st : f.strata) {
      for (const auto& e : st.edges) middle_.insert(e);
    }
    esc_.insert(f.escaping_window.begin(), f.escaping_window.end());
    bwd_.insert(f.backward_window.begin(), f.backward_window.end());
    for (const auto& n : f.escaping_folded) efold_.insert({n.end, n.local});
    for (const auto& n : f.backward_folded) bfold_.insert({n.end, n.local});
  }

  Fate fate(const EdgeAddr& e) const {
    if (!e.is_core()) {
      auto w = windows_.find(e.end);
      if (w == windows_.end()) {
        throw Error(ErrorKind::InvalidInput, "unknown end '" + e.end + "'");
      }
      if (e.copy >= w->second) {
        if (efold_.count({e.end, e.local})) return Fate::Escaping;
        if (bfold_.count({e.end, e.local})) return Fate::BackwardEscaping;
        return Fate::Middle;
      }
    }
    if (middle_.count(e)) return Fate::Middle;
    if (bwd_.count(e)) return Fate::BackwardEscaping;
    if (esc_.count(e)) return Fate::Escaping;
    throw Error(ErrorKind::InvalidInput,
                "edge outside the filtration: " + format_edge(e));
  }

  int window(const std::string& end) const { return windows_.at(end); }

 private:
  std::map<std::string, int> windows_;
  std::set<EdgeAddr> middle_, esc_, bwd_;
  std::set<std::pair<std::string, std::string>> efold_, bfold_;
};

// Complexity of the filtration: the finite strata plus the backward edges
// whose images do not stay backward.
inline std::size_t boundedness(const GraphMapPresentation& m, const Filtration& f) {
  FateTable t(f);
  std::size_t total = 0;
  for (const auto& st : f.strata) total += st.edges.size();
  for (const auto& e : f.backward_window) {
    for (const auto& o : edge_image(m, e)) {
      if (t.fate(o.edge) != Fate::BackwardEscaping) {
        ++total;
        break;
      }
    }
  }
  return total;
}

struct Caps {
  int max_moves = 10000;
  int max_recomputes = 64;
};

namespace tt_detail {

struct WorkBudget {
  Caps caps;
  std::size_t base_moves = 0;
  int recomputes = 0;
  bool exceeded = false;

  void charge_recompute() {
    if (++recomputes > caps.max_recomputes) exceeded = true;
  }
  void check_moves(const TrackedMap& tm) {
    if (tm.log.size() - base_moves > static_cast<std::size_t>(caps.max_moves)) {
      exceeded = true;
    }
  }
};

}  // namespace tt_detail

// Housekeeping applied between structural moves: tighten images, collapse
// edges whose iterated images vanish, and prune valence-one edges.
inline void simplify_sweep(TrackedMap& tm) {
  pull_tight(tm);
  for (int guard = 0; guard < 64; ++guard) {
    bool changed = false;
    std::vector<std::string> pre = pretrivial_core_edges(tm.sys);
    if (!pre.empty()) {
      // Keep only an acyclic subset; a cycle of vanishing edges cannot be
      // collapsed in one go.
      std::map<std::string, std::string> parent;
      auto find = [&](std::string v) {
        while (parent.count(v) && parent[v] != v) v = parent[v];
        return v;
      };
      std::vector<std::string> forest;
      for (const auto& id : pre) {
        const EdgeRec& e = tm.sys.graph.core.edge(id);
        std::string a = find(e.tail), b = find(e.head);
        if (a == b) continue;
        parent.emplace(a, a);
        parent.emplace(b, b);
        parent[find(a)] = find(b);
        forest.push_back(id);
      }
      if (!forest.empty()) {
        try {
          collapse_core_forest(tm, forest, "pretrivial");
          changed = true;
        } catch (const Error& err) {
          if (err.kind() != ErrorKind::Unsupported) throw;
        }
      }
    }
    while (collapse_valence_one(tm)) changed = true;
    if (pull_tight(tm)) changed = true;
    if (!changed) break;
  }
}

// Applies the turn map `steps` times, failing if the turn collapses early.
inline Turn advance_turn(const GraphMapPresentation& m, Turn t, int steps) {
  for (int i = 0; i < steps; ++i) {
    auto nt = map_turn(m, t);
    if (!nt || is_degenerate(*nt)) {
      throw Error(ErrorKind::InvalidInput, "turn collapsed before its witness step");
    }
    t = *nt;
  }
  return t;
}

struct RepairCandidate {
  int stratum = 0;
  int witness = 0;
  Turn turn;
};

// Illegal turns taken by the images of exponential-stratum edges, ordered by
// (stratum, witness, turn name).
inline std::vector<RepairCandidate> illegal_taken_turns(const EpgSystem& s,
                                                        const Filtration& f) {
  std::map<std::string, RepairCandidate> seen;
  for (std::size_t k = 0; k < f.strata.size(); ++k) {
    if (!f.strata[k].exponential) continue;
    for (const auto& e : f.strata[k].edges) {
      EdgePath img = tighten(edge_image(s.map, e));
      for (const Turn& t : turns_taken(img)) {
        TurnClass c = classify_turn(s.map, t);
        if (c.legal) continue;
        std::string key = format_turn(t);
        if (!seen.count(key)) {
          seen[key] = RepairCandidate{static_cast<int>(k), c.witness, t};
        }
      }
    }
  }
  std::vector<RepairCandidate> out;
  for (const auto& [key, c] : seen) out.push_back(c);
  std::sort(out.begin(), out.end(), [](const RepairCandidate& a, const RepairCandidate& b) {
    return std::make_tuple(a.stratum, a.witness, format_turn(a.turn)) <
           std::make_tuple(b.stratum, b.witness, format_turn(b.turn));
  });
  return out;
}

struct MinimizeOutcome {
  Filtration filtration;
  bool cap_exceeded = false;
  int recomputes = 0;
};

namespace tt_detail {

inline Filtration rebuild(TrackedMap& tm, WorkBudget& b) {
  b.charge_recompute();
  Filtration f = build_filtration(tm.sys.graph, tm.sys.map);
  if (!tm.log.empty()) tm.log.back().lambda_after = f.lambda();
  return f;
}

// Greedy descent: speculatively repair each illegal turn and keep the result
// only when the stretch spectrum strictly drops.
inline Filtration minimize_impl(TrackedMap& tm, WorkBudget& b) {
  simplify_sweep(tm);
  Filtration best = rebuild(tm, b);
  while (!b.exceeded) {
    std::vector<RepairCandidate> cands = illegal_taken_turns(tm.sys, best);
    bool improved = false;
    for (const auto& cand : cands) {
      if (b.exceeded) break;
      TrackedMap spec = tm;
      try {
        Turn t = advance_turn(spec.sys.map, cand.turn, cand.witness - 1);
        fold_repair(spec, t);
        simplify_sweep(spec);
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::Internal) throw;
        continue;
      }
      b.check_moves(spec);
      if (b.exceeded) break;
      Filtration cf;
      try {
        b.charge_recompute();
        cf = build_filtration(spec.sys.graph, spec.sys.map);
      } catch (const Error&) {
        continue;
      }
      if (compare_lambda(cf.lambda_vector(), best.lambda_vector()) < 0) {
        spec.log.back().lambda_after = cf.lambda();
        tm = std::move(spec);
        best = std::move(cf);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  return best;
}

}  // namespace tt_detail

inline MinimizeOutcome minimize_lambda(TrackedMap& tm, const Caps& caps = {}) {
  tt_detail::WorkBudget b{caps, tm.log.size(), 0, false};
  Filtration f = tt_detail::minimize_impl(tm, b);
  return MinimizeOutcome{std::move(f), b.exceeded, b.recomputes};
}

// Cuts each edge of one exponential stratum just before its first and just
// after its last crossing of the stratum, so stratum images begin and end
// with stratum edges.  Cut points that are already at the boundary (in the
// mutually consistent, greatest sense) are left alone.  Returns false when
// the stratum is already aligned.
inline bool core_subdivide_stratum(TrackedMap& tm, const std::vector<EdgeAddr>& stratum_edges) {
  std::set<std::string> members;
  for (const auto& e : stratum_edges) {
    if (!e.is_core()) {
      throw Error(ErrorKind::Unsupported,
                  "exponential stratum reaches into an end region");
    }
    members.insert(e.local);
  }

  struct Crossings {
    bool has = false;
    std::size_t l = 0, r = 0, len = 0;
    std::string gl, gr;   // stratum edges crossed first/last
    bool sl = true, sr = true;  // crossed forwards?
  };
  std::map<std::string, Crossings> info;
  for (const auto& id : members) {
    const EdgePath& img = stored_edge_image(tm.sys.map, core_edge(id));
    Crossings c;
    c.len = img.size();
    for (std::size_t i = 0; i < img.size(); ++i) {
      if (!img[i].edge.is_core() || !members.count(img[i].edge.local)) continue;
      if (!c.has) {
        c.has = true;
        c.l = i;
        c.gl = img[i].edge.local;
        c.sl = !img[i].reversed;
      }
      c.r = i;
      c.gr = img[i].edge.local;
      c.sr = !img[i].reversed;
    }
    info[id] = c;
  }

  // Greatest fixed point of the "cut point already sits at the boundary"
  // predicates: a left boundary is genuine only if the first crossing is the
  // leading letter and the crossed edge needs no flank on the matching side.
  std::map<std::string, bool> at_left, at_right;
  for (const auto& id : members) at_left[id] = at_right[id] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& id : members) {
      const Crossings& c = info[id];
      if (!c.has) continue;
      bool nl = c.l == 0 && (c.sl ? at_left[c.gl] : at_right[c.gl]);
      bool nr = c.r + 1 == c.len && (c.sr ? at_right[c.gr] : at_left[c.gr]);
      if (nl != at_left[id]) {
        at_left[id] = nl;
        changed = true;
      }
      if (nr != at_right[id]) {
        at_right[id] = nr;
        changed = true;
      }
    }
  }

  bool any_cut = false;
  for (const auto& id : members) {
    if (info[id].has && (!at_left[id] || !at_right[id])) any_cut = true;
  }
  if (!any_cut) return false;

  GraphPresentation ng = tm.sys.graph;
  Corr fwd_c, bwd_c;
  std::map<std::string, std::string> carrier;  // member -> its carrier piece
  struct Pieces {
    std::string p1, p2, p3, v1, v2;
  };
  std::map<std::string, Pieces> cut;
  for (const auto& id : members) {
    bool lc = info[id].has && !at_left[id];
    bool rc = info[id].has && !at_right[id];
    if (!lc && !rc) {
      carrier[id] = id;
      continue;
    }
    Pieces p;
    p.p2 = moves_detail::unique_core_edge_id(ng.core, id + "_2");
    if (lc) {
      p.p1 = moves_detail::unique_core_edge_id(ng.core, id + "_1");
      p.v1 = moves_detail::unique_vertex_id(ng.core, id + "_v1");
      ng.core.vertices.push_back(p.v1);
    }
    if (rc) {
      p.p3 = moves_detail::unique_core_edge_id(ng.core, id + "_3");
      p.v2 = moves_detail::unique_vertex_id(ng.core, id + "_v2");
      ng.core.vertices.push_back(p.v2);
    }
    carrier[id] = p.p2;
    cut[id] = p;
  }

  std::vector<EdgeRec> new_edges;
  for (const auto& e : tm.sys.graph.core.edges) {
    auto it = cut.find(e.id);
    if (it == cut.end()) {
      new_edges.push_back(e);
      continue;
    }
    const Pieces& p = it->second;
    std::string a = e.tail, b = e.head;
    if (!p.p1.empty()) {
      new_edges.push_back(EdgeRec{p.p1, a, p.v1});
      a = p.v1;
    }
    std::string mid_head = p.p3.empty() ? b : p.v2;
    new_edges.push_back(EdgeRec{p.p2, a, mid_head});
    if (!p.p3.empty()) new_edges.push_back(EdgeRec{p.p3, p.v2, b});

    EdgePath chain;
    if (!p.p1.empty()) chain.push_back(fwd(core_edge(p.p1)));
    chain.push_back(fwd(core_edge(p.p2)));
    if (!p.p3.empty()) chain.push_back(fwd(core_edge(p.p3)));
    fwd_c.core_edges[e.id] = chain;
    if (!p.p1.empty()) {
      bwd_c.core_edges[p.p1] = {};
      bwd_c.core_vertices[p.v1] = core_vertex(e.tail);
    }
    bwd_c.core_edges[p.p2] = {fwd(core_edge(e.id))};
    if (!p.p3.empty()) {
      bwd_c.core_edges[p.p3] = {};
      bwd_c.core_vertices[p.v2] = core_vertex(e.head);
    }
  }
  ng.core.edges = std::move(new_edges);

  // Piece images: expand the old image and split at the first and last
  // sub-letter carried by the stratum.
  std::set<std::string> carriers;
  for (const auto& [id, c] : carrier) carriers.insert(c);
  std::map<EdgeAddr, EdgePath> edge_overrides;
  std::map<VertexAddr, VertexAddr> vertex_overrides;
  for (const auto& [id, p] : cut) {
    EdgePath expanded =
        apply_path_raw(fwd_c, stored_edge_image(tm.sys.map, core_edge(id)));
    std::size_t L1 = expanded.size(), L2 = 0;
    for (std::size_t i = 0; i < expanded.size(); ++i) {
      if (expanded[i].edge.is_core() && carriers.count(expanded[i].edge.local)) {
        L1 = std::min(L1, i);
        L2 = i;
      }
    }
    bool lc = !p.p1.empty(), rc = !p.p3.empty();
    if (L1 >= expanded.size() || (lc != (L1 > 0)) || (rc != (L2 + 1 < expanded.size()))) {
      throw Error(ErrorKind::Internal, "stratum boundary analysis is inconsistent");
    }
    if (lc) {
      edge_overrides[core_edge(p.p1)] =
          EdgePath(expanded.begin(), expanded.begin() + static_cast<std::ptrdiff_t>(L1));
      vertex_overrides[core_vertex(p.v1)] = oriented_tail(ng, expanded[L1]);
    }
    edge_overrides[core_edge(p.p2)] =
        EdgePath(expanded.begin() + static_cast<std::ptrdiff_t>(L1),
                 expanded.begin() + static_cast<std::ptrdiff_t>(L2 + 1));
    if (rc) {
      edge_overrides[core_edge(p.p3)] =
          EdgePath(expanded.begin() + static_cast<std::ptrdiff_t>(L2 + 1), expanded.end());
      vertex_overrides[core_vertex(p.v2)] = oriented_head(ng, expanded[L2]);
    }
  }

  std::string detail;
  for (const auto& [id, p] : cut) detail += (detail.empty() ? "" : ",") + id;
  moves_detail::commit(tm, std::move(ng), fwd_c, bwd_c, "subdivide-stratum", detail,
                       edge_overrides, vertex_overrides);
  return true;
}

// Searches breadth-first geodesics between attaching points of the given
// stratum, through strictly lower material, for a connecting path whose image
// tightens away.  The search is deterministic and sound but not exhaustive.
inline std::optional<EdgePath> find_inessential_path(const EpgSystem& s, const Filtration& f,
                                                     int stratum_index) {
  const Stratum& st = f.strata[static_cast<std::size_t>(stratum_index)];
  std::set<EdgeAddr> members(st.edges.begin(), st.edges.end());
  FateTable fates(f);

  auto allowed = [&](const OrientedEdge& o) {
    if (members.count(o.edge)) return false;
    if (!o.edge.is_core() && o.edge.copy > fates.window(o.edge.end) + 4) return false;
    Fate fe = fates.fate(o.edge);
    if (fe == Fate::BackwardEscaping) return false;
    if (fe == Fate::Middle && f.stratum_of(o.edge) >= stratum_index) return false;
    return true;
  };

  std::set<VertexAddr> attach;
  for (const auto& e : st.edges) {
    for (VertexAddr v : {edge_tail(s.graph, e), edge_head(s.graph, e)}) {
      for (const auto& o : incident_oriented(s.graph, v)) {
        if (!members.count(o.edge)) {
          attach.insert(v);
          break;
        }
      }
    }
  }

  std::vector<VertexAddr> pts(attach.begin(), attach.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::map<VertexAddr, OrientedEdge> parent;
    std::vector<VertexAddr> queue = {pts[i]};
    parent[pts[i]] = OrientedEdge{};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      VertexAddr v = queue[qi];
      for (const auto& o : incident_oriented(s.graph, v)) {
        if (!allowed(o)) continue;
        VertexAddr w = oriented_head(s.graph, o);
        if (parent.count(w)) continue;
        parent[w] = o;
        queue.push_back(w);
      }
    }
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j == i || !parent.count(pts[j])) continue;
      EdgePath path;
      for (VertexAddr v = pts[j]; !(v == pts[i]);) {
        OrientedEdge o = parent[v];
        path.push_back(o);
        v = oriented_tail(s.graph, o);
      }
      std::reverse(path.begin(), path.end());
      if (path.empty()) continue;
      if (tighten(map_path(s.map, path)).empty()) return path;
    }
  }
  return std::nullopt;
}

// Collapses one inessential connecting path by folding at a junction where
// the two sides' image letters agree.  Returns false when no path is found.
inline bool collapse_inessential_once(TrackedMap& tm, const Filtration& f, int stratum_index) {
  auto found = find_inessential_path(tm.sys, f, stratum_index);
  if (!found) return false;
  const EdgePath& alpha = *found;
  for (std::size_t i = 0; i + 1 < alpha.size(); ++i) {
    OrientedEdge in = alpha[i].reverse();
    OrientedEdge out = alpha[i + 1];
    auto d1 = derivative(tm.sys.map, in);
    auto d2 = derivative(tm.sys.map, out);
    if (!d1 || !d2 || !(*d1 == *d2)) continue;
    try {
      fold_repair(tm, make_turn(in, out));
      return true;
    } catch (const Error& err) {
      if (err.kind() == ErrorKind::Internal) throw;
    }
  }
  throw Error(ErrorKind::Unsupported,
              "connecting path " + format_path(alpha) + " cannot be folded");
}

struct RttReport {
  bool pass = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;
};

// Checks the relative train track conditions against the given filtration.
inline RttReport verify_rtt(const EpgSystem& s, const Filtration& f) {
  RttReport r;
  auto fail = [&](const std::string& msg) { r.failures.push_back(msg); };

  // Infinite parts must drain the right way: every end-region class stays in
  // the escaping (attracting side) or backward (repelling side) piece.
  std::set<std::pair<std::string, std::string>> efold, bfold;
  for (const auto& n : f.escaping_folded) efold.insert({n.end, n.local});
  for (const auto& n : f.backward_folded) bfold.insert({n.end, n.local});
  for (const auto& end : s.graph.ends) {
    bool attracting = f.end_kinds.at(end.id) == EndKind::Attracting;
    for (const auto& e : end.domain.edges) {
      const auto& want = attracting ? efold : bfold;
      if (!want.count({end.id, e.id})) {
        fail("deep class " + end.id + ":" + e.id + " does not " +
             (attracting ? "escape forward" : "escape backward"));
      }
    }
  }
  for (const auto& st : f.strata) {
    for (const auto& e : st.edges) {
      if (!e.is_core()) fail("finite stratum contains end edge " + format_edge(e));
    }
  }

  for (std::size_t k = 0; k < f.strata.size(); ++k) {
    if (!f.strata[k].exponential) continue;
    std::set<EdgeAddr> members(f.strata[k].edges.begin(), f.strata[k].edges.end());
    for (const auto& e : f.strata[k].edges) {
      EdgePath img = tighten(edge_image(s.map, e));
      if (img.empty() || !members.count(img.front().edge)) {
        fail("image of " + format_edge(e) + " does not begin within its stratum");
      }
      if (img.empty() || !members.count(img.back().edge)) {
        fail("image of " + format_edge(e) + " does not end within its stratum");
      }
      for (const Turn& t : turns_taken(img)) {
        bool internal = members.count(t.a.edge) && members.count(t.b.edge);
        try {
          TurnClass c = classify_turn(s.map, t);
          if (!c.legal) {
            fail("image of " + format_edge(e) + " takes the illegal turn " + format_turn(t));
            continue;
          }
        } catch (const Error&) {
          fail("turn " + format_turn(t) + " taken by " + format_edge(e) +
               " did not stabilize");
          continue;
        }
        if (!internal) continue;
        // Stratum-internal turns must stay internal under the turn map.
        Turn cur = t;
        std::set<std::string> seen;
        for (int step = 0; step < 64; ++step) {
          if (!seen.insert(format_turn(cur)).second) break;
          auto nt = map_turn(s.map, cur);
          if (!nt || is_degenerate(*nt)) {
            fail("stratum turn " + format_turn(t) + " degenerates");
            break;
          }
          cur = *nt;
          if (!members.count(cur.a.edge) || !members.count(cur.b.edge)) {
            fail("stratum turn " + format_turn(t) + " leaves the stratum");
            break;
          }
        }
      }
    }
    auto path = find_inessential_path(s, f, static_cast<int>(k));
    if (path) {
      fail("inessential connecting path " + format_path(*path));
    }
  }
  r.notes.push_back(
      "connecting-path search follows breadth-first geodesics only; "
      "a pass here is sound evidence, not a proof of absence");
  r.pass = r.failures.empty();
  return r;
}

inline RttReport verify_rtt(const EpgSystem& s) {
  return verify_rtt(s, build_filtration(s.graph, s.map));
}

namespace tt_detail {

// One backtracking fold: the first turn of an iterated image (up to six
// steps) that is illegal, lowest stratum first.
inline bool promote_fold_once(TrackedMap& tm, const Filtration& f) {
  std::vector<EdgeAddr> order;
  for (const auto& e : tm.sys.graph.core.edges) order.push_back(core_edge(e.id));
  std::stable_sort(order.begin(), order.end(), [&](const EdgeAddr& a, const EdgeAddr& b) {
    int sa = f.stratum_of(a), sb = f.stratum_of(b);
    return std::make_pair(sa < 0 ? static_cast<int>(f.strata.size()) : sa, a) <
           std::make_pair(sb < 0 ? static_cast<int>(f.strata.size()) : sb, b);
  });
  for (const auto& e : order) {
    EdgePath img = {fwd(e)};
    for (int k = 1; k <= 6; ++k) {
      img = tighten(map_path(tm.sys.map, img));
      for (const Turn& t : turns_taken(img)) {
        TurnClass c = classify_turn(tm.sys.map, t);
        if (c.legal) continue;
        try {
          Turn tt = advance_turn(tm.sys.map, t, c.witness - 1);
          fold_repair(tm, tt);
          return true;
        } catch (const Error& err) {
          if (err.kind() == ErrorKind::Internal) throw;
        }
      }
    }
  }
  return false;
}

}  // namespace tt_detail

// Final grooming towards a genuine train track: fold turns that backtrack
// within a few iterates, then cut every repelling end class so each piece
// maps onto a single edge.
inline void promote_to_train_track(TrackedMap& tm, const Caps& caps = {}) {
  tt_detail::WorkBudget b{caps, tm.log.size(), 0, false};
  Filtration f = build_filtration(tm.sys.graph, tm.sys.map);
  for (int guard = 0; guard < 256 && !b.exceeded; ++guard) {
    if (!tt_detail::promote_fold_once(tm, f)) break;
    simplify_sweep(tm);
    f = tt_detail::rebuild(tm, b);
    b.check_moves(tm);
  }
  if (b.exceeded) {
    throw Error(ErrorKind::CapExceeded, "promotion exceeded its work budget");
  }
  for (const auto& [end_id, kind] : f.end_kinds) {
    if (kind != EndKind::Repelling) continue;
    std::vector<std::string> locals;
    for (const auto& e : tm.sys.graph.end(end_id).domain.edges) locals.push_back(e.id);
    for (const auto& local : locals) {
      if (stored_edge_image(tm.sys.map, end_edge(end_id, 0, local)).size() > 1) {
        subdivide_end_class(tm, end_id, local);
      }
    }
  }
}

struct RttResult {
  RttReport report;
  Filtration filtration;
  bool cap_exceeded = false;
  int recomputes = 0;
};

// The full pipeline: minimize the stretch spectrum, align exponential strata
// with their boundaries, collapse inessential connecting paths, then promote.
inline RttResult to_relative_train_track(TrackedMap& tm, const Caps& caps = {}) {
  tt_detail::WorkBudget b{caps, tm.log.size(), 0, false};
  Filtration f = tt_detail::minimize_impl(tm, b);

  for (int guard = 0; guard < 64 && !b.exceeded; ++guard) {
    bool any = false;
    for (std::size_t k = 0; k < f.strata.size(); ++k) {
      if (!f.strata[k].exponential) continue;
      if (core_subdivide_stratum(tm, f.strata[k].edges)) {
        simplify_sweep(tm);
        f = tt_detail::rebuild(tm, b);
        any = true;
        break;
      }
    }
    b.check_moves(tm);
    if (!any) break;
  }

  // An unfoldable connecting path is left in place; the final verification
  // reports it.
  try {
    for (int guard = 0; guard < 512 && !b.exceeded; ++guard) {
      bool folded = false;
      for (std::size_t k = 0; k < f.strata.size() && !folded; ++k) {
        if (!f.strata[k].exponential) continue;
        if (collapse_inessential_once(tm, f, static_cast<int>(k))) {
          simplify_sweep(tm);
          f = tt_detail::rebuild(tm, b);
          folded = true;
        }
      }
      b.check_moves(tm);
      if (!folded) break;
    }
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::Unsupported) throw;
  }

  if (!b.exceeded) {
    Caps rest{caps.max_moves - static_cast<int>(tm.log.size() - b.base_moves),
              caps.max_recomputes - b.recomputes};
    try {
      promote_to_train_track(tm, rest);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::CapExceeded) throw;
      b.exceeded = true;
    }
  }

  f = tt_detail::rebuild(tm, b);
  RttResult res;
  res.report = verify_rtt(tm.sys, f);
  res.filtration = std::move(f);
  res.cap_exceeded = b.exceeded;
  res.recomputes = b.recomputes;
  return res;
}

}  // namespace epg
