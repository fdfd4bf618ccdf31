#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "epg/correspondence.hpp"
#include "epg/errors.hpp"
#include "epg/map_presentation.hpp"
#include "epg/paths.hpp"
#include "epg/presentation.hpp"
#include "epg/turns.hpp"

namespace epg {

struct MoveRecord {
  std::string name;
  std::string detail;
  double lambda_after = -1.0;  // filled in by drivers that track it
};

// A system together with the history of surgeries applied to it and the
// accumulated correspondences to and from the presentation it started from.
struct TrackedMap {
  EpgSystem sys;
  std::vector<MoveRecord> log;
  Corr forward;   // original cells -> current presentation
  Corr backward;  // current cells -> original presentation

  static TrackedMap start(EpgSystem s) { return TrackedMap{std::move(s), {}, {}, {}}; }

  void record(const std::string& name, const std::string& detail,
              const Corr& fwd_c, const Corr& bwd_c) {
    forward = compose(forward, fwd_c);
    backward = compose(bwd_c, backward);
    log.push_back(MoveRecord{name, detail, -1.0});
  }
};

inline std::vector<VertexAddr> stored_vertex_keys(const GraphPresentation& g, int depth) {
  std::vector<VertexAddr> out;
  for (const auto& v : g.core.vertices) out.push_back(core_vertex(v));
  for (const auto& end : g.ends) {
    for (int n = 0; n < depth; ++n) {
      for (const auto& v : end.domain.vertices) {
        if (!end.is_inner(v)) out.push_back(end_vertex(end.id, n, v));
      }
    }
  }
  return out;
}

inline std::vector<EdgeAddr> stored_edge_keys(const GraphPresentation& g, int depth) {
  std::vector<EdgeAddr> out;
  for (const auto& e : g.core.edges) out.push_back(core_edge(e.id));
  for (const auto& end : g.ends) {
    for (int n = 0; n < depth; ++n) {
      for (const auto& e : end.domain.edges) out.push_back(end_edge(end.id, n, e.id));
    }
  }
  return out;
}

// Rebuilds the stored map data after a surgery: the new image of a cell is
// the old image of its backward translate, pushed forward again.  Overrides
// pin cells whose image cannot be obtained that way (pieces of a subdivided
// edge, for example).
inline GraphMapPresentation rewrite_map(
    const EpgSystem& old_sys, const GraphPresentation& new_graph,
    const Corr& fwd_c, const Corr& bwd_c,
    const std::map<EdgeAddr, EdgePath>& edge_overrides = {},
    const std::map<VertexAddr, VertexAddr>& vertex_overrides = {}) {
  GraphMapPresentation nm;
  nm.depth = old_sys.map.depth;
  nm.end_targets = old_sys.map.end_targets;
  for (const auto& v : stored_vertex_keys(new_graph, nm.depth)) {
    auto it = vertex_overrides.find(v);
    if (it != vertex_overrides.end()) {
      nm.vertex_images[v] = it->second;
      continue;
    }
    VertexAddr old_v = apply_vertex(bwd_c, v);
    VertexAddr old_img = map_vertex(old_sys.graph, old_sys.map, old_v);
    nm.vertex_images[v] = canonicalize_vertex(new_graph, apply_vertex(fwd_c, old_img));
  }
  for (const auto& e : stored_edge_keys(new_graph, nm.depth)) {
    auto it = edge_overrides.find(e);
    if (it != edge_overrides.end()) {
      nm.edge_images[e] = it->second;
      continue;
    }
    EdgePath old_p = apply(bwd_c, fwd(e));
    EdgePath old_img = map_path(old_sys.map, old_p);
    nm.edge_images[e] = apply_path(fwd_c, old_img);
  }
  return nm;
}

namespace moves_detail {

inline void commit(TrackedMap& tm, GraphPresentation new_graph, const Corr& fwd_c,
                   const Corr& bwd_c, const std::string& name, const std::string& detail,
                   const std::map<EdgeAddr, EdgePath>& edge_overrides = {},
                   const std::map<VertexAddr, VertexAddr>& vertex_overrides = {}) {
  GraphMapPresentation nm;
  try {
    nm = rewrite_map(tm.sys, new_graph, fwd_c, bwd_c, edge_overrides, vertex_overrides);
    EpgSystem next{std::move(new_graph), std::move(nm)};
    validate_system(next);
    tm.sys = std::move(next);
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::Unsupported) throw;
    throw Error(ErrorKind::Internal,
                "move '" + name + "' (" + detail + ") broke the presentation: " + err.what());
  }
  tm.record(name, detail, fwd_c, bwd_c);
}

inline std::string unique_core_edge_id(const FiniteGraph& core, std::string base) {
  while (core.find_edge(base)) base += "'";
  return base;
}

inline std::string unique_vertex_id(const FiniteGraph& g, std::string base) {
  while (g.has_vertex(base)) base += "'";
  return base;
}

}  // namespace moves_detail

// Replaces every stored edge image by its tightened form.
inline bool pull_tight(TrackedMap& tm) {
  bool changed = false;
  for (auto& [e, img] : tm.sys.map.edge_images) {
    EdgePath t = tighten(img);
    if (t != img) {
      img = std::move(t);
      changed = true;
    }
  }
  if (changed) tm.record("pull_tight", "", Corr{}, Corr{});
  return changed;
}

// Core edges whose iterated tightened image eventually vanishes.
inline std::vector<std::string> pretrivial_core_edges(const EpgSystem& s) {
  std::vector<std::string> out;
  int cap = static_cast<int>(s.graph.core.edges.size()) + 2;
  for (const auto& e : s.graph.core.edges) {
    EdgePath p = {fwd(core_edge(e.id))};
    for (int k = 0; k < cap && !p.empty(); ++k) p = tighten(map_path(s.map, p));
    if (p.empty()) out.push_back(e.id);
  }
  return out;
}

// Collapses a set of core edges that spans no cycle, merging each connected
// component of the set to a single vertex.  The backward correspondence
// routes every surviving edge through the collapsed tree back to the
// component representative, so the rewritten map stays consistent even when
// the old map disagreed on the merged vertices.
inline void collapse_core_forest(TrackedMap& tm, const std::vector<std::string>& forest,
                                 const std::string& detail) {
  if (forest.empty()) return;
  const FiniteGraph& core = tm.sys.graph.core;
  std::map<std::string, std::string> parent;
  for (const auto& v : core.vertices) parent[v] = v;
  std::function<std::string(const std::string&)> find = [&](const std::string& v) {
    std::string r = v;
    while (parent[r] != r) r = parent[r];
    return r;
  };
  // Prefer keeping vertices that carry an end attachment, so attachments
  // never have to move; break ties towards the smaller id.
  std::set<std::string> attach_pts;
  for (const auto& end : tm.sys.graph.ends) {
    for (const auto& [inner_v, cv] : end.core_attach) attach_pts.insert(cv);
  }
  auto keep_rank = [&](const std::string& v) {
    return std::make_pair(attach_pts.count(v) ? 0 : 1, v);
  };
  std::map<std::string, std::vector<OrientedEdge>> star;
  for (const auto& id : forest) {
    const EdgeRec& e = core.edge(id);
    std::string a = find(e.tail), b = find(e.head);
    if (a == b) {
      throw Error(ErrorKind::InvalidInput,
                  "collapse set contains a cycle through '" + id + "'");
    }
    if (keep_rank(b) < keep_rank(a)) std::swap(a, b);
    parent[b] = a;
    star[e.tail].push_back(fwd(core_edge(id)));
    star[e.head].push_back(rev(core_edge(id)));
  }

  // Walk each collapsed tree from its representative to record, per vertex,
  // the old path leading to it from the representative.
  std::map<std::string, EdgePath> route;
  for (const auto& v : core.vertices) {
    if (find(v) != v || !star.count(v)) continue;
    route[v] = {};
    std::vector<std::string> queue = {v};
    while (!queue.empty()) {
      std::string w = queue.back();
      queue.pop_back();
      for (const auto& o : star[w]) {
        const EdgeRec& e = core.edge(o.edge.local);
        std::string next = o.reversed ? e.tail : e.head;
        if (route.count(next)) continue;
        route[next] = route[w];
        route[next].push_back(o);
        queue.push_back(next);
      }
    }
  }

  std::set<std::string> dead(forest.begin(), forest.end());
  GraphPresentation ng = tm.sys.graph;
  ng.core.edges.clear();
  ng.core.vertices.clear();
  for (const auto& v : core.vertices) {
    if (find(v) == v) ng.core.vertices.push_back(v);
  }
  for (const auto& e : core.edges) {
    if (dead.count(e.id)) continue;
    ng.core.edges.push_back(EdgeRec{e.id, find(e.tail), find(e.head)});
  }
  for (auto& end : ng.ends) {
    for (auto& [inner_v, cv] : end.core_attach) cv = find(cv);
  }

  Corr fwd_c, bwd_c;
  for (const auto& id : forest) fwd_c.core_edges[id] = {};
  for (const auto& v : core.vertices) {
    std::string r = find(v);
    if (r != v) fwd_c.core_vertices[v] = core_vertex(r);
  }
  for (const auto& e : core.edges) {
    if (dead.count(e.id)) continue;
    bool tail_moved = route.count(e.tail) && !route[e.tail].empty();
    bool head_moved = route.count(e.head) && !route[e.head].empty();
    if (!tail_moved && !head_moved) continue;
    EdgePath p;
    if (tail_moved) p = route[e.tail];
    p.push_back(fwd(core_edge(e.id)));
    if (head_moved) {
      EdgePath back = reverse_path(route[e.head]);
      p.insert(p.end(), back.begin(), back.end());
    }
    bwd_c.core_edges[e.id] = std::move(p);
  }

  // An end attached inside a collapsed tree would need its copy-zero images
  // dragged along the tree, which the copy-equivariant correspondence cannot
  // express; allow it only when no dragging is needed.
  for (const auto& end : tm.sys.graph.ends) {
    for (const auto& [inner_v, cv] : end.core_attach) {
      if (find(cv) == cv) continue;
      VertexAddr a = apply_vertex(fwd_c, map_vertex(tm.sys.graph, tm.sys.map, core_vertex(cv)));
      VertexAddr b = apply_vertex(fwd_c,
                                  map_vertex(tm.sys.graph, tm.sys.map, core_vertex(find(cv))));
      if (a != b) {
        throw Error(ErrorKind::Unsupported,
                    "collapse would drag the attachment of end '" + end.id + "'");
      }
    }
  }

  moves_detail::commit(tm, std::move(ng), fwd_c, bwd_c, "collapse", detail);
}

// Collapses a single non-loop core edge, merging `dead_vertex` (one of its
// endpoints) into the other endpoint.
inline void collapse_core_edge(TrackedMap& tm, const std::string& edge_id,
                               const std::string& dead_vertex, const std::string& detail) {
  const EdgeRec e = tm.sys.graph.core.edge(edge_id);
  if (e.tail == e.head) {
    throw Error(ErrorKind::InvalidInput, "cannot collapse loop edge '" + edge_id + "'");
  }
  if (dead_vertex != e.tail && dead_vertex != e.head) {
    throw Error(ErrorKind::InvalidInput,
                "'" + dead_vertex + "' is not an endpoint of '" + edge_id + "'");
  }
  std::string kept = dead_vertex == e.tail ? e.head : e.tail;
  OrientedEdge to_dead =
      dead_vertex == e.head ? fwd(core_edge(edge_id)) : rev(core_edge(edge_id));

  GraphPresentation ng = tm.sys.graph;
  ng.core.vertices.erase(
      std::find(ng.core.vertices.begin(), ng.core.vertices.end(), dead_vertex));
  ng.core.edges.clear();
  Corr fwd_c, bwd_c;
  fwd_c.core_edges[edge_id] = {};
  fwd_c.core_vertices[dead_vertex] = core_vertex(kept);
  for (const auto& x : tm.sys.graph.core.edges) {
    if (x.id == edge_id) continue;
    EdgeRec r = x;
    EdgePath route;
    if (r.tail == dead_vertex) {
      r.tail = kept;
      route.push_back(to_dead);
    }
    route.push_back(fwd(core_edge(x.id)));
    if (r.head == dead_vertex) {
      r.head = kept;
      route.push_back(to_dead.reverse());
    }
    if (route.size() > 1) bwd_c.core_edges[x.id] = std::move(route);
    ng.core.edges.push_back(r);
  }
  for (auto& end : ng.ends) {
    for (auto& [inner_v, cv] : end.core_attach) {
      if (cv != dead_vertex) continue;
      VertexAddr a = apply_vertex(
          fwd_c, map_vertex(tm.sys.graph, tm.sys.map, core_vertex(dead_vertex)));
      VertexAddr b =
          apply_vertex(fwd_c, map_vertex(tm.sys.graph, tm.sys.map, core_vertex(kept)));
      if (a != b) {
        throw Error(ErrorKind::Unsupported,
                    "collapse would drag the attachment of end '" + end.id + "'");
      }
      cv = kept;
    }
  }
  moves_detail::commit(tm, std::move(ng), fwd_c, bwd_c, "collapse", edge_id + "=" + detail);
}

// Collapses one valence-one core edge if any exists.
inline bool collapse_valence_one(TrackedMap& tm) {
  for (const auto& v : tm.sys.graph.core.vertices) {
    auto star = incident_oriented(tm.sys.graph, core_vertex(v));
    if (star.size() != 1 || !star[0].edge.is_core()) continue;
    collapse_core_edge(tm, star[0].edge.local, v, "valence-one");
    return true;
  }
  return false;
}

struct SubdivisionPieces {
  std::vector<std::string> pieces;
  std::vector<std::string> cut_vertices;
};

// Subdivides a core edge at the given positions of its stored image (strictly
// ascending, strictly inside).  Piece `carrier_index` stands in for the whole
// old edge under the backward correspondence; the other pieces translate back
// to nothing.
inline SubdivisionPieces subdivide_core_edge(TrackedMap& tm, const std::string& edge_id,
                                             const std::vector<std::size_t>& cuts,
                                             std::size_t carrier_index,
                                             const std::string& detail) {
  const EdgeRec e = tm.sys.graph.core.edge(edge_id);
  const EdgePath image = stored_edge_image(tm.sys.map, core_edge(edge_id));
  std::size_t n_pieces = cuts.size() + 1;
  if (cuts.empty() || carrier_index >= n_pieces) {
    throw Error(ErrorKind::InvalidInput, "bad subdivision request for '" + edge_id + "'");
  }
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    bool ascending = i == 0 || cuts[i - 1] < cuts[i];
    if (!ascending || cuts[i] == 0 || cuts[i] >= image.size()) {
      throw Error(ErrorKind::InvalidInput,
                  "subdivision positions must be strictly inside the image of '" +
                      edge_id + "'");
    }
  }

  GraphPresentation ng = tm.sys.graph;
  SubdivisionPieces out;
  for (std::size_t j = 0; j < n_pieces; ++j) {
    out.pieces.push_back(
        moves_detail::unique_core_edge_id(ng.core, edge_id + "_" + std::to_string(j + 1)));
  }
  for (std::size_t j = 0; j + 1 < n_pieces; ++j) {
    std::string v = moves_detail::unique_vertex_id(ng.core, edge_id + "_v" + std::to_string(j + 1));
    out.cut_vertices.push_back(v);
    ng.core.vertices.push_back(v);
  }
  ng.core.edges.clear();
  for (const auto& x : tm.sys.graph.core.edges) {
    if (x.id != edge_id) {
      ng.core.edges.push_back(x);
      continue;
    }
    for (std::size_t j = 0; j < n_pieces; ++j) {
      std::string tail = j == 0 ? e.tail : out.cut_vertices[j - 1];
      std::string head = j + 1 == n_pieces ? e.head : out.cut_vertices[j];
      ng.core.edges.push_back(EdgeRec{out.pieces[j], tail, head});
    }
  }

  Corr fwd_c, bwd_c;
  EdgePath chain;
  for (const auto& p : out.pieces) chain.push_back(fwd(core_edge(p)));
  fwd_c.core_edges[edge_id] = chain;
  for (std::size_t j = 0; j < n_pieces; ++j) {
    bwd_c.core_edges[out.pieces[j]] =
        j == carrier_index ? EdgePath{fwd(core_edge(edge_id))} : EdgePath{};
  }
  for (std::size_t j = 0; j < out.cut_vertices.size(); ++j) {
    bwd_c.core_vertices[out.cut_vertices[j]] = core_vertex(j < carrier_index ? e.tail : e.head);
  }

  // The pieces split the old image at the cut positions; everything else is
  // rebuilt by translation.
  std::map<EdgeAddr, EdgePath> edge_overrides;
  std::map<VertexAddr, VertexAddr> vertex_overrides;
  std::size_t from = 0;
  for (std::size_t j = 0; j < n_pieces; ++j) {
    std::size_t to = j < cuts.size() ? cuts[j] : image.size();
    EdgePath part(image.begin() + static_cast<std::ptrdiff_t>(from),
                  image.begin() + static_cast<std::ptrdiff_t>(to));
    edge_overrides[core_edge(out.pieces[j])] = apply_path(fwd_c, part);
    if (j < cuts.size()) {
      VertexAddr old_pt = oriented_head(tm.sys.graph, image[to - 1]);
      vertex_overrides[core_vertex(out.cut_vertices[j])] =
          canonicalize_vertex(ng, apply_vertex(fwd_c, old_pt));
    }
    from = to;
  }

  moves_detail::commit(tm, std::move(ng), fwd_c, bwd_c, "subdivide", edge_id + " " + detail,
                       edge_overrides, vertex_overrides);
  return out;
}

// Identifies two distinct oriented core edges with the same tail and exactly
// equal stored images.  The second edge is absorbed into the first; their
// heads merge if they differ.
inline void fold_core(TrackedMap& tm, const OrientedEdge& o1, const OrientedEdge& o2,
                      const std::string& detail = "") {
  if (!o1.edge.is_core() || !o2.edge.is_core()) {
    throw Error(ErrorKind::Unsupported, "folding end-region edges is not supported");
  }
  if (o1.edge == o2.edge) {
    throw Error(ErrorKind::InvalidInput, "cannot fold an edge with itself");
  }
  if (oriented_tail(tm.sys.graph, o1) != oriented_tail(tm.sys.graph, o2)) {
    throw Error(ErrorKind::InvalidInput, "fold sides must share their tail");
  }
  if (oriented_image(tm.sys.map, o1) != oriented_image(tm.sys.map, o2)) {
    throw Error(ErrorKind::InvalidInput, "fold sides must have equal images");
  }

  std::string h1 = oriented_head(tm.sys.graph, o1).local;
  std::string h2 = oriented_head(tm.sys.graph, o2).local;
  const std::string dead_edge = o2.edge.local;

  GraphPresentation ng = tm.sys.graph;
  ng.core.edges.clear();
  for (const auto& x : tm.sys.graph.core.edges) {
    if (x.id == dead_edge) continue;
    EdgeRec r = x;
    if (h1 != h2) {
      if (r.tail == h2) r.tail = h1;
      if (r.head == h2) r.head = h1;
    }
    ng.core.edges.push_back(r);
  }
  if (h1 != h2) {
    ng.core.vertices.erase(std::find(ng.core.vertices.begin(), ng.core.vertices.end(), h2));
    for (auto& end : ng.ends) {
      for (auto& [inner_v, cv] : end.core_attach) {
        if (cv == h2) cv = h1;
      }
    }
  }

  Corr fwd_c, bwd_c;
  fwd_c.core_edges[dead_edge] = o2.reversed ? EdgePath{o1.reverse()} : EdgePath{o1};
  if (h1 != h2) fwd_c.core_vertices[h2] = core_vertex(h1);
  moves_detail::commit(tm, std::move(ng), fwd_c, bwd_c, "fold",
                       detail + " " + format_oriented(o1) + "|" + format_oriented(o2));
}

namespace moves_detail {

inline std::size_t common_prefix(const EdgePath& a, const EdgePath& b) {
  std::size_t n = std::min(a.size(), b.size());
  std::size_t c = 0;
  while (c < n && a[c] == b[c]) ++c;
  return c;
}

}  // namespace moves_detail

// Makes the two sides of a turn with equal first image letters foldable by
// subdividing them at the end of the common image prefix, then folds.  Both
// sides must be core edges.
inline void fold_repair(TrackedMap& tm, const Turn& t) {
  OrientedEdge o1 = t.a, o2 = t.b;
  if (!o1.edge.is_core() || !o2.edge.is_core()) {
    throw Error(ErrorKind::Unsupported, "turn repair outside the core is not supported");
  }

  if (o1.edge == o2.edge) {
    // A loop folded against itself: cut the common prefix off both ends.
    const EdgePath image = stored_edge_image(tm.sys.map, o1.edge);
    std::size_t c = moves_detail::common_prefix(
        o1.reversed ? reverse_path(image) : image,
        o2.reversed ? reverse_path(image) : image);
    if (c == 0) throw Error(ErrorKind::InvalidInput, "turn is not foldable");
    if (2 * c > image.size()) {
      throw Error(ErrorKind::Unsupported, "self-fold regions overlap");
    }
    if (2 * c == image.size()) {
      auto pieces = subdivide_core_edge(tm, o1.edge.local, {c}, 0, "self-fold");
      fold_core(tm, fwd(core_edge(pieces.pieces[0])), rev(core_edge(pieces.pieces[1])),
                "self");
      return;
    }
    auto pieces = subdivide_core_edge(tm, o1.edge.local, {c, image.size() - c}, 1, "self-fold");
    fold_core(tm, fwd(core_edge(pieces.pieces[0])), rev(core_edge(pieces.pieces[2])), "self");
    return;
  }

  // Alternately trim each side to the common image prefix.  Subdividing one
  // side rewrites the other side's image, so recompute every round.
  for (int guard = 0;; ++guard) {
    if (guard > 8) {
      throw Error(ErrorKind::Internal, "turn repair did not converge");
    }
    EdgePath i1 = oriented_image(tm.sys.map, o1);
    EdgePath i2 = oriented_image(tm.sys.map, o2);
    std::size_t c = moves_detail::common_prefix(i1, i2);
    if (c == 0) throw Error(ErrorKind::InvalidInput, "turn is not foldable");
    if (i1 == i2) break;
    bool trim_first = i1.size() > c;
    const OrientedEdge& side = trim_first ? o1 : o2;
    const EdgePath& img = trim_first ? i1 : i2;
    SubdivisionPieces pieces;
    OrientedEdge replacement{};
    if (!side.reversed) {
      pieces = subdivide_core_edge(tm, side.edge.local, {c}, 0, "repair");
      replacement = fwd(core_edge(pieces.pieces[0]));
    } else {
      pieces = subdivide_core_edge(tm, side.edge.local, {img.size() - c}, 1, "repair");
      replacement = rev(core_edge(pieces.pieces[1]));
    }
    (trim_first ? o1 : o2) = replacement;
  }
  fold_core(tm, o1, o2, "repair");
}

// Collapses one of the two core edges meeting a valence-two core vertex,
// preferring to keep exponentially growing edges intact.  `stratum_of` and
// `weight_of` may return -1 / 0 for cells outside any exponential stratum.
template <class StratumOf, class WeightOf>
inline bool collapse_valence_two(TrackedMap& tm, const StratumOf& stratum_of,
                                 const WeightOf& weight_of) {
  for (const auto& v : tm.sys.graph.core.vertices) {
    auto star = incident_oriented(tm.sys.graph, core_vertex(v));
    if (star.size() != 2) continue;
    if (!star[0].edge.is_core() || !star[1].edge.is_core()) continue;
    if (star[0].edge == star[1].edge) continue;  // loop at v
    auto rank = [&](const OrientedEdge& o) {
      int s = stratum_of(o.edge);
      return std::tuple<int, double, std::string>(s >= 0 ? 1 : 0,
                                                  s >= 0 ? weight_of(o.edge) : 0.0,
                                                  o.edge.local);
    };
    OrientedEdge chosen = rank(star[0]) <= rank(star[1]) ? star[0] : star[1];
    collapse_core_edge(tm, chosen.edge.local, v, "valence-two");
    return true;
  }
  return false;
}

// Cuts an end-region edge class into as many pieces as its copy-zero image
// has letters, so that every piece maps to a single edge.  Deeper copies must
// already map one-to-one onto the same class one copy down.
inline SubdivisionPieces subdivide_end_class(TrackedMap& tm, const std::string& end_id,
                                             const std::string& local) {
  const EndPresentation& end = tm.sys.graph.end(end_id);
  const EdgeRec e = end.domain.edge(local);
  const int depth = tm.sys.map.depth;
  const EdgePath image0 = stored_edge_image(tm.sys.map, end_edge(end_id, 0, local));
  SubdivisionPieces out;
  if (image0.size() <= 1) return out;
  for (int n = 1; n < depth; ++n) {
    EdgePath img = stored_edge_image(tm.sys.map, end_edge(end_id, n, local));
    bool shifts_down = img.size() == 1 && !img[0].reversed &&
                       img[0].edge == end_edge(end_id, n - 1, local);
    if (!shifts_down) {
      throw Error(ErrorKind::Unsupported,
                  "end class '" + end_id + ":" + local + "' does not shift onto itself");
    }
  }

  GraphPresentation ng = tm.sys.graph;
  EndPresentation* nend = nullptr;
  for (auto& x : ng.ends) {
    if (x.id == end_id) nend = &x;
  }
  std::size_t n_pieces = image0.size();
  for (std::size_t j = 0; j < n_pieces; ++j) {
    std::string id = local + "_" + std::to_string(j + 1);
    while (nend->domain.find_edge(id)) id += "'";
    out.pieces.push_back(id);
  }
  for (std::size_t j = 0; j + 1 < n_pieces; ++j) {
    std::string v = moves_detail::unique_vertex_id(nend->domain,
                                                   local + "_v" + std::to_string(j + 1));
    out.cut_vertices.push_back(v);
    nend->domain.vertices.push_back(v);
  }
  std::vector<EdgeRec> new_edges;
  for (const auto& x : nend->domain.edges) {
    if (x.id != local) {
      new_edges.push_back(x);
      continue;
    }
    for (std::size_t j = 0; j < n_pieces; ++j) {
      std::string tail = j == 0 ? e.tail : out.cut_vertices[j - 1];
      std::string head = j + 1 == n_pieces ? e.head : out.cut_vertices[j];
      new_edges.push_back(EdgeRec{out.pieces[j], tail, head});
    }
  }
  nend->domain.edges = std::move(new_edges);

  Corr fwd_c, bwd_c;
  EdgePath chain;
  for (const auto& p : out.pieces) chain.push_back(fwd(end_edge(end_id, 0, p)));
  fwd_c.end_edges[{end_id, local}] = chain;
  for (std::size_t j = 0; j < n_pieces; ++j) {
    bwd_c.end_edges[{end_id, out.pieces[j]}] =
        j == 0 ? EdgePath{fwd(end_edge(end_id, 0, local))} : EdgePath{};
  }
  for (const auto& v : out.cut_vertices) {
    bwd_c.end_vertices[{end_id, v}] = end_vertex(end_id, 0, e.head);
  }

  std::map<EdgeAddr, EdgePath> edge_overrides;
  std::map<VertexAddr, VertexAddr> vertex_overrides;
  for (std::size_t j = 0; j < n_pieces; ++j) {
    edge_overrides[end_edge(end_id, 0, out.pieces[j])] = apply_path(fwd_c, {image0[j]});
    for (int n = 1; n < depth; ++n) {
      edge_overrides[end_edge(end_id, n, out.pieces[j])] = {
          fwd(end_edge(end_id, n - 1, out.pieces[j]))};
    }
  }
  for (std::size_t j = 0; j < out.cut_vertices.size(); ++j) {
    VertexAddr old_pt = oriented_head(tm.sys.graph, image0[j]);
    vertex_overrides[end_vertex(end_id, 0, out.cut_vertices[j])] =
        canonicalize_vertex(ng, apply_vertex(fwd_c, old_pt));
    for (int n = 1; n < depth; ++n) {
      vertex_overrides[end_vertex(end_id, n, out.cut_vertices[j])] =
          end_vertex(end_id, n - 1, out.cut_vertices[j]);
    }
  }

  moves_detail::commit(tm, std::move(ng), fwd_c, bwd_c, "subdivide-end", end_id + ":" + local,
                       edge_overrides, vertex_overrides);
  return out;
}

}  // namespace epg
