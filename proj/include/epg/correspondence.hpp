#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "epg/errors.hpp"
#include "epg/map_presentation.hpp"
#include "epg/paths.hpp"
#include "epg/presentation.hpp"

namespace epg {

// A combinatorial map between two presentations of the same underlying space,
// used to carry edge paths (and the dynamics) across a surgery.  Core cells
// are keyed by id.  End cells are keyed by (end id, local id) with the stored
// value expressed at copy 0; the map acts the same way on every copy, so the
// value for copy n is the stored one shifted up by n.  Missing keys act as
// the identity, which keeps the common case (a move that touches a handful of
// cells) cheap to describe.
struct Corr {
  std::map<std::string, EdgePath> core_edges;
  std::map<std::pair<std::string, std::string>, EdgePath> end_edges;
  std::map<std::string, VertexAddr> core_vertices;
  std::map<std::pair<std::string, std::string>, VertexAddr> end_vertices;

  bool is_identity() const {
    return core_edges.empty() && end_edges.empty() && core_vertices.empty() &&
           end_vertices.empty();
  }
};

inline VertexAddr apply_vertex(const Corr& c, const VertexAddr& v) {
  if (v.is_core()) {
    auto it = c.core_vertices.find(v.local);
    return it == c.core_vertices.end() ? v : it->second;
  }
  auto it = c.end_vertices.find({v.end, v.local});
  if (it == c.end_vertices.end()) return v;
  const VertexAddr& base = it->second;
  if (base.is_core()) {
    throw Error(ErrorKind::Unsupported,
                "correspondence cannot move an end vertex into the core");
  }
  return end_vertex(base.end, base.copy + v.copy, base.local);
}

inline EdgePath apply(const Corr& c, const OrientedEdge& o) {
  EdgePath out;
  if (o.edge.is_core()) {
    auto it = c.core_edges.find(o.edge.local);
    if (it == c.core_edges.end()) return {OrientedEdge{o.edge, o.reversed}};
    out = it->second;
  } else {
    auto it = c.end_edges.find({o.edge.end, o.edge.local});
    if (it == c.end_edges.end()) return {OrientedEdge{o.edge, o.reversed}};
    out = shift_path(it->second, o.edge.copy);
  }
  return o.reversed ? reverse_path(out) : out;
}

inline EdgePath apply_path(const Corr& c, const EdgePath& p) {
  EdgePath out;
  for (const auto& o : p) {
    EdgePath img = apply(c, o);
    out.insert(out.end(), img.begin(), img.end());
  }
  return tighten(out);
}

// Raw (untightened) variant; used where letter positions matter.
inline EdgePath apply_path_raw(const Corr& c, const EdgePath& p) {
  EdgePath out;
  for (const auto& o : p) {
    EdgePath img = apply(c, o);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

// The composite that first applies `a`, then `b`.
inline Corr compose(const Corr& a, const Corr& b) {
  Corr out;
  std::set<std::string> core_e, core_v;
  std::set<std::pair<std::string, std::string>> end_e, end_v;
  for (const auto& [k, v] : a.core_edges) core_e.insert(k);
  for (const auto& [k, v] : b.core_edges) core_e.insert(k);
  for (const auto& [k, v] : a.end_edges) end_e.insert(k);
  for (const auto& [k, v] : b.end_edges) end_e.insert(k);
  for (const auto& [k, v] : a.core_vertices) core_v.insert(k);
  for (const auto& [k, v] : b.core_vertices) core_v.insert(k);
  for (const auto& [k, v] : a.end_vertices) end_v.insert(k);
  for (const auto& [k, v] : b.end_vertices) end_v.insert(k);

  for (const auto& k : core_e) {
    out.core_edges[k] = apply_path(b, apply(a, fwd(core_edge(k))));
  }
  for (const auto& k : end_e) {
    out.end_edges[k] = apply_path(b, apply(a, fwd(end_edge(k.first, 0, k.second))));
  }
  for (const auto& k : core_v) {
    out.core_vertices[k] = apply_vertex(b, apply_vertex(a, core_vertex(k)));
  }
  for (const auto& k : end_v) {
    out.end_vertices[k] = apply_vertex(b, apply_vertex(a, end_vertex(k.first, 0, k.second)));
  }
  return out;
}

// Worst-case per-letter expansion; bounds how much applying the
// correspondence can lengthen a tight loop.
inline std::size_t corr_bound(const Corr& c) {
  std::size_t b = 1;
  for (const auto& [k, v] : c.core_edges) b = std::max(b, v.size());
  for (const auto& [k, v] : c.end_edges) b = std::max(b, v.size());
  return b;
}

}  // namespace epg
