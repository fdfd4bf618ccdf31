#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "epg/addresses.hpp"
#include "epg/finite_graph.hpp"

namespace epg {

// One end region is presented by a fundamental domain together with gluing
// data: the region is the union of copies 0, 1, 2, ... of the domain, where
// the inner boundary of copy n+1 is glued to the outer boundary of copy n
// (via `attach`, an outer->inner bijection read backwards) and the inner
// boundary of copy 0 is glued into the core (via `core_attach`).
struct EndPresentation {
  std::string id;
  FiniteGraph domain;
  std::vector<std::string> inner;            // inner boundary vertices
  std::vector<std::string> outer;            // outer boundary vertices
  std::map<std::string, std::string> attach;      // outer vertex -> inner vertex
  std::map<std::string, std::string> core_attach; // inner vertex -> core vertex

  bool is_inner(const std::string& v) const {
    for (const auto& x : inner) {
      if (x == v) return true;
    }
    return false;
  }
  bool is_outer(const std::string& v) const {
    for (const auto& x : outer) {
      if (x == v) return true;
    }
    return false;
  }
  // Inverse of `attach`; callers only use it on values of `attach`.
  const std::string& attach_inverse(const std::string& inner_v) const {
    for (const auto& [o, i] : attach) {
      if (i == inner_v) return o;
    }
    throw Error(ErrorKind::Internal,
                "no outer vertex attaches to '" + inner_v + "'");
  }
};

struct GraphPresentation {
  FiniteGraph core;
  std::vector<EndPresentation> ends;

  const EndPresentation* find_end(const std::string& id) const {
    for (const auto& e : ends) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }
  const EndPresentation& end(const std::string& id) const {
    const EndPresentation* e = find_end(id);
    if (!e) throw Error(ErrorKind::InvalidInput, "unknown end '" + id + "'");
    return *e;
  }
};

inline void validate(const GraphPresentation& g) {
  validate_graph(g.core, "core");
  std::set<std::string> end_ids;
  for (const auto& end : g.ends) {
    const std::string label = "end '" + end.id + "'";
    if (end.id.empty() || end.id == "core" || end.id.find('@') != std::string::npos ||
        end.id.find(':') != std::string::npos || end.id.find('~') != std::string::npos) {
      throw Error(ErrorKind::InvalidInput, label + ": bad id");
    }
    if (!end_ids.insert(end.id).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate end id '" + end.id + "'");
    }
    validate_graph(end.domain, label);
    if (end.domain.edges.empty()) {
      throw Error(ErrorKind::InvalidInput, label + ": domain has no edges");
    }
    for (const auto& v : end.inner) {
      if (!end.domain.has_vertex(v)) {
        throw Error(ErrorKind::InvalidInput,
                    label + ": inner vertex '" + v + "' not in domain");
      }
      if (end.is_outer(v)) {
        throw Error(ErrorKind::InvalidInput,
                    label + ": vertex '" + v + "' is both inner and outer");
      }
    }
    for (const auto& v : end.outer) {
      if (!end.domain.has_vertex(v)) {
        throw Error(ErrorKind::InvalidInput,
                    label + ": outer vertex '" + v + "' not in domain");
      }
    }
    // attach must be a bijection outer -> inner.
    if (end.attach.size() != end.outer.size() || end.inner.size() != end.outer.size()) {
      throw Error(ErrorKind::InvalidInput,
                  label + ": attach must pair every outer vertex with an inner one");
    }
    std::set<std::string> attach_img;
    for (const auto& [o, i] : end.attach) {
      if (!end.is_outer(o) || !end.is_inner(i)) {
        throw Error(ErrorKind::InvalidInput,
                    label + ": attach entry " + o + " -> " + i +
                        " is not outer -> inner");
      }
      if (!attach_img.insert(i).second) {
        throw Error(ErrorKind::InvalidInput, label + ": attach is not injective");
      }
    }
    // core_attach must be an injection inner -> core vertices.
    if (end.core_attach.size() != end.inner.size()) {
      throw Error(ErrorKind::InvalidInput,
                  label + ": core_attach must cover every inner vertex");
    }
    std::set<std::string> core_img;
    for (const auto& [i, c] : end.core_attach) {
      if (!end.is_inner(i)) {
        throw Error(ErrorKind::InvalidInput,
                    label + ": core_attach key '" + i + "' is not inner");
      }
      if (!g.core.has_vertex(c)) {
        throw Error(ErrorKind::InvalidInput,
                    label + ": core_attach target '" + c + "' not in core");
      }
      if (!core_img.insert(c).second) {
        throw Error(ErrorKind::InvalidInput, label + ": core_attach is not injective");
      }
    }
  }
}

// Rewrites a vertex address into its canonical form.  Inner vertices are
// glued copies of cells further down, so the canonical representatives are
// exactly: core vertices, and end vertices whose local name is not inner.
inline VertexAddr canonicalize_vertex(const GraphPresentation& g, VertexAddr v) {
  if (v.is_core()) {
    if (!g.core.has_vertex(v.local)) {
      throw Error(ErrorKind::InvalidInput,
                  "unknown core vertex '" + v.local + "'");
    }
    return v;
  }
  const EndPresentation& end = g.end(v.end);
  if (!end.domain.has_vertex(v.local)) {
    throw Error(ErrorKind::InvalidInput,
                "unknown vertex '" + format_vertex(v) + "'");
  }
  if (v.copy < 0) {
    throw Error(ErrorKind::InvalidInput,
                "negative copy in '" + format_vertex(v) + "'");
  }
  if (!end.is_inner(v.local)) return v;
  if (v.copy == 0) return core_vertex(end.core_attach.at(v.local));
  return end_vertex(v.end, v.copy - 1, end.attach_inverse(v.local));
}

// Canonical endpoints of an edge address.
inline VertexAddr edge_tail(const GraphPresentation& g, const EdgeAddr& e) {
  if (e.is_core()) return core_vertex(g.core.edge(e.local).tail);
  const EndPresentation& end = g.end(e.end);
  return canonicalize_vertex(g, end_vertex(e.end, e.copy, end.domain.edge(e.local).tail));
}

inline VertexAddr edge_head(const GraphPresentation& g, const EdgeAddr& e) {
  if (e.is_core()) return core_vertex(g.core.edge(e.local).head);
  const EndPresentation& end = g.end(e.end);
  return canonicalize_vertex(g, end_vertex(e.end, e.copy, end.domain.edge(e.local).head));
}

inline VertexAddr oriented_tail(const GraphPresentation& g, const OrientedEdge& o) {
  return o.reversed ? edge_head(g, o.edge) : edge_tail(g, o.edge);
}

inline VertexAddr oriented_head(const GraphPresentation& g, const OrientedEdge& o) {
  return o.reversed ? edge_tail(g, o.edge) : edge_head(g, o.edge);
}

// The finite subgraph spanned by the core and copies 0..window (inclusive)
// of every end region, with cells named by canonical addresses.
inline FiniteGraph materialize(const GraphPresentation& g, int window) {
  FiniteGraph out;
  for (const auto& v : g.core.vertices) {
    out.vertices.push_back(format_vertex(core_vertex(v)));
  }
  for (const auto& end : g.ends) {
    for (int n = 0; n <= window; ++n) {
      for (const auto& v : end.domain.vertices) {
        if (!end.is_inner(v)) {
          out.vertices.push_back(format_vertex(end_vertex(end.id, n, v)));
        }
      }
    }
  }
  for (const auto& e : g.core.edges) {
    out.edges.push_back(EdgeRec{format_edge(core_edge(e.id)),
                                format_vertex(core_vertex(e.tail)),
                                format_vertex(core_vertex(e.head))});
  }
  for (const auto& end : g.ends) {
    for (int n = 0; n <= window; ++n) {
      for (const auto& e : end.domain.edges) {
        EdgeAddr addr = end_edge(end.id, n, e.id);
        out.edges.push_back(EdgeRec{format_edge(addr),
                                    format_vertex(edge_tail(g, addr)),
                                    format_vertex(edge_head(g, addr))});
      }
    }
  }
  return out;
}

// All oriented edges whose canonical tail is `v` (a canonical vertex).
// Only finitely many copies can touch a given vertex: core vertices see core
// edges plus copy 0 of each end, and a vertex in copy n sees copies n and
// n+1 of its own end.  Order follows the edge lists, so it is deterministic.
inline std::vector<OrientedEdge> incident_oriented(const GraphPresentation& g,
                                                   const VertexAddr& v) {
  std::vector<OrientedEdge> out;
  auto try_edge = [&](const EdgeAddr& e) {
    if (edge_tail(g, e) == v) out.push_back(fwd(e));
    if (edge_head(g, e) == v) out.push_back(rev(e));
  };
  if (v.is_core()) {
    for (const auto& e : g.core.edges) try_edge(core_edge(e.id));
    for (const auto& end : g.ends) {
      for (const auto& e : end.domain.edges) try_edge(end_edge(end.id, 0, e.id));
    }
  } else {
    const EndPresentation& end = g.end(v.end);
    for (const auto& e : end.domain.edges) try_edge(end_edge(v.end, v.copy, e.id));
    for (const auto& e : end.domain.edges) try_edge(end_edge(v.end, v.copy + 1, e.id));
  }
  return out;
}

}  // namespace epg
