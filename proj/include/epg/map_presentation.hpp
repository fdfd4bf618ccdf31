#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epg/paths.hpp"
#include "epg/presentation.hpp"

namespace epg {

// A graph self-map is stored on the core and on the first `depth` copies of
// each end region.  Deeper copies are determined by equivariance: for
// n >= depth-1 the image of a cell in copy n is the image of the matching
// cell in copy depth-1 with every copy index shifted by n-(depth-1).  Stored
// copies below depth-1 are free data; only copy depth-1 is used as the
// template for translation, so its images must lie entirely inside end
// regions of a single target end.
struct GraphMapPresentation {
  int depth = 1;
  std::map<std::string, std::string> end_targets;
  std::map<VertexAddr, VertexAddr> vertex_images;  // canonical -> canonical
  std::map<EdgeAddr, EdgePath> edge_images;        // stored cells only
};

inline EdgePath shift_path(const EdgePath& p, int delta) {
  EdgePath out;
  out.reserve(p.size());
  for (const auto& o : p) {
    if (o.edge.is_core()) {
      throw Error(ErrorKind::Internal, "cannot shift a core edge");
    }
    out.push_back(OrientedEdge{end_edge(o.edge.end, o.edge.copy + delta, o.edge.local),
                               o.reversed});
  }
  return out;
}

inline const EdgePath& stored_edge_image(const GraphMapPresentation& m,
                                         const EdgeAddr& e) {
  auto it = m.edge_images.find(e);
  if (it == m.edge_images.end()) {
    throw Error(ErrorKind::InvalidInput,
                "no stored image for edge '" + format_edge(e) + "'");
  }
  return it->second;
}

// Image of an arbitrary edge, using the stored window below `depth` and
// equivariant translation above it.
inline EdgePath edge_image(const GraphMapPresentation& m, const EdgeAddr& e) {
  if (e.is_core() || e.copy < m.depth) return stored_edge_image(m, e);
  EdgeAddr base = end_edge(e.end, m.depth - 1, e.local);
  return shift_path(stored_edge_image(m, base), e.copy - (m.depth - 1));
}

inline EdgePath oriented_image(const GraphMapPresentation& m, const OrientedEdge& o) {
  EdgePath img = edge_image(m, o.edge);
  return o.reversed ? reverse_path(img) : img;
}

inline VertexAddr map_vertex(const GraphPresentation& g,
                             const GraphMapPresentation& m, const VertexAddr& v0) {
  VertexAddr v = canonicalize_vertex(g, v0);
  auto it = m.vertex_images.find(v);
  if (it != m.vertex_images.end()) return it->second;
  if (v.is_core() || v.copy < m.depth) {
    throw Error(ErrorKind::InvalidInput,
                "no stored image for vertex '" + format_vertex(v) + "'");
  }
  VertexAddr base = end_vertex(v.end, m.depth - 1, v.local);
  auto bit = m.vertex_images.find(base);
  if (bit == m.vertex_images.end()) {
    throw Error(ErrorKind::InvalidInput,
                "no stored image for vertex '" + format_vertex(base) + "'");
  }
  const VertexAddr& img = bit->second;
  if (img.is_core()) {
    throw Error(ErrorKind::InvalidInput,
                "image of '" + format_vertex(base) +
                    "' must stay in an end region for translation");
  }
  return end_vertex(img.end, img.copy + (v.copy - (m.depth - 1)), img.local);
}

// Raw (untightened) image of a path: concatenation of the step images.
inline EdgePath map_path(const GraphMapPresentation& m, const EdgePath& p) {
  EdgePath out;
  for (const auto& o : p) {
    EdgePath img = oriented_image(m, o);
    out.insert(out.end(), img.begin(), img.end());
  }
  return out;
}

inline EdgePath iterate_path(const GraphMapPresentation& m, EdgePath p, int k) {
  for (int i = 0; i < k; ++i) p = tighten(map_path(m, p));
  return p;
}

// First oriented edge of the raw image; the combinatorial derivative.
inline std::optional<OrientedEdge> derivative(const GraphMapPresentation& m,
                                              const OrientedEdge& o) {
  EdgePath img = oriented_image(m, o);
  if (img.empty()) return std::nullopt;
  return img.front();
}

// Full structural validation of a map presentation against its graph.
// Throws on hard violations; returns informational notes otherwise.
inline std::vector<std::string> validate_map(const GraphPresentation& g,
                                             const GraphMapPresentation& m) {
  std::vector<std::string> notes;
  if (m.depth < 1) {
    throw Error(ErrorKind::InvalidInput, "map depth must be at least 1");
  }
  // Ends must be permuted among themselves.
  std::set<std::string> targets;
  for (const auto& end : g.ends) {
    auto it = m.end_targets.find(end.id);
    if (it == m.end_targets.end()) {
      throw Error(ErrorKind::InvalidInput,
                  "missing end target for '" + end.id + "'");
    }
    if (!g.find_end(it->second)) {
      throw Error(ErrorKind::InvalidInput,
                  "end target '" + it->second + "' does not exist");
    }
    if (!targets.insert(it->second).second) {
      throw Error(ErrorKind::InvalidInput, "end targets are not a permutation");
    }
  }
  if (m.end_targets.size() != g.ends.size()) {
    throw Error(ErrorKind::InvalidInput, "end target for unknown end");
  }

  // Vertex images: exactly the canonical cells of the stored window.
  std::set<VertexAddr> expected_v;
  for (const auto& v : g.core.vertices) expected_v.insert(core_vertex(v));
  for (const auto& end : g.ends) {
    for (int n = 0; n < m.depth; ++n) {
      for (const auto& v : end.domain.vertices) {
        if (!end.is_inner(v)) expected_v.insert(end_vertex(end.id, n, v));
      }
    }
  }
  for (const auto& [v, img] : m.vertex_images) {
    if (!expected_v.count(v)) {
      throw Error(ErrorKind::InvalidInput,
                  "vertex image key '" + format_vertex(v) +
                      "' is not a stored-window canonical vertex");
    }
    if (!(canonicalize_vertex(g, img) == img)) {
      throw Error(ErrorKind::InvalidInput,
                  "vertex image of '" + format_vertex(v) + "' is not canonical");
    }
  }
  for (const auto& v : expected_v) {
    if (!m.vertex_images.count(v)) {
      throw Error(ErrorKind::InvalidInput,
                  "missing vertex image for '" + format_vertex(v) + "'");
    }
  }

  // Edge images: exactly the stored window, with valid, connected values
  // whose endpoints agree with the vertex images.
  std::set<EdgeAddr> expected_e;
  for (const auto& e : g.core.edges) expected_e.insert(core_edge(e.id));
  for (const auto& end : g.ends) {
    for (int n = 0; n < m.depth; ++n) {
      for (const auto& e : end.domain.edges) expected_e.insert(end_edge(end.id, n, e.id));
    }
  }
  for (const auto& [e, img] : m.edge_images) {
    if (!expected_e.count(e)) {
      throw Error(ErrorKind::InvalidInput,
                  "edge image key '" + format_edge(e) + "' is not a stored-window edge");
    }
    for (const auto& o : img) {
      // Validates that the crossed edge exists.
      edge_tail(g, o.edge);
    }
    if (!is_connected_path(g, img)) {
      throw Error(ErrorKind::InvalidInput,
                  "image of '" + format_edge(e) + "' is not a connected path");
    }
    VertexAddr want_tail = map_vertex(g, m, edge_tail(g, e));
    VertexAddr want_head = map_vertex(g, m, edge_head(g, e));
    if (img.empty()) {
      if (!(want_tail == want_head)) {
        throw Error(ErrorKind::InvalidInput,
                    "edge '" + format_edge(e) +
                        "' has a trivial image but its endpoints map apart");
      }
    } else {
      if (!(oriented_tail(g, img.front()) == want_tail) ||
          !(oriented_head(g, img.back()) == want_head)) {
        throw Error(ErrorKind::InvalidInput,
                    "image endpoints of '" + format_edge(e) +
                        "' disagree with the vertex images");
      }
    }
  }
  for (const auto& e : expected_e) {
    if (!m.edge_images.count(e)) {
      throw Error(ErrorKind::InvalidInput,
                  "missing edge image for '" + format_edge(e) + "'");
    }
  }

  // The translation template (copy depth-1) must stay inside the end region
  // of the declared target end, for both edges and vertices.
  for (const auto& end : g.ends) {
    const std::string& target = m.end_targets.at(end.id);
    for (const auto& e : end.domain.edges) {
      const EdgePath& img = stored_edge_image(m, end_edge(end.id, m.depth - 1, e.id));
      for (const auto& o : img) {
        if (o.edge.is_core() || o.edge.end != target) {
          throw Error(ErrorKind::InvalidInput,
                      "image of '" + format_edge(end_edge(end.id, m.depth - 1, e.id)) +
                          "' must lie in end region '" + target + "'");
        }
      }
      if (img.empty()) {
        throw Error(ErrorKind::InvalidInput,
                    "translation template for '" +
                        format_edge(end_edge(end.id, m.depth - 1, e.id)) +
                        "' must be nonempty");
      }
    }
    for (const auto& v : end.domain.vertices) {
      if (end.is_inner(v)) continue;
      const VertexAddr& img = m.vertex_images.at(end_vertex(end.id, m.depth - 1, v));
      if (img.is_core() || img.end != target) {
        throw Error(ErrorKind::InvalidInput,
                    "image of '" + format_vertex(end_vertex(end.id, m.depth - 1, v)) +
                        "' must lie in end region '" + target + "'");
      }
    }
  }
  return notes;
}

// A presented graph together with a self-map; the unit most of the library
// operates on.
struct EpgSystem {
  GraphPresentation graph;
  GraphMapPresentation map;
};

inline std::vector<std::string> validate_system(const EpgSystem& s) {
  validate(s.graph);
  return validate_map(s.graph, s.map);
}

}  // namespace epg
