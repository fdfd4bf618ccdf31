#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "epg/errors.hpp"

namespace epg {

// A finite directed multigraph with string-named cells.  Edge directions are
// bookkeeping only (paths may traverse edges either way); they fix what
// "forward" means for an oriented edge.
struct EdgeRec {
  std::string id;
  std::string tail;
  std::string head;
};

struct FiniteGraph {
  std::vector<std::string> vertices;
  std::vector<EdgeRec> edges;

  bool has_vertex(const std::string& v) const {
    return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
  }

  const EdgeRec* find_edge(const std::string& id) const {
    for (const auto& e : edges) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }

  const EdgeRec& edge(const std::string& id) const {
    const EdgeRec* e = find_edge(id);
    if (!e) throw Error(ErrorKind::InvalidInput, "unknown edge '" + id + "'");
    return *e;
  }
};

inline void validate_graph(const FiniteGraph& g, const std::string& label) {
  std::set<std::string> vseen;
  for (const auto& v : g.vertices) {
    if (!vseen.insert(v).second) {
      throw Error(ErrorKind::InvalidInput,
                  label + ": duplicate vertex '" + v + "'");
    }
  }
  std::set<std::string> eseen;
  for (const auto& e : g.edges) {
    if (!eseen.insert(e.id).second) {
      throw Error(ErrorKind::InvalidInput,
                  label + ": duplicate edge '" + e.id + "'");
    }
    if (!vseen.count(e.tail) || !vseen.count(e.head)) {
      throw Error(ErrorKind::InvalidInput,
                  label + ": edge '" + e.id + "' has an unknown endpoint");
    }
  }
}

}  // namespace epg
