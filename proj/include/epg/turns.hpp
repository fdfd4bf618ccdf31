#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "epg/map_presentation.hpp"

namespace epg {

// A turn is an unordered pair of oriented edges sharing a canonical tail
// vertex; it is degenerate when both sides are the same oriented edge.  A
// tight path a.b takes the turn {~a, b} at each junction.
struct Turn {
  OrientedEdge a, b;  // normalized so that a <= b

  friend bool operator==(const Turn& x, const Turn& y) {
    return x.a == y.a && x.b == y.b;
  }
  friend bool operator<(const Turn& x, const Turn& y) {
    if (x.a == y.a) return x.b < y.b;
    return x.a < y.a;
  }
};

inline Turn make_turn(const OrientedEdge& a, const OrientedEdge& b) {
  if (b < a) return Turn{b, a};
  return Turn{a, b};
}

inline Turn make_turn_checked(const GraphPresentation& g, const OrientedEdge& a,
                              const OrientedEdge& b) {
  if (!(oriented_tail(g, a) == oriented_tail(g, b))) {
    throw Error(ErrorKind::InvalidInput,
                "turn sides " + format_oriented(a) + ", " + format_oriented(b) +
                    " do not share a tail vertex");
  }
  return make_turn(a, b);
}

inline bool is_degenerate(const Turn& t) { return t.a == t.b; }

inline std::string format_turn(const Turn& t) {
  return "{" + format_oriented(t.a) + ", " + format_oriented(t.b) + "}";
}

// Pushes a turn forward through the map derivative.  Returns nothing when a
// side has a collapsed image (no derivative).
inline std::optional<Turn> map_turn(const GraphMapPresentation& m, const Turn& t) {
  auto da = derivative(m, t.a);
  auto db = derivative(m, t.b);
  if (!da || !db) return std::nullopt;
  return make_turn(*da, *db);
}

struct TurnClass {
  bool legal = true;
  int witness = -1;  // smallest k with a degenerate k-th derivative image
};

// Classifies a turn by iterating the derivative map.  Orbits are detected in
// a translated normal form: when both sides sit in the same end region at
// copies >= depth-1, the pair may be shifted down uniformly without changing
// its forward behaviour (equivariance), which makes the reachable set finite
// for maps of the supported type.  A safety cap guards against inputs where
// it is not.
inline TurnClass classify_turn(const GraphMapPresentation& m, Turn t,
                               int cap = 10000) {
  auto normalize = [&](Turn x) {
    if (!x.a.edge.is_core() && !x.b.edge.is_core() &&
        x.a.edge.end == x.b.edge.end) {
      int lo = std::min(x.a.edge.copy, x.b.edge.copy);
      int delta = lo - (m.depth - 1);
      if (delta > 0) {
        x.a.edge.copy -= delta;
        x.b.edge.copy -= delta;
        x = make_turn(x.a, x.b);
      }
    }
    return x;
  };
  std::set<Turn> seen;
  t = normalize(t);
  for (int k = 0; k <= cap; ++k) {
    if (is_degenerate(t)) return TurnClass{false, k};
    if (!seen.insert(t).second) return TurnClass{true, -1};
    auto next = map_turn(m, t);
    if (!next) {
      // A collapsed side never becomes degenerate again; treat as legal.
      return TurnClass{true, -1};
    }
    t = normalize(*next);
  }
  throw Error(ErrorKind::CapExceeded, "turn classification did not stabilize");
}

// Turns taken by a tight path: one per interior junction.
inline std::vector<Turn> turns_taken(const EdgePath& tight_path) {
  std::vector<Turn> out;
  for (size_t i = 0; i + 1 < tight_path.size(); ++i) {
    out.push_back(make_turn(tight_path[i].reverse(), tight_path[i + 1]));
  }
  return out;
}

// All nondegenerate turns at a canonical vertex.
inline std::vector<Turn> turns_at_vertex(const GraphPresentation& g,
                                         const VertexAddr& v) {
  std::vector<OrientedEdge> inc = incident_oriented(g, v);
  std::vector<Turn> out;
  for (size_t i = 0; i < inc.size(); ++i) {
    for (size_t j = i + 1; j < inc.size(); ++j) {
      out.push_back(make_turn(inc[i], inc[j]));
    }
  }
  return out;
}

}  // namespace epg
