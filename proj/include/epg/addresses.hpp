#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "epg/errors.hpp"

namespace epg {

// Cells of the infinite graph are addressed either in the finite core
// ("core:a0") or in the n-th fundamental-domain copy of an end region
// ("R@3:a").  Oriented edges carry a reversal prefix '~' ("~R@3:a").
//
// An address with an empty `end` field refers to the core; `copy` is then
// meaningless and kept at 0 so that comparisons stay well defined.

struct VertexAddr {
  std::string end;
  int copy = 0;
  std::string local;

  bool is_core() const { return end.empty(); }

  friend bool operator==(const VertexAddr& a, const VertexAddr& b) {
    return a.end == b.end && a.copy == b.copy && a.local == b.local;
  }
  friend bool operator<(const VertexAddr& a, const VertexAddr& b) {
    return std::tie(a.end, a.copy, a.local) < std::tie(b.end, b.copy, b.local);
  }
};

struct EdgeAddr {
  std::string end;
  int copy = 0;
  std::string local;

  bool is_core() const { return end.empty(); }

  friend bool operator==(const EdgeAddr& a, const EdgeAddr& b) {
    return a.end == b.end && a.copy == b.copy && a.local == b.local;
  }
  friend bool operator!=(const EdgeAddr& a, const EdgeAddr& b) { return !(a == b); }
  friend bool operator<(const EdgeAddr& a, const EdgeAddr& b) {
    return std::tie(a.end, a.copy, a.local) < std::tie(b.end, b.copy, b.local);
  }
};

inline VertexAddr core_vertex(const std::string& v) { return VertexAddr{"", 0, v}; }
inline EdgeAddr core_edge(const std::string& e) { return EdgeAddr{"", 0, e}; }
inline VertexAddr end_vertex(const std::string& end, int copy, const std::string& v) {
  return VertexAddr{end, copy, v};
}
inline EdgeAddr end_edge(const std::string& end, int copy, const std::string& e) {
  return EdgeAddr{end, copy, e};
}

struct OrientedEdge {
  EdgeAddr edge;
  bool reversed = false;

  OrientedEdge reverse() const { return OrientedEdge{edge, !reversed}; }

  friend bool operator==(const OrientedEdge& a, const OrientedEdge& b) {
    return a.edge == b.edge && a.reversed == b.reversed;
  }
  friend bool operator!=(const OrientedEdge& a, const OrientedEdge& b) { return !(a == b); }
  friend bool operator<(const OrientedEdge& a, const OrientedEdge& b) {
    if (a.edge == b.edge) return a.reversed < b.reversed;
    return a.edge < b.edge;
  }
};

inline OrientedEdge fwd(const EdgeAddr& e) { return OrientedEdge{e, false}; }
inline OrientedEdge rev(const EdgeAddr& e) { return OrientedEdge{e, true}; }

// --- formatting ------------------------------------------------------------

inline std::string format_vertex(const VertexAddr& v) {
  if (v.is_core()) return "core:" + v.local;
  return v.end + "@" + std::to_string(v.copy) + ":" + v.local;
}

inline std::string format_edge(const EdgeAddr& e) {
  if (e.is_core()) return "core:" + e.local;
  return e.end + "@" + std::to_string(e.copy) + ":" + e.local;
}

inline std::string format_oriented(const OrientedEdge& o) {
  return (o.reversed ? "~" : "") + format_edge(o.edge);
}

// --- parsing ---------------------------------------------------------------

namespace detail {

// Splits "core:x" or "E@n:x" into its parts; shared by vertex and edge
// parsing since both use the same syntax.
inline void parse_addr_parts(const std::string& s, std::string& end, int& copy,
                             std::string& local) {
  auto colon = s.find(':');
  if (colon == std::string::npos || colon + 1 >= s.size()) {
    throw Error(ErrorKind::InvalidInput, "malformed address '" + s + "'");
  }
  std::string region = s.substr(0, colon);
  local = s.substr(colon + 1);
  if (region == "core") {
    end.clear();
    copy = 0;
    return;
  }
  auto at = region.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= region.size()) {
    throw Error(ErrorKind::InvalidInput, "malformed address '" + s + "'");
  }
  end = region.substr(0, at);
  try {
    size_t used = 0;
    copy = std::stoi(region.substr(at + 1), &used);
    if (used != region.size() - at - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "malformed copy index in '" + s + "'");
  }
  if (copy < 0) {
    throw Error(ErrorKind::InvalidInput, "negative copy index in '" + s + "'");
  }
}

}  // namespace detail

inline VertexAddr parse_vertex(const std::string& s) {
  VertexAddr v;
  detail::parse_addr_parts(s, v.end, v.copy, v.local);
  return v;
}

inline EdgeAddr parse_edge(const std::string& s) {
  EdgeAddr e;
  detail::parse_addr_parts(s, e.end, e.copy, e.local);
  return e;
}

inline OrientedEdge parse_oriented(const std::string& s) {
  if (!s.empty() && s[0] == '~') {
    return OrientedEdge{parse_edge(s.substr(1)), true};
  }
  return OrientedEdge{parse_edge(s), false};
}

}  // namespace epg
