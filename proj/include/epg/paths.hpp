#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "epg/addresses.hpp"
#include "epg/presentation.hpp"

namespace epg {

using EdgePath = std::vector<OrientedEdge>;

inline EdgePath reverse_path(const EdgePath& p) {
  EdgePath out;
  out.reserve(p.size());
  for (auto it = p.rbegin(); it != p.rend(); ++it) out.push_back(it->reverse());
  return out;
}

// Removes adjacent backtracking pairs e.~e until none remain.  Implemented
// as a single left-to-right pass with a stack, which is linear and produces
// the unique reduced word.
inline EdgePath tighten(const EdgePath& p) {
  EdgePath out;
  out.reserve(p.size());
  for (const auto& o : p) {
    if (!out.empty() && out.back() == o.reverse()) {
      out.pop_back();
    } else {
      out.push_back(o);
    }
  }
  return out;
}

// Tightens a closed path cyclically: first reduces it as a word, then keeps
// cancelling first-against-last.  The result is the cyclically reduced core
// of the loop (possibly empty).
inline EdgePath cyclic_tighten(const EdgePath& p) {
  EdgePath out = tighten(p);
  size_t lo = 0, hi = out.size();
  while (hi - lo >= 2 && out[lo] == out[hi - 1].reverse()) {
    ++lo;
    --hi;
  }
  return EdgePath(out.begin() + static_cast<long>(lo),
                  out.begin() + static_cast<long>(hi));
}

// Checks endpoint matching of consecutive steps; returns false on the empty
// path only if `allow_empty` is false.
inline bool is_connected_path(const GraphPresentation& g, const EdgePath& p) {
  for (size_t i = 0; i + 1 < p.size(); ++i) {
    if (!(oriented_head(g, p[i]) == oriented_tail(g, p[i + 1]))) return false;
  }
  return true;
}

inline bool is_closed_path(const GraphPresentation& g, const EdgePath& p) {
  if (p.empty()) return true;
  return is_connected_path(g, p) &&
         oriented_head(g, p.back()) == oriented_tail(g, p.front());
}

inline std::string format_path(const EdgePath& p) {
  std::ostringstream os;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) os << '.';
    os << format_oriented(p[i]);
  }
  return os.str();
}

// Parses a comma- or dot-separated list of oriented edge addresses.
inline EdgePath parse_path(const std::string& s) {
  EdgePath out;
  std::string token;
  auto flush = [&]() {
    if (!token.empty()) {
      out.push_back(parse_oriented(token));
      token.clear();
    }
  };
  for (char c : s) {
    if (c == ',' || c == '.' || c == ' ') {
      flush();
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace epg
