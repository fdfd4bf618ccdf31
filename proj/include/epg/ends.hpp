#pragma once

#include <map>
#include <string>

#include "epg/map_presentation.hpp"

namespace epg {

enum class EndKind { Attracting, Repelling };

inline const char* to_string(EndKind k) {
  return k == EndKind::Attracting ? "attracting" : "repelling";
}

// Per-end translation range: the minimum and maximum copy shift that the
// translation template (copy depth-1) performs in one application of the map.
struct EndShift {
  int delta_min = 0;
  int delta_max = 0;
};

inline std::map<std::string, EndShift> end_shifts(const GraphPresentation& g,
                                                  const GraphMapPresentation& m) {
  std::map<std::string, EndShift> out;
  for (const auto& end : g.ends) {
    bool first = true;
    EndShift s;
    for (const auto& e : end.domain.edges) {
      const EdgePath& img = stored_edge_image(m, end_edge(end.id, m.depth - 1, e.id));
      for (const auto& o : img) {
        int delta = o.edge.copy - (m.depth - 1);
        if (first) {
          s.delta_min = s.delta_max = delta;
          first = false;
        } else {
          s.delta_min = std::min(s.delta_min, delta);
          s.delta_max = std::max(s.delta_max, delta);
        }
      }
    }
    if (first) {
      throw Error(ErrorKind::InvalidInput,
                  "end '" + end.id + "' has an empty translation template");
    }
    out[end.id] = s;
  }
  return out;
}

// Decides, for every end, whether neighborhoods of it are mapped properly
// into themselves (attracting) or properly over themselves (repelling),
// following the copy drift accumulated around the orbit of the end under the
// end permutation.  A cycle whose worst-case drift straddles zero is neither,
// and the map is rejected.
inline std::map<std::string, EndKind> classify_ends(const GraphPresentation& g,
                                                    const GraphMapPresentation& m) {
  std::map<std::string, EndShift> shifts = end_shifts(g, m);
  std::map<std::string, EndKind> out;
  for (const auto& end : g.ends) {
    // Walk the orbit of this end; end targets are a permutation, so the walk
    // returns to the start.
    int sum_min = 0, sum_max = 0;
    std::string cur = end.id;
    do {
      sum_min += shifts.at(cur).delta_min;
      sum_max += shifts.at(cur).delta_max;
      cur = m.end_targets.at(cur);
    } while (cur != end.id);
    if (sum_min >= 1) {
      out[end.id] = EndKind::Attracting;
    } else if (sum_max <= -1) {
      out[end.id] = EndKind::Repelling;
    } else {
      throw Error(ErrorKind::NotEndperiodic,
                  "end '" + end.id + "' is neither attracting nor repelling (orbit drift [" +
                      std::to_string(sum_min) + ", " + std::to_string(sum_max) + "])");
    }
  }
  return out;
}

}  // namespace epg
