#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "epg/filtration.hpp"
#include "epg/map_presentation.hpp"
#include "epg/paths.hpp"

namespace epg {

// Canonical representative of a free homotopy class: the cyclically tight
// word, rotated to its lexicographic minimum.  Orientation is not quotiented
// out, so a loop and its reverse normalize differently.
inline EdgePath conjugacy_class(const EdgePath& loop) {
  EdgePath t = cyclic_tighten(loop);
  if (t.size() <= 1) return t;
  EdgePath best = t;
  EdgePath cur = t;
  for (std::size_t i = 1; i < t.size(); ++i) {
    std::rotate(cur.begin(), cur.begin() + 1, cur.end());
    if (cur < best) best = cur;
  }
  return best;
}

// Length of the cyclically tight representative.
inline std::size_t bounded_length(const EdgePath& loop) {
  return cyclic_tighten(loop).size();
}

// Iterates loops under the map using interned integer letters, so that long
// words stay cheap: letter ids pair up orientations (id ^ 1 is the inverse)
// and images are memoized per oriented letter.
class LoopIterator {
 public:
  explicit LoopIterator(const GraphMapPresentation& m) : m_(&m) {}

  std::vector<std::int32_t> encode(const EdgePath& p) {
    std::vector<std::int32_t> out;
    out.reserve(p.size());
    for (const auto& o : p) {
      out.push_back(intern(o.edge) * 2 + (o.reversed ? 1 : 0));
    }
    return out;
  }

  EdgePath decode(const std::vector<std::int32_t>& w) const {
    EdgePath out;
    out.reserve(w.size());
    for (std::int32_t x : w) {
      out.push_back(OrientedEdge{addrs_[static_cast<std::size_t>(x / 2)], (x & 1) != 0});
    }
    return out;
  }

  // One application of the map, tightened and cyclically reduced.
  std::vector<std::int32_t> step(const std::vector<std::int32_t>& w) {
    std::size_t total = 0;
    for (std::int32_t x : w) total += image(x).size();
    std::vector<std::int32_t> out;
    out.reserve(total);
    for (std::int32_t x : w) {
      for (std::int32_t y : image(x)) {
        if (!out.empty() && out.back() == (y ^ 1)) {
          out.pop_back();
        } else {
          out.push_back(y);
        }
      }
    }
    std::size_t i = 0, j = out.size();
    while (j - i >= 2 && out[i] == (out[j - 1] ^ 1)) {
      ++i;
      --j;
    }
    out.erase(out.begin() + static_cast<std::ptrdiff_t>(j), out.end());
    out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(i));
    return out;
  }

  // Marks the letter indices of a set of edges, for restricted counting.
  std::vector<std::int32_t> mark(const std::vector<EdgeAddr>& sub) {
    std::vector<std::int32_t> out;
    for (const auto& e : sub) out.push_back(intern(e));
    std::sort(out.begin(), out.end());
    return out;
  }

  // Letters of `w` lying over the marked indices; all letters when empty.
  std::size_t count(const std::vector<std::int32_t>& w,
                    const std::vector<std::int32_t>& marks) const {
    if (marks.empty()) return w.size();
    std::size_t c = 0;
    for (std::int32_t x : w) {
      if (std::binary_search(marks.begin(), marks.end(), x / 2)) ++c;
    }
    return c;
  }

 private:
  std::int32_t intern(const EdgeAddr& e) {
    auto it = index_.find(e);
    if (it != index_.end()) return it->second;
    std::int32_t idx = static_cast<std::int32_t>(addrs_.size());
    index_.emplace(e, idx);
    addrs_.push_back(e);
    img_.emplace_back();
    img_.emplace_back();
    has_.push_back(false);
    return idx;
  }

  const std::vector<std::int32_t>& image(std::int32_t oid) {
    std::int32_t idx = oid / 2;
    if (!has_[static_cast<std::size_t>(idx)]) {
      EdgePath raw = edge_image(*m_, addrs_[static_cast<std::size_t>(idx)]);
      std::vector<std::int32_t> fwd_img = encode(raw);
      std::vector<std::int32_t> rev_img(fwd_img.rbegin(), fwd_img.rend());
      for (auto& x : rev_img) x ^= 1;
      img_[static_cast<std::size_t>(idx) * 2] = std::move(fwd_img);
      img_[static_cast<std::size_t>(idx) * 2 + 1] = std::move(rev_img);
      has_[static_cast<std::size_t>(idx)] = true;
    }
    return img_[static_cast<std::size_t>(oid)];
  }

  const GraphMapPresentation* m_;
  std::map<EdgeAddr, std::int32_t> index_;
  std::vector<EdgeAddr> addrs_;
  std::vector<std::vector<std::int32_t>> img_;
  std::vector<char> has_;
};

struct GrowthSample {
  std::vector<std::size_t> lengths;  // lengths[n] after n applications
  std::optional<double> exponent;    // best slope over the second half
};

// Iterates a loop and estimates its exponential growth rate from pairs of
// lengths in the second half of the orbit.  Lengths count only the letters
// over `sub` when it is nonempty.
inline GrowthSample sample_growth(const EpgSystem& s, const EdgePath& loop, int iters,
                                  const std::vector<EdgeAddr>& sub = {}) {
  LoopIterator it(s.map);
  std::vector<std::int32_t> marks = it.mark(sub);
  std::vector<std::int32_t> w = it.encode(cyclic_tighten(loop));
  GrowthSample out;
  out.lengths.push_back(it.count(w, marks));
  for (int n = 1; n <= iters; ++n) {
    w = it.step(w);
    out.lengths.push_back(it.count(w, marks));
  }
  int lo = iters / 2;
  for (int n1 = lo; n1 < iters; ++n1) {
    for (int n2 = n1 + 1; n2 <= iters; ++n2) {
      std::size_t l1 = out.lengths[static_cast<std::size_t>(n1)];
      std::size_t l2 = out.lengths[static_cast<std::size_t>(n2)];
      if (l1 == 0 || l2 == 0) continue;
      double slope = (std::log(static_cast<double>(l2)) - std::log(static_cast<double>(l1))) /
                     static_cast<double>(n2 - n1);
      if (!out.exponent || slope > *out.exponent) out.exponent = slope;
    }
  }
  return out;
}

inline double growth_exponent(const EpgSystem& s, const EdgePath& loop, int iters,
                              const std::vector<EdgeAddr>& sub = {}) {
  GrowthSample g = sample_growth(s, loop, iters, sub);
  return g.exponent ? *g.exponent : 0.0;
}

// Whether the loop's core content dies out within `iters` applications; such
// loops are carried entirely into the end regions.
inline bool escapes(const EpgSystem& s, const EdgePath& loop, int iters) {
  std::vector<EdgeAddr> core;
  for (const auto& e : s.graph.core.edges) core.push_back(core_edge(e.id));
  LoopIterator it(s.map);
  std::vector<std::int32_t> marks = it.mark(core);
  std::vector<std::int32_t> w = it.encode(cyclic_tighten(loop));
  if (it.count(w, marks) == 0) return true;
  for (int n = 1; n <= iters; ++n) {
    w = it.step(w);
    if (it.count(w, marks) == 0) return true;
  }
  return false;
}

// Topological entropy of the presented map.
inline double entropy(const Filtration& f) { return std::log(f.lambda()); }

// A short essential loop through the fastest-stretching stratum whose
// crossings of that stratum provably multiply; iterating it realizes the top
// growth rate.  Return routes are tried in order of length, and a candidate
// is accepted only when twelve iterations strictly increase its crossing
// count (a route can otherwise cancel the crossing away).
inline std::optional<EdgePath> supremum_witness(const EpgSystem& s, const Filtration& f) {
  int top = -1;
  double best = 0.0;
  for (std::size_t k = 0; k < f.strata.size(); ++k) {
    if (f.strata[k].exponential && f.strata[k].radius > best) {
      best = f.strata[k].radius;
      top = static_cast<int>(k);
    }
  }
  if (top < 0) return std::nullopt;
  const std::vector<EdgeAddr>& members = f.strata[static_cast<std::size_t>(top)].edges;
  auto survives = [&](const EdgePath& loop) {
    GrowthSample g = sample_growth(s, loop, 12, members);
    return g.lengths.front() > 0 && g.lengths.back() > g.lengths.front();
  };
  for (const auto& e : members) {
    VertexAddr from = edge_head(s.graph, e);
    VertexAddr to = edge_tail(s.graph, e);
    if (from == to) {
      EdgePath cand = {fwd(e)};
      if (survives(cand)) return cand;
    }
    struct Node {
      VertexAddr at;
      EdgePath path;
    };
    std::vector<Node> frontier = {{from, {}}};
    int produced = 0;
    // Long enough to route around a core whose edges have been subdivided.
    int max_len = 6 + static_cast<int>(s.graph.core.edges.size());
    for (int len = 1; len <= max_len && produced < 500; ++len) {
      std::vector<Node> next;
      for (const auto& nd : frontier) {
        for (const auto& o : incident_oriented(s.graph, nd.at)) {
          if (o.edge == e) continue;
          if (!o.edge.is_core() && o.edge.copy > f.windows.at(o.edge.end) + 2) continue;
          if (!nd.path.empty() && o == nd.path.back().reverse()) continue;
          Node nx{oriented_head(s.graph, o), nd.path};
          nx.path.push_back(o);
          if (nx.at == to) {
            EdgePath cand = {fwd(e)};
            cand.insert(cand.end(), nx.path.begin(), nx.path.end());
            ++produced;
            if (survives(cand)) return cand;
          }
          next.push_back(std::move(nx));
        }
      }
      frontier = std::move(next);
      if (frontier.size() > 4000) frontier.resize(4000);
    }
  }
  return std::nullopt;
}

}  // namespace epg
