#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "epg/map_presentation.hpp"

namespace epg {

// Built-in systems used by the test suite and exposed through the CLI.
//
//  * ladder-shift:      the two-sided infinite ladder, translated one rung
//                       to the right.  Left end repelling, right end
//                       attracting, no finite dynamics at all.
//  * ladder-shift-tau:  the same translation composed with a twist supported
//                       on one square of the ladder; this produces a single
//                       exponentially growing middle edge.
//  * fib-ray:           a wedge of two loops with a ray attached; the loops
//                       map by the golden-mean substitution and the ray is
//                       pushed outward.
//  * ladder-midpoint:   ladder-shift-tau with every core edge cut at its
//                       midpoint; dynamically the same map.

namespace fixtures_detail {

inline GraphPresentation ladder_graph() {
  GraphPresentation g;
  g.core.vertices = {"u-1", "u0", "u1", "w-1", "w0", "w1"};
  g.core.edges = {
      {"a-1", "u-1", "w-1"}, {"a0", "u0", "w0"}, {"a1", "u1", "w1"},
      {"b-1", "u-1", "u0"},  {"b0", "u0", "u1"},
      {"c-1", "w-1", "w0"},  {"c0", "w0", "w1"},
  };
  EndPresentation left;
  left.id = "L";
  left.domain.vertices = {"yt", "yb", "jt", "jb"};
  left.domain.edges = {{"a", "yt", "yb"}, {"b", "yt", "jt"}, {"c", "yb", "jb"}};
  left.inner = {"jt", "jb"};
  left.outer = {"yt", "yb"};
  left.attach = {{"yt", "jt"}, {"yb", "jb"}};
  left.core_attach = {{"jt", "u-1"}, {"jb", "w-1"}};
  EndPresentation right;
  right.id = "R";
  right.domain.vertices = {"xt", "xb", "it", "ib"};
  right.domain.edges = {{"b", "it", "xt"}, {"c", "ib", "xb"}, {"a", "xt", "xb"}};
  right.inner = {"it", "ib"};
  right.outer = {"xt", "xb"};
  right.attach = {{"xt", "it"}, {"xb", "ib"}};
  right.core_attach = {{"it", "u1"}, {"ib", "w1"}};
  g.ends = {left, right};
  return g;
}

inline GraphMapPresentation ladder_map_common() {
  GraphMapPresentation m;
  m.depth = 2;
  m.end_targets = {{"L", "L"}, {"R", "R"}};
  m.vertex_images = {
      {core_vertex("u-1"), core_vertex("u0")},
      {core_vertex("u0"), core_vertex("u1")},
      {core_vertex("u1"), end_vertex("R", 0, "xt")},
      {core_vertex("w-1"), core_vertex("w0")},
      {core_vertex("w0"), core_vertex("w1")},
      {core_vertex("w1"), end_vertex("R", 0, "xb")},
      {end_vertex("L", 0, "yt"), core_vertex("u-1")},
      {end_vertex("L", 0, "yb"), core_vertex("w-1")},
      {end_vertex("L", 1, "yt"), end_vertex("L", 0, "yt")},
      {end_vertex("L", 1, "yb"), end_vertex("L", 0, "yb")},
      {end_vertex("R", 0, "xt"), end_vertex("R", 1, "xt")},
      {end_vertex("R", 0, "xb"), end_vertex("R", 1, "xb")},
      {end_vertex("R", 1, "xt"), end_vertex("R", 2, "xt")},
      {end_vertex("R", 1, "xb"), end_vertex("R", 2, "xb")},
  };
  auto ce = [](const char* s) { return fwd(core_edge(s)); };
  auto cex = [](const char* s) { return rev(core_edge(s)); };
  m.edge_images = {
      {core_edge("a0"), {ce("a1")}},
      {core_edge("a1"), {fwd(end_edge("R", 0, "a"))}},
      {core_edge("b-1"), {ce("b0")}},
      {core_edge("b0"), {fwd(end_edge("R", 0, "b"))}},
      {core_edge("c-1"), {ce("c0")}},
      {core_edge("c0"), {fwd(end_edge("R", 0, "c"))}},
      {end_edge("L", 0, "a"), {ce("a-1")}},
      {end_edge("L", 0, "b"), {ce("b-1")}},
      {end_edge("L", 0, "c"), {ce("c-1")}},
      {end_edge("L", 1, "a"), {fwd(end_edge("L", 0, "a"))}},
      {end_edge("L", 1, "b"), {fwd(end_edge("L", 0, "b"))}},
      {end_edge("L", 1, "c"), {fwd(end_edge("L", 0, "c"))}},
      {end_edge("R", 0, "a"), {fwd(end_edge("R", 1, "a"))}},
      {end_edge("R", 0, "b"), {fwd(end_edge("R", 1, "b"))}},
      {end_edge("R", 0, "c"), {fwd(end_edge("R", 1, "c"))}},
      {end_edge("R", 1, "a"), {fwd(end_edge("R", 2, "a"))}},
      {end_edge("R", 1, "b"), {fwd(end_edge("R", 2, "b"))}},
      {end_edge("R", 1, "c"), {fwd(end_edge("R", 2, "c"))}},
  };
  (void)cex;
  return m;
}

}  // namespace fixtures_detail

// Plain translation of the ladder.
inline EpgSystem ladder_shift() {
  EpgSystem s;
  s.graph = fixtures_detail::ladder_graph();
  s.map = fixtures_detail::ladder_map_common();
  s.map.edge_images[core_edge("a-1")] = {fwd(core_edge("a0"))};
  return s;
}

// Translation composed with a twist around one square: the image of the rung
// a-1 wraps around the square twice on its way across.
inline EpgSystem ladder_shift_tau() {
  EpgSystem s;
  s.graph = fixtures_detail::ladder_graph();
  s.map = fixtures_detail::ladder_map_common();
  auto f = [](const char* e) { return fwd(core_edge(e)); };
  auto r = [](const char* e) { return rev(core_edge(e)); };
  s.map.edge_images[core_edge("a-1")] = {
      r("b-1"), f("a-1"), f("c-1"), f("c0"), r("a1"), r("b0"), f("a0"),
      r("c-1"), r("a-1"), f("b-1"), f("b0"), f("a1"), r("c0"),
  };
  return s;
}

// Golden-mean substitution on a wedge of two loops, with an escaping ray.
inline EpgSystem fib_ray() {
  EpgSystem s;
  s.graph.core.vertices = {"v"};
  s.graph.core.edges = {{"p", "v", "v"}, {"q", "v", "v"}};
  EndPresentation e;
  e.id = "E";
  e.domain.vertices = {"x", "y"};
  e.domain.edges = {{"r", "x", "y"}};
  e.inner = {"x"};
  e.outer = {"y"};
  e.attach = {{"y", "x"}};
  e.core_attach = {{"x", "v"}};
  s.graph.ends = {e};
  s.map.depth = 2;
  s.map.end_targets = {{"E", "E"}};
  s.map.vertex_images = {
      {core_vertex("v"), core_vertex("v")},
      {end_vertex("E", 0, "y"), end_vertex("E", 1, "y")},
      {end_vertex("E", 1, "y"), end_vertex("E", 2, "y")},
  };
  s.map.edge_images = {
      {core_edge("p"), {fwd(core_edge("p")), fwd(core_edge("q"))}},
      {core_edge("q"), {fwd(core_edge("p"))}},
      {end_edge("E", 0, "r"), {fwd(end_edge("E", 0, "r")), fwd(end_edge("E", 1, "r"))}},
      {end_edge("E", 1, "r"), {fwd(end_edge("E", 2, "r"))}},
  };
  return s;
}

// ladder-shift-tau with every core edge subdivided at its midpoint.  Each
// core edge e becomes e_1.e_2; a crossing of e in an image becomes a crossing
// of both halves.  Images of half-edges split the doubled image path down
// the middle when it has even length; a length-one image goes entirely to
// the first half (the second half collapses onto the image's endpoint).
inline EpgSystem ladder_midpoint() {
  EpgSystem base = ladder_shift_tau();
  EpgSystem s;
  s.map.depth = base.map.depth;
  s.map.end_targets = base.map.end_targets;
  s.graph.ends = base.graph.ends;
  s.graph.core.vertices = base.graph.core.vertices;
  for (const auto& e : base.graph.core.edges) {
    std::string mid = "m_" + e.id;
    s.graph.core.vertices.push_back(mid);
    s.graph.core.edges.push_back({e.id + "_1", e.tail, mid});
    s.graph.core.edges.push_back({e.id + "_2", mid, e.head});
  }
  // Doubles a path in the base graph into the subdivided graph.
  auto expand = [&](const EdgePath& p) {
    EdgePath out;
    for (const auto& o : p) {
      if (!o.edge.is_core()) {
        out.push_back(o);
      } else if (!o.reversed) {
        out.push_back(fwd(core_edge(o.edge.local + "_1")));
        out.push_back(fwd(core_edge(o.edge.local + "_2")));
      } else {
        out.push_back(rev(core_edge(o.edge.local + "_2")));
        out.push_back(rev(core_edge(o.edge.local + "_1")));
      }
    }
    return out;
  };
  s.map.vertex_images = base.map.vertex_images;
  for (const auto& [e, img] : base.map.edge_images) {
    if (!e.is_core()) {
      s.map.edge_images[e] = expand(img);
      continue;
    }
    EdgePath doubled = expand(img);
    EdgeAddr e1 = core_edge(e.local + "_1");
    EdgeAddr e2 = core_edge(e.local + "_2");
    size_t split = doubled.size() / 2;
    if (doubled.size() % 2 != 0) split = doubled.size();  // odd: all to front
    s.map.edge_images[e1] = EdgePath(doubled.begin(), doubled.begin() + split);
    s.map.edge_images[e2] = EdgePath(doubled.begin() + split, doubled.end());
    VertexAddr mid_img = split == doubled.size()
                             ? map_vertex(base.graph, base.map,
                                          core_vertex(base.graph.core.edge(e.local).head))
                             : VertexAddr{};
    if (split != doubled.size()) {
      // Midpoint maps to the junction vertex of the two halves.
      mid_img = oriented_head(s.graph, doubled[split - 1]);
    }
    s.map.vertex_images[core_vertex("m_" + e.local)] = mid_img;
  }
  return s;
}

// Seeded perturbations of ladder-shift: appends short tight core loops to
// the images of up to three core edges.  Endpoints are preserved, so the
// result is always a valid system; its dynamics vary with the seed.
inline EpgSystem perturbed_shift(unsigned seed) {
  EpgSystem s = ladder_shift();
  std::mt19937 rng(seed);
  auto f = [](const char* e) { return fwd(core_edge(e)); };
  auto r = [](const char* e) { return rev(core_edge(e)); };
  struct Candidate {
    EdgeAddr edge;
    EdgePath loop;  // tight loop based at the image head
  };
  std::vector<Candidate> cands = {
      {core_edge("a-1"), {f("c0"), r("a1"), r("b0"), f("a0")}},   // head w0
      {core_edge("b-1"), {r("b0"), f("a0"), f("c0"), r("a1")}},   // head u1
      {core_edge("c-1"), {r("a1"), r("b0"), f("a0"), f("c0")}},   // head w1
      {core_edge("a0"), {r("a1"), r("b0"), f("a0"), f("c0")}},    // head w1
  };
  int count = 1 + static_cast<int>(rng() % 3);
  std::shuffle(cands.begin(), cands.end(), rng);
  for (int i = 0; i < count; ++i) {
    const Candidate& c = cands[static_cast<size_t>(i)];
    EdgePath loop = (rng() % 2) ? c.loop : reverse_path(c.loop);
    int reps = 1 + static_cast<int>(rng() % 2);
    EdgePath img = s.map.edge_images.at(c.edge);
    for (int k = 0; k < reps; ++k) img.insert(img.end(), loop.begin(), loop.end());
    s.map.edge_images[c.edge] = img;
  }
  return s;
}

inline std::vector<std::string> fixture_names() {
  return {"ladder-shift", "ladder-shift-tau", "fib-ray", "ladder-midpoint"};
}

inline std::optional<EpgSystem> fixture_by_name(const std::string& name) {
  if (name == "ladder-shift") return ladder_shift();
  if (name == "ladder-shift-tau") return ladder_shift_tau();
  if (name == "fib-ray") return fib_ray();
  if (name == "ladder-midpoint") return ladder_midpoint();
  return std::nullopt;
}

}  // namespace epg
