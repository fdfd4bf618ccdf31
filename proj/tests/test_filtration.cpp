#include <gtest/gtest.h>

#include <cmath>

#include "epg/filtration.hpp"
#include "epg/fixtures.hpp"
#include "fate_oracle.hpp"

using namespace epg;

namespace {

std::vector<EdgeAddr> window_and_core_edges(const GraphPresentation& g, int window) {
  std::vector<EdgeAddr> out;
  for (const auto& e : g.core.edges) out.push_back(core_edge(e.id));
  for (const auto& end : g.ends) {
    for (int n = 0; n <= window; ++n) {
      for (const auto& e : end.domain.edges) out.push_back(end_edge(end.id, n, e.id));
    }
  }
  return out;
}

}  // namespace

TEST(Fates, LadderTau) {
  EpgSystem s = ladder_shift_tau();
  auto kinds = classify_ends(s.graph, s.map);
  FateDigraph fd(s.graph, s.map, kinds);
  EXPECT_EQ(fd.window("L"), 3);
  EXPECT_EQ(fd.window("R"), 3);
  EXPECT_TRUE(fd.middle_is_finite());

  // The twisted rung is caught in the middle; every other rung escapes.
  EXPECT_EQ(fd.fate_of(core_edge("a-1")), Fate::Middle);
  EXPECT_EQ(fd.fate_of(core_edge("a0")), Fate::Escaping);
  EXPECT_EQ(fd.fate_of(core_edge("a1")), Fate::Escaping);
  EXPECT_EQ(fd.fate_of(core_edge("b-1")), Fate::Escaping);
  EXPECT_EQ(fd.fate_of(core_edge("c-1")), Fate::Escaping);
  // The left-end window drains backward, arbitrarily deep included.
  EXPECT_EQ(fd.fate_of(end_edge("L", 0, "a")), Fate::BackwardEscaping);
  EXPECT_EQ(fd.fate_of(end_edge("L", 0, "b")), Fate::BackwardEscaping);
  EXPECT_EQ(fd.fate_of(end_edge("L", 1, "b")), Fate::BackwardEscaping);
  EXPECT_EQ(fd.fate_of(end_edge("L", 9, "c")), Fate::BackwardEscaping);
  EXPECT_EQ(fd.fate_of(end_edge("R", 2, "a")), Fate::Escaping);
  EXPECT_EQ(fd.fate_of(end_edge("R", 7, "a")), Fate::Escaping);
}

TEST(Fates, AgreeWithBruteForceOracle) {
  for (const char* name : {"ladder-shift-tau", "ladder-shift", "fib-ray"}) {
    EpgSystem s = *fixture_by_name(name);
    auto kinds = classify_ends(s.graph, s.map);
    FateDigraph fd(s.graph, s.map, kinds);
    epg_test::FateOracle oracle(s.graph, s.map);
    int deep = 0;
    for (const auto& end : s.graph.ends) deep = std::max(deep, fd.window(end.id));
    for (const auto& e : window_and_core_edges(s.graph, deep + 2)) {
      EXPECT_EQ(fd.fate_of(e), oracle.fate(e)) << name << " " << format_edge(e);
    }
  }
}

TEST(Filtration, LadderTauStrata) {
  EpgSystem s = ladder_shift_tau();
  Filtration f = build_filtration(s.graph, s.map);
  ASSERT_EQ(f.strata.size(), 1u);
  ASSERT_EQ(f.strata[0].edges, (std::vector<EdgeAddr>{core_edge("a-1")}));
  ASSERT_EQ(f.strata[0].matrix, (IntMatrix{{2}}));
  EXPECT_TRUE(f.strata[0].exponential);
  EXPECT_NEAR(f.strata[0].radius, 2.0, 1e-9);
  EXPECT_NEAR(f.lambda(), 2.0, 1e-9);
  EXPECT_EQ(f.lambda_vector().radii.size(), 1u);

  EXPECT_EQ(f.backward_window.size(), 9u);   // three left-end copies
  EXPECT_EQ(f.backward_folded.size(), 3u);   // deep left-end classes
  EXPECT_EQ(f.escaping_folded.size(), 3u);   // deep right-end classes
  // 6 untwisted core edges + 9 right-end window edges escape.
  EXPECT_EQ(f.escaping_window.size(), 15u);

  EXPECT_TRUE(check_invariance(s.graph, s.map, f).empty());
}

TEST(Filtration, ShiftHasEmptyMiddle) {
  EpgSystem s = ladder_shift();
  Filtration f = build_filtration(s.graph, s.map);
  EXPECT_TRUE(f.strata.empty());
  EXPECT_EQ(f.lambda(), 0.0);
  EXPECT_TRUE(f.lambda_vector().radii.empty());
  // Everything in the core escapes forward; the whole left end goes backward.
  EXPECT_EQ(f.escaping_window.size(), 7u + 9u);
  EXPECT_EQ(f.backward_window.size(), 9u);
  EXPECT_TRUE(check_invariance(s.graph, s.map, f).empty());
}

TEST(Filtration, FibRayStrataAndOrder) {
  EpgSystem s = fib_ray();
  Filtration f = build_filtration(s.graph, s.map);
  ASSERT_EQ(f.strata.size(), 2u);
  // The stationary first ray edge forms its own non-exponential stratum and
  // sits below the exponential loop stratum.
  EXPECT_EQ(f.strata[0].edges, (std::vector<EdgeAddr>{end_edge("E", 0, "r")}));
  EXPECT_EQ(f.strata[0].matrix, (IntMatrix{{1}}));
  EXPECT_FALSE(f.strata[0].exponential);
  EXPECT_EQ(f.strata[0].radius, 1.0);

  EXPECT_EQ(f.strata[1].edges, (std::vector<EdgeAddr>{core_edge("p"), core_edge("q")}));
  EXPECT_EQ(f.strata[1].matrix, (IntMatrix{{1, 1}, {1, 0}}));
  EXPECT_TRUE(f.strata[1].exponential);
  double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  EXPECT_NEAR(f.strata[1].radius, phi, 1e-9);
  EXPECT_NEAR(f.lambda(), phi, 1e-9);

  EXPECT_EQ(f.stratum_of(core_edge("p")), 1);
  EXPECT_EQ(f.stratum_of(end_edge("E", 0, "r")), 0);
  EXPECT_EQ(f.stratum_of(core_edge("zz")), -1);

  EXPECT_TRUE(check_invariance(s.graph, s.map, f).empty());
}

TEST(Filtration, PerturbedShiftsStayConsistent) {
  // Perturbations change the middle but must keep the filtration compatible
  // and agreeing with the brute-force oracle.
  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    EpgSystem s = perturbed_shift(seed);
    ASSERT_NO_THROW(validate_system(s)) << seed;
    Filtration f = build_filtration(s.graph, s.map);
    EXPECT_TRUE(check_invariance(s.graph, s.map, f).empty()) << seed;

    auto kinds = classify_ends(s.graph, s.map);
    FateDigraph fd(s.graph, s.map, kinds);
    epg_test::FateOracle oracle(s.graph, s.map);
    for (const auto& e : window_and_core_edges(s.graph, 4)) {
      EXPECT_EQ(fd.fate_of(e), oracle.fate(e)) << seed << " " << format_edge(e);
    }
  }
}

TEST(Filtration, TransitionCounts) {
  EpgSystem s = ladder_shift_tau();
  std::vector<EdgeAddr> edges = {core_edge("a-1"), core_edge("b-1"), core_edge("b0")};
  IntMatrix m = transition_counts(s.map, edges);
  // f(a-1) crosses a-1 twice, b-1 twice, b0 twice (counting both directions).
  EXPECT_EQ(m[0][0], 2);
  EXPECT_EQ(m[1][0], 2);
  EXPECT_EQ(m[2][0], 2);
  // f(b-1) = b0.
  EXPECT_EQ(m[2][1], 1);
  EXPECT_EQ(m[0][1], 0);
  // f(b0) leaves the set.
  EXPECT_EQ(m[0][2], 0);
  EXPECT_EQ(m[1][2], 0);
  EXPECT_EQ(m[2][2], 0);
}
