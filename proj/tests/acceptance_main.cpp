// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Tolerances are pinned here, next to each check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "epg/dynamics.hpp"
#include "epg/fixtures.hpp"
#include "epg/traintrack.hpp"
#include "fate_oracle.hpp"

namespace {

using namespace epg;

constexpr double kLogTwo = 0.6931471805599453;
constexpr double kLogPhi = 0.4812118250596035;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", x);
  return buf;
}

// Random cyclically tight core loop: a closed random walk, cyclically
// tightened, retried until nontrivial.
EdgePath random_core_loop(const FiniteGraph& core, std::mt19937& rng) {
  std::map<std::string, std::vector<OrientedEdge>> star;
  for (const auto& e : core.edges) {
    star[e.tail].push_back(fwd(core_edge(e.id)));
    star[e.head].push_back(rev(core_edge(e.id)));
  }
  std::vector<std::string> starts;
  for (const auto& [v, opts] : star) starts.push_back(v);
  auto step_head = [&](const OrientedEdge& o) {
    const EdgeRec& e = core.edge(o.edge.local);
    return o.reversed ? e.tail : e.head;
  };
  for (int attempt = 0; attempt < 400; ++attempt) {
    std::string start = starts[rng() % starts.size()];
    std::string cur = start;
    EdgePath walk;
    for (int n = 0; n < 40; ++n) {
      const auto& opts = star[cur];
      std::vector<OrientedEdge> allowed;
      for (const auto& o : opts) {
        if (!walk.empty() && o.edge == walk.back().edge && o.reversed != walk.back().reversed) {
          continue;  // no immediate backtracking when avoidable
        }
        allowed.push_back(o);
      }
      if (allowed.empty()) allowed = opts;
      const OrientedEdge& o = allowed[rng() % allowed.size()];
      walk.push_back(o);
      cur = step_head(o);
      if (cur == start && walk.size() >= 2) break;
    }
    if (cur != start) continue;
    EdgePath tight = cyclic_tighten(walk);
    if (!tight.empty()) return tight;
  }
  throw Error(ErrorKind::Internal, "loop sampler failed to close a walk");
}

bool stamps_monotone(const std::vector<MoveRecord>& log) {
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& rec : log) {
    if (rec.lambda_after < 0.0) continue;
    if (rec.lambda_after > prev + 1e-9) return false;
    prev = rec.lambda_after;
  }
  return true;
}

// A loop image must be a closed edge path of the target presentation.
bool closed_valid_loop(const GraphPresentation& g, const EdgePath& p) {
  if (p.empty()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const OrientedEdge& cur = p[i];
    const OrientedEdge& nxt = p[(i + 1) % p.size()];
    if (!(oriented_head(g, cur) == oriented_tail(g, nxt))) return false;
  }
  return true;
}

int failures = 0;

template <typename Fn>
void criterion(const std::string& name, Fn body) {
  bool ok = false;
  std::string detail;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  std::printf("%s - %s\n", ok ? "PASS" : "FAIL", name.c_str());
  if (!ok) {
    ++failures;
    if (!detail.empty()) std::printf("       %s\n", detail.c_str());
  }
  std::fflush(stdout);
}

struct PipelineRun {
  TrackedMap tm;
  RttResult result;
};

std::optional<PipelineRun> run_pipeline(EpgSystem sys) {
  TrackedMap tm = TrackedMap::start(std::move(sys));
  RttResult r = to_relative_train_track(tm);
  return PipelineRun{std::move(tm), std::move(r)};
}

}  // namespace

int main() {
  std::optional<PipelineRun> ladder, fib, midpoint;

  criterion("1. ladder pipeline: one single-edge stretch stratum, factor 2, verified, < 5 s",
            [&](std::string& d) {
              auto t0 = std::chrono::steady_clock::now();
              ladder = run_pipeline(ladder_shift_tau());
              double dt = seconds_since(t0);
              const RttResult& r = ladder->result;
              int expo = 0;
              std::size_t edges = 0;
              for (const auto& st : r.filtration.strata) {
                if (st.exponential) {
                  ++expo;
                  edges = st.edges.size();
                }
              }
              double lam = r.filtration.lambda();
              bool ok = dt < 5.0 && !r.cap_exceeded && r.report.pass && expo == 1 &&
                        edges == 1 && std::fabs(lam - 2.0) <= 1e-9;
              if (!ok) {
                std::ostringstream os;
                os << "time " << fmt(dt) << "s, pass " << r.report.pass << ", stretch strata "
                   << expo << ", stratum edges " << edges << ", lambda " << fmt(lam);
                for (const auto& f : r.report.failures) os << "; " << f;
                d = os.str();
              }
              return ok;
            });

  criterion("2. raw ladder fails verification with witness core:a-1", [&](std::string& d) {
    EpgSystem raw = ladder_shift_tau();
    Filtration f = build_filtration(raw.graph, raw.map);
    RttReport rep = verify_rtt(raw, f);
    bool witness = false;
    for (const auto& msg : rep.failures) {
      if (msg.find("core:a-1") != std::string::npos) witness = true;
    }
    if (rep.pass) d = "verification unexpectedly passed";
    if (!witness) d = "no failure mentions core:a-1";
    return !rep.pass && witness;
  });

  criterion("3. move logs never raise the stretch spectrum (ladder, ray, 50 perturbations)",
            [&](std::string& d) {
              auto check_run = [&](EpgSystem sys, const std::string& label,
                                   std::optional<PipelineRun>* keep) {
                LambdaVector before = build_filtration(sys.graph, sys.map).lambda_vector();
                auto t0 = std::chrono::steady_clock::now();
                std::optional<PipelineRun> run = run_pipeline(std::move(sys));
                double dt = seconds_since(t0);
                std::string why;
                if (dt >= 10.0) why = "took " + fmt(dt) + "s";
                if (run->result.cap_exceeded) why = "cap exceeded";
                if (!stamps_monotone(run->tm.log)) why = "log stamps increased";
                if (compare_lambda(run->result.filtration.lambda_vector(), before) > 0) {
                  why = "final spectrum above the initial one";
                }
                if (keep) *keep = std::move(run);
                if (!why.empty()) return label + ": " + why;
                return std::string();
              };
              std::string why = check_run(ladder_shift_tau(), "ladder", nullptr);
              if (why.empty()) why = check_run(fib_ray(), "ray", &fib);
              for (unsigned seed = 1; seed <= 50 && why.empty(); ++seed) {
                why = check_run(perturbed_shift(seed), "perturbed-" + std::to_string(seed),
                                nullptr);
              }
              d = why;
              return why.empty();
            });

  criterion("4. spectral suite: permutations, golden mean, deletion monotonicity",
            [&](std::string& d) {
              std::mt19937 rng(4);
              for (std::size_t n = 1; n <= 8; ++n) {
                std::vector<std::size_t> perm(n);
                for (std::size_t i = 0; i < n; ++i) perm[i] = i;
                for (int variant = 0; variant < 3; ++variant) {
                  IntMatrix m = zero_matrix(n);
                  for (std::size_t i = 0; i < n; ++i) m[i][perm[i]] = 1;
                  double r = spectral_radius(m).radius;
                  if (r != 1.0) {
                    d = "permutation radius " + fmt(r) + " at size " + std::to_string(n);
                    return false;
                  }
                  // next variant: cycle, then a random shuffle
                  if (variant == 0) {
                    for (std::size_t i = 0; i < n; ++i) perm[i] = (i + 1) % n;
                  } else {
                    std::shuffle(perm.begin(), perm.end(), rng);
                  }
                }
              }
              double phi = spectral_radius(IntMatrix{{1, 1}, {1, 0}}).radius;
              if (std::fabs(phi - 1.618033989) > 1e-9) {
                d = "golden mean radius " + fmt(phi);
                return false;
              }
              for (int t = 0; t < 100; ++t) {
                std::size_t n = 2 + static_cast<std::size_t>(t) % 7;
                IntMatrix m = zero_matrix(n);
                for (std::size_t i = 0; i < n; ++i) m[i][(i + 1) % n] = 1;  // irreducible
                std::size_t extras = 1 + rng() % n;
                for (std::size_t k = 0; k < extras; ++k) {
                  m[rng() % n][rng() % n] += 1 + rng() % 2;
                }
                double full = spectral_radius(m).radius;
                if (full <= 1.0 + 1e-9) {
                  d = "random matrix radius not above 1";
                  return false;
                }
                for (std::size_t del = 0; del < n; ++del) {
                  IntMatrix sub = zero_matrix(n - 1);
                  for (std::size_t i = 0, si = 0; i < n; ++i) {
                    if (i == del) continue;
                    for (std::size_t j = 0, sj = 0; j < n; ++j) {
                      if (j == del) continue;
                      sub[si][sj] = m[i][j];
                      ++sj;
                    }
                    ++si;
                  }
                  double r = spectral_radius(sub).radius;
                  if (!(r < full - 1e-9)) {
                    d = "deleting index " + std::to_string(del) + " kept radius " + fmt(r) +
                        " vs " + fmt(full);
                    return false;
                  }
                }
              }
              return true;
            });

  criterion("5. growth: witness near log 2 (n=24), ray loop near log phi (n=25), shift escapes",
            [&](std::string& d) {
              if (!ladder) {
                d = "ladder pipeline unavailable";
                return false;
              }
              auto witness = supremum_witness(ladder->tm.sys, ladder->result.filtration);
              if (!witness) {
                d = "no witness loop on the tidied ladder";
                return false;
              }
              double ew = growth_exponent(ladder->tm.sys, *witness, 24);
              if (std::fabs(ew - kLogTwo) > 0.05) {
                d = "witness exponent " + fmt(ew);
                return false;
              }
              EpgSystem f = fib_ray();
              double ep = growth_exponent(f, {fwd(core_edge("p"))}, 25);
              if (std::fabs(ep - kLogPhi) > 0.02) {
                d = "ray loop exponent " + fmt(ep);
                return false;
              }
              EpgSystem s = ladder_shift();
              std::mt19937 rng(5);
              for (int i = 0; i < 20; ++i) {
                EdgePath loop = random_core_loop(s.graph.core, rng);
                if (!escapes(s, loop, 15)) {
                  d = "loop " + format_path(loop) + " failed to escape";
                  return false;
                }
              }
              return true;
            });

  criterion("6. factor 2 and entropy log 2 from both the ladder and its subdivision",
            [&](std::string& d) {
              if (!ladder) {
                d = "ladder pipeline unavailable";
                return false;
              }
              midpoint = run_pipeline(ladder_midpoint());
              for (const PipelineRun* run : {&*ladder, &*midpoint}) {
                double lam = run->result.filtration.lambda();
                double ent = entropy(run->result.filtration);
                if (run->result.cap_exceeded || std::fabs(lam - 2.0) > 1e-9 ||
                    std::fabs(ent - kLogTwo) > 1e-9) {
                  d = "lambda " + fmt(lam) + ", entropy " + fmt(ent);
                  return false;
                }
              }
              return true;
            });

  criterion("7. correspondence maps are bounded and respect loop lengths", [&](std::string& d) {
    struct Case {
      const PipelineRun* run;
      EpgSystem original;
      const char* label;
    };
    if (!ladder || !fib || !midpoint) {
      d = "a pipeline run is unavailable";
      return false;
    }
    std::vector<Case> cases;
    cases.push_back({&*ladder, ladder_shift_tau(), "ladder"});
    cases.push_back({&*fib, fib_ray(), "ray"});
    cases.push_back({&*midpoint, ladder_midpoint(), "midpoint"});
    std::mt19937 rng(7);
    for (const auto& c : cases) {
      std::size_t bound = corr_bound(c.run->tm.forward);
      if (bound < 1) {
        d = std::string(c.label) + ": empty edge-to-path bound";
        return false;
      }
      for (int i = 0; i < 20; ++i) {
        EdgePath loop = random_core_loop(c.original.graph.core, rng);
        EdgePath image = apply_path(c.run->tm.forward, loop);
        if (!closed_valid_loop(c.run->tm.sys.graph, image)) {
          d = std::string(c.label) + ": image of " + format_path(loop) +
              " is not a closed path";
          return false;
        }
        if (bounded_length(image) > bound * bounded_length(loop)) {
          d = std::string(c.label) + ": image of " + format_path(loop) + " has length " +
              std::to_string(bounded_length(image)) + " > " + std::to_string(bound) + " * " +
              std::to_string(bounded_length(loop));
          return false;
        }
      }
    }
    return true;
  });

  criterion("8. folded-digraph fates agree with brute force on all fixtures and 50 perturbations",
            [&](std::string& d) {
              std::vector<EpgSystem> systems;
              for (const char* name : {"ladder-shift-tau", "ladder-shift", "fib-ray"}) {
                systems.push_back(*fixture_by_name(name));
              }
              for (unsigned seed = 1; seed <= 50; ++seed) {
                systems.push_back(perturbed_shift(seed));
              }
              for (const auto& s : systems) {
                auto kinds = classify_ends(s.graph, s.map);
                FateDigraph fd(s.graph, s.map, kinds);
                epg_test::FateOracle oracle(s.graph, s.map);
                int deep = 0;
                for (const auto& end : s.graph.ends) deep = std::max(deep, fd.window(end.id));
                std::vector<EdgeAddr> edges;
                for (const auto& e : s.graph.core.edges) edges.push_back(core_edge(e.id));
                for (const auto& end : s.graph.ends) {
                  for (int n = 0; n <= deep + 2; ++n) {
                    for (const auto& e : end.domain.edges) {
                      edges.push_back(end_edge(end.id, n, e.id));
                    }
                  }
                }
                for (const auto& e : edges) {
                  if (fd.fate_of(e) != oracle.fate(e)) {
                    d = "disagreement at " + format_edge(e);
                    return false;
                  }
                }
              }
              return true;
            });

  criterion("9. sampled loop exponents stay below log lambda + 0.05 on tidied fixtures",
            [&](std::string& d) {
              if (!ladder || !fib) {
                d = "a pipeline run is unavailable";
                return false;
              }
              struct Case {
                const PipelineRun* run;
                int iters;
              };
              std::mt19937 rng(9);
              for (const Case& c : {Case{&*ladder, 16}, Case{&*fib, 20}}) {
                double bound = std::log(c.run->result.filtration.lambda()) + 0.05;
                for (int i = 0; i < 20; ++i) {
                  EdgePath loop = random_core_loop(c.run->tm.sys.graph.core, rng);
                  double e = growth_exponent(c.run->tm.sys, loop, c.iters);
                  if (e > bound) {
                    d = "loop " + format_path(loop) + " exponent " + fmt(e) + " above " +
                        fmt(bound);
                    return false;
                  }
                }
              }
              return true;
            });

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
