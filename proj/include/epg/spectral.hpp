#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "epg/errors.hpp"

namespace epg {

// Dense nonnegative integer matrix; entry (i, j) counts how often the image
// of the j-th edge crosses the i-th edge.
using IntMatrix = std::vector<std::vector<long long>>;

inline constexpr double kSpectralEps = 1e-9;

inline IntMatrix zero_matrix(size_t n) {
  return IntMatrix(n, std::vector<long long>(n, 0));
}

// --- strongly connected components ------------------------------------------

// Iterative Tarjan; components are emitted sinks-first (reverse topological
// order of the condensation), each with its node indices sorted.
inline std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;
  struct Frame {
    int v;
    size_t child;
  };
  for (int start = 0; start < n; ++start) {
    if (index[start] != -1) continue;
    std::vector<Frame> frames{{start, 0}};
    index[start] = low[start] = counter++;
    stack.push_back(start);
    on_stack[start] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back(Frame{w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp.push_back(w);
            if (w == f.v) break;
          }
          std::sort(comp.begin(), comp.end());
          comps.push_back(std::move(comp));
        }
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        }
      }
    }
  }
  return comps;
}

// --- spectral radius ---------------------------------------------------------

inline bool is_permutation_matrix(const IntMatrix& m) {
  size_t n = m.size();
  if (n == 0) return false;
  std::vector<int> col_count(n, 0);
  for (size_t i = 0; i < n; ++i) {
    int row_count = 0;
    for (size_t j = 0; j < n; ++j) {
      if (m[i][j] < 0) throw Error(ErrorKind::InvalidInput, "negative matrix entry");
      if (m[i][j] == 0) continue;
      if (m[i][j] > 1) return false;
      ++row_count;
      ++col_count[j];
    }
    if (row_count != 1) return false;
  }
  for (size_t j = 0; j < n; ++j) {
    if (col_count[j] != 1) return false;
  }
  return true;
}

inline bool has_directed_cycle(const IntMatrix& m) {
  size_t n = m.size();
  std::vector<std::vector<int>> adj(n);
  for (size_t j = 0; j < n; ++j) {
    for (size_t i = 0; i < n; ++i) {
      if (m[i][j] > 0) adj[j].push_back(static_cast<int>(i));
    }
  }
  for (const auto& comp : strongly_connected_components(adj)) {
    if (comp.size() > 1) return true;
    if (m[static_cast<size_t>(comp[0])][static_cast<size_t>(comp[0])] > 0) return true;
  }
  return false;
}

struct SpectralResult {
  double radius = 0.0;
  std::vector<double> eigenvector;  // nonnegative, sup-norm 1
};

namespace spectral_detail {

// Power iteration with Collatz–Wielandt brackets on B = m + I.  Requires `m`
// irreducible (one strongly connected block, possibly a self-looped
// singleton): then B is primitive, the iterate stays strictly positive, and
// min_i (Bv)_i/v_i <= radius(B) <= max_i (Bv)_i/v_i holds at every step, so
// the stopping test carries a guaranteed error bound rather than detecting a
// possibly transient plateau of the norm sequence.
inline double irreducible_radius(const IntMatrix& m, double rel_tol, int max_iter,
                                 std::vector<double>* fixed_vector) {
  size_t n = m.size();
  std::vector<double> v(n, 1.0), w(n, 0.0);
  for (int it = 0; it < max_iter; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0, norm = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double acc = v[i];  // the +I part
      for (size_t j = 0; j < n; ++j) {
        if (m[i][j]) acc += static_cast<double>(m[i][j]) * v[j];
      }
      w[i] = acc;
      double ratio = acc / v[i];
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      norm = std::max(norm, acc);
    }
    for (size_t i = 0; i < n; ++i) w[i] /= norm;
    v.swap(w);
    if (hi - lo <= rel_tol * hi) {
      if (fixed_vector) *fixed_vector = v;
      return (hi + lo) / 2.0 - 1.0;
    }
  }
  throw Error(ErrorKind::CapExceeded, "power iteration did not converge");
}

}  // namespace spectral_detail

// Spectral radius of a nonnegative integer matrix, with the eigenvector of
// the dominant part.  Permutation matrices and nilpotent matrices are
// special-cased so that radii of exactly 1 and 0 come out exactly.  A
// reducible matrix is split into strongly connected blocks first — its radius
// is the largest block radius, while iterating the whole matrix can converge
// harmonically (or pass through a long transient plateau) when equal-radius
// blocks feed one another.
inline SpectralResult spectral_radius(const IntMatrix& m,
                                      double rel_tol = 1e-12,
                                      int max_iter = 200000) {
  size_t n = m.size();
  SpectralResult res;
  if (n == 0) return res;
  res.eigenvector.assign(n, 1.0);
  if (!has_directed_cycle(m)) {
    res.radius = 0.0;
    return res;
  }
  if (is_permutation_matrix(m)) {
    res.radius = 1.0;
    return res;
  }
  std::vector<std::vector<int>> adj(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (m[i][j] > 0) adj[i].push_back(static_cast<int>(j));
    }
  }
  std::vector<std::vector<int>> comps = strongly_connected_components(adj);
  if (comps.size() == 1 && comps[0].size() == n) {
    res.radius = spectral_detail::irreducible_radius(m, rel_tol, max_iter, &res.eigenvector);
    return res;
  }
  res.eigenvector.assign(n, 0.0);
  std::vector<int> best_comp;
  std::vector<double> best_vec;
  for (const auto& comp : comps) {
    size_t c0 = static_cast<size_t>(comp[0]);
    if (comp.size() == 1 && m[c0][c0] == 0) continue;  // acyclic singleton
    IntMatrix sub(comp.size(), std::vector<long long>(comp.size(), 0));
    for (size_t a = 0; a < comp.size(); ++a) {
      for (size_t b = 0; b < comp.size(); ++b) {
        sub[a][b] = m[static_cast<size_t>(comp[a])][static_cast<size_t>(comp[b])];
      }
    }
    std::vector<double> vec;
    double r = spectral_detail::irreducible_radius(sub, rel_tol, max_iter, &vec);
    if (r > res.radius) {
      res.radius = r;
      best_comp = comp;
      best_vec = std::move(vec);
    }
  }
  for (size_t a = 0; a < best_comp.size(); ++a) {
    res.eigenvector[static_cast<size_t>(best_comp[a])] = best_vec[a];
  }
  return res;
}

// An irreducible stratum grows exponentially exactly when its radius exceeds
// one; for integer matrices the only radius-one irreducible blocks are
// cyclic permutations, which the radius computation reports exactly.
inline bool is_exponential_radius(double radius) {
  return radius > 1.0 + kSpectralEps;
}

// --- ordered spectra ----------------------------------------------------------

// The multiset of exponential stratum radii, sorted descending.  Comparison
// is lexicographic with an implicit tail of ones, so losing an exponential
// stratum counts as a strict decrease and vectors of different lengths are
// comparable.
struct LambdaVector {
  std::vector<double> radii;

  static LambdaVector of(std::vector<double> values) {
    std::sort(values.begin(), values.end(), std::greater<double>());
    return LambdaVector{std::move(values)};
  }
};

inline int compare_lambda(const LambdaVector& a, const LambdaVector& b,
                          double eps = kSpectralEps) {
  size_t n = std::max(a.radii.size(), b.radii.size());
  for (size_t i = 0; i < n; ++i) {
    double x = i < a.radii.size() ? a.radii[i] : 1.0;
    double y = i < b.radii.size() ? b.radii[i] : 1.0;
    if (x < y - eps) return -1;
    if (x > y + eps) return 1;
  }
  return 0;
}

inline std::string format_lambda_vector(const LambdaVector& v) {
  std::string out = "[";
  char buf[64];
  for (size_t i = 0; i < v.radii.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.9f", v.radii[i]);
    out += buf;
  }
  out += "]";
  return out;
}

}  // namespace epg
