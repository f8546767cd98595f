#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vident/errors.hpp"
#include "vident/identify.hpp"
#include "vident/io.hpp"
#include "vident/linear_model.hpp"

// Convex ensembling of identifier scores. Weights live on the probability
// simplex and are fitted to maximize exact-match accuracy on dev cases.

namespace vident {

struct EnsembleWeights {
  std::vector<double> alphas;  // one per member, nonnegative, sums to 1
};

inline void check_simplex(const EnsembleWeights& w) {
  double sum = 0.0;
  for (double a : w.alphas) {
    if (a < -1e-9) throw DataError("ensemble weight is negative");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("ensemble weights do not sum to 1");
}

inline TokenScores combine_scores(const std::vector<TokenScores>& members,
                                  const EnsembleWeights& weights) {
  if (members.size() != weights.alphas.size())
    throw InternalError("combine_scores: member/weight count mismatch");
  check_simplex(weights);
  TokenScores out;
  if (members.empty()) return out;
  const size_t n = members[0].probs.size();
  out.probs.assign(n, 0.0);
  for (size_t i = 0; i < members.size(); ++i) {
    if (members[i].probs.size() != n)
      throw InternalError("combine_scores: member score lengths differ");
    for (size_t j = 0; j < n; ++j) out.probs[j] += weights.alphas[i] * members[i].probs[j];
  }
  return out;
}

// One dev case for weight fitting: an m x n score matrix plus the mask of
// placeholders holding the resolved value.
struct FitCase {
  std::vector<std::vector<double>> member_scores;
  std::vector<char> correct;
};

namespace detail {

// Free coordinates: the first m-1 alphas; the last is 1 minus their sum.
inline std::vector<double> lift_point(const std::vector<double>& u) {
  std::vector<double> a(u.size() + 1);
  double s = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    a[i] = u[i];
    s += u[i];
  }
  a[u.size()] = 1.0 - s;
  for (double& v : a)
    if (v < 0.0 && v > -1e-12) v = 0.0;
  return a;
}

inline std::vector<double> lift_direction(const std::vector<double>& d) {
  std::vector<double> f(d.size() + 1);
  double s = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    f[i] = d[i];
    s += d[i];
  }
  f[d.size()] = -s;
  return f;
}

inline bool case_correct_at(const FitCase& c, const std::vector<double>& alpha) {
  const size_t n = c.correct.size();
  size_t best = 0;
  double best_score = 0.0;
  for (size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (size_t i = 0; i < alpha.size(); ++i) s += alpha[i] * c.member_scores[i][j];
    if (j == 0 || s > best_score) {
      best = j;
      best_score = s;
    }
  }
  return c.correct[best] != 0;
}

inline int count_correct(const std::vector<FitCase>& cases, const std::vector<double>& alpha) {
  int count = 0;
  for (const auto& c : cases) count += case_correct_at(c, alpha) ? 1 : 0;
  return count;
}

// Keeps a free-coordinate point inside the simplex against float drift.
inline void sanitize(std::vector<double>& u) {
  double s = 0.0;
  for (double& v : u) {
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    s += v;
  }
  if (s > 1.0)
    for (double& v : u) v /= s;
}

struct LineResult {
  double t = 0.0;
  int count = 0;
};

// Exact maximization of the piecewise-constant accuracy along u + t*d.
// Each case's argmax changes only where two member-score lines cross, so
// the accuracy is constant between crossings; we enumerate them all and
// sweep once, updating only the case that generated each breakpoint.
inline LineResult line_sweep(const std::vector<FitCase>& cases, const std::vector<double>& u,
                             const std::vector<double>& d) {
  std::vector<double> a0 = lift_point(u);
  std::vector<double> df = lift_direction(d);

  double t_lo = 0.0, t_hi = 0.0;
  bool lo_set = false, hi_set = false;
  for (size_t i = 0; i < a0.size(); ++i) {
    if (df[i] > 1e-15) {
      double b = -a0[i] / df[i];
      if (!lo_set || b > t_lo) t_lo = b, lo_set = true;
    } else if (df[i] < -1e-15) {
      double b = -a0[i] / df[i];
      if (!hi_set || b < t_hi) t_hi = b, hi_set = true;
    }
  }
  if (!lo_set || !hi_set || t_hi - t_lo < 1e-12) return {0.0, count_correct(cases, a0)};

  // Per-case affine scores: P_j(t) = A_j + t * B_j.
  struct CaseLines {
    std::vector<double> A, B;
  };
  std::vector<CaseLines> lines(cases.size());
  struct Breakpoint {
    double t;
    size_t case_idx;
  };
  std::vector<Breakpoint> bps;
  for (size_t ci = 0; ci < cases.size(); ++ci) {
    const FitCase& c = cases[ci];
    const size_t n = c.correct.size();
    auto& ln = lines[ci];
    ln.A.resize(n);
    ln.B.resize(n);
    for (size_t j = 0; j < n; ++j) {
      double aj = 0.0, bj = 0.0;
      for (size_t i = 0; i < a0.size(); ++i) {
        aj += a0[i] * c.member_scores[i][j];
        bj += df[i] * c.member_scores[i][j];
      }
      ln.A[j] = aj;
      ln.B[j] = bj;
    }
    for (size_t j = 0; j < n; ++j)
      for (size_t k = j + 1; k < n; ++k) {
        double db = ln.B[j] - ln.B[k];
        if (std::abs(db) < 1e-15) continue;
        double t = (ln.A[k] - ln.A[j]) / db;
        if (t > t_lo && t < t_hi) bps.push_back({t, ci});
      }
  }
  std::sort(bps.begin(), bps.end(), [](const Breakpoint& x, const Breakpoint& y) {
    return x.t != y.t ? x.t < y.t : x.case_idx < y.case_idx;
  });

  auto correct_at = [&](size_t ci, double t) {
    const auto& ln = lines[ci];
    size_t best = 0;
    double best_score = 0.0;
    for (size_t j = 0; j < ln.A.size(); ++j) {
      double s = ln.A[j] + t * ln.B[j];
      if (j == 0 || s > best_score) {
        best = j;
        best_score = s;
      }
    }
    return cases[ci].correct[best] != 0;
  };

  // Score each open interval at its midpoint; prefer t = 0 when its own
  // interval ties for the best count so converged points stay put.
  double first_edge = bps.empty() ? t_hi : bps[0].t;
  double mid = (t_lo + first_edge) / 2.0;
  int count = 0;
  std::vector<char> ok(cases.size());
  for (size_t ci = 0; ci < cases.size(); ++ci) {
    ok[ci] = correct_at(ci, mid) ? 1 : 0;
    count += ok[ci];
  }
  auto interval_rep = [&](double lo, double hi) {
    return (lo < 0.0 && hi > 0.0) ? 0.0 : (lo + hi) / 2.0;
  };
  LineResult best{interval_rep(t_lo, first_edge), count};
  auto better = [&](double t, int c) {
    if (c != best.count) return c > best.count;
    double at = std::abs(t), ab = std::abs(best.t);
    if (at != ab) return at < ab;
    return t < best.t;
  };

  size_t k = 0;
  while (k < bps.size()) {
    double edge = bps[k].t;
    size_t k_end = k;
    while (k_end < bps.size() && bps[k_end].t == edge) ++k_end;
    double next_edge = k_end < bps.size() ? bps[k_end].t : t_hi;
    if (next_edge > edge) {
      double m = (edge + next_edge) / 2.0;
      for (size_t q = k; q < k_end; ++q) {
        size_t ci = bps[q].case_idx;
        char now = correct_at(ci, m) ? 1 : 0;
        count += now - ok[ci];
        ok[ci] = now;
      }
      double rep = interval_rep(edge, next_edge);
      if (better(rep, count)) best = {rep, count};
    }
    k = k_end;
  }
  return best;
}

struct PowellResult {
  std::vector<double> u;
  int count = 0;
};

inline PowellResult powell_maximize(const std::vector<FitCase>& cases, size_t m,
                                    std::vector<double> u) {
  sanitize(u);
  PowellResult res;
  res.count = count_correct(cases, lift_point(u));
  if (m < 2) {
    res.u = u;
    return res;
  }
  const size_t dim = m - 1;
  std::vector<std::vector<double>> dirs(dim, std::vector<double>(dim, 0.0));
  for (size_t i = 0; i < dim; ++i) dirs[i][i] = 1.0;
  // Diagonal sweeps help hop plateaus the axis sweeps cannot see.
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = i + 1; j < dim; ++j) {
      std::vector<double> d(dim, 0.0);
      d[i] = inv_sqrt2;
      d[j] = inv_sqrt2;
      dirs.push_back(d);
      d[j] = -inv_sqrt2;
      dirs.push_back(d);
    }

  for (int sweep = 0; sweep < 20; ++sweep) {
    int start_count = res.count;
    std::vector<double> u_before = u;
    size_t best_dir = dirs.size();
    int best_gain = 0;
    for (size_t di = 0; di < dirs.size(); ++di) {
      LineResult lr = line_sweep(cases, u, dirs[di]);
      if (lr.count > res.count) {
        if (lr.count - res.count > best_gain) {
          best_gain = lr.count - res.count;
          best_dir = di;
        }
        for (size_t i = 0; i < dim; ++i) u[i] += lr.t * dirs[di][i];
        sanitize(u);
        res.count = lr.count;
      }
    }
    if (res.count == start_count) break;
    std::vector<double> disp(dim);
    double norm = 0.0;
    for (size_t i = 0; i < dim; ++i) {
      disp[i] = u[i] - u_before[i];
      norm += disp[i] * disp[i];
    }
    if (norm > 1e-18) {
      LineResult lr = line_sweep(cases, u, disp);
      if (lr.count > res.count) {
        for (size_t i = 0; i < dim; ++i) u[i] += lr.t * disp[i];
        sanitize(u);
        res.count = lr.count;
      }
      if (best_dir < dirs.size()) {
        double inv = 1.0 / std::sqrt(norm);
        for (size_t i = 0; i < dim; ++i) dirs[best_dir][i] = disp[i] * inv;
      }
    }
  }
  res.u = u;
  return res;
}

// Coarse feasible grid over free coordinates with the given step; used as
// extra multistart seeds.
inline void grid_points(size_t dim, double step, std::vector<double>& cur,
                        std::vector<std::vector<double>>& out) {
  if (cur.size() == dim) {
    out.push_back(cur);
    return;
  }
  double used = 0.0;
  for (double v : cur) used += v;
  for (double v = 0.0; v <= 1.0 - used + 1e-12; v += step) {
    cur.push_back(std::min(v, 1.0 - used));
    grid_points(dim, step, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

struct FitOutcome {
  EnsembleWeights weights;
  double accuracy = 0.0;  // exact-match rate on the fit cases
  bool defaulted = false;  // no cases; weights fell back to uniform
};

// Maximizes dev exact match over the simplex: Powell direction-set search
// with exact line sweeps from several starts, with the vertices themselves
// kept as candidates so no single member can beat the fitted mix. Ties go
// to the centroid-started search result.
inline FitOutcome fit_weights_for_cases(const std::vector<FitCase>& cases, size_t m) {
  if (m == 0) throw InternalError("fit_weights_for_cases: no members");
  FitOutcome out;
  if (cases.empty()) {
    out.weights.alphas.assign(m, 1.0 / static_cast<double>(m));
    out.defaulted = true;
    return out;
  }
  for (const auto& c : cases) {
    if (c.member_scores.size() != m) throw InternalError("fit case has wrong member count");
    for (const auto& row : c.member_scores)
      if (row.size() != c.correct.size()) throw InternalError("fit case has ragged scores");
  }
  const size_t dim = m - 1;
  std::vector<std::vector<double>> starts;
  starts.emplace_back(dim, 1.0 / static_cast<double>(m));  // centroid
  std::vector<std::vector<double>> vertices;
  for (size_t i = 0; i < m; ++i) {
    std::vector<double> v(dim, 0.0);
    if (i < dim) v[i] = 1.0;
    vertices.push_back(v);
  }
  for (const auto& v : vertices) starts.push_back(v);
  for (size_t a = 0; a < m; ++a)
    for (size_t b = a + 1; b < m; ++b) {
      std::vector<double> mid(dim);
      for (size_t i = 0; i < dim; ++i) mid[i] = (vertices[a][i] + vertices[b][i]) / 2.0;
      starts.push_back(mid);
    }
  if (dim >= 2) {
    // Grid-seeded starts. The objective is piecewise constant with basins
    // that can be far below grid resolution, so for three members the seed
    // grid matches the 0.01 reference resolution outright; beyond that the
    // quadratic blowup forces a coarser seed.
    const double step = dim == 2 ? 0.01 : 0.1;
    std::vector<std::vector<double>> grid;
    std::vector<double> cur;
    detail::grid_points(dim, step, cur, grid);
    std::vector<std::pair<int, size_t>> ranked;
    for (size_t g = 0; g < grid.size(); ++g)
      ranked.emplace_back(-detail::count_correct(cases, detail::lift_point(grid[g])), g);
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    for (size_t k = 0; k < std::min<size_t>(8, ranked.size()); ++k)
      starts.push_back(grid[ranked[k].second]);
  }

  detail::PowellResult best;
  bool have = false;
  for (const auto& s : starts) {
    detail::PowellResult r = detail::powell_maximize(cases, m, s);
    if (!have || r.count > best.count) {
      best = r;
      have = true;
    }
  }
  // Bare vertices compete as final candidates too (argmax ties inside the
  // sweep can differ at exact vertex points).
  for (const auto& v : vertices) {
    int c = detail::count_correct(cases, detail::lift_point(v));
    if (c > best.count) best = {v, c};
  }

  std::vector<double> alpha = detail::lift_point(best.u);
  double sum = 0.0;
  for (double a : alpha) sum += a;
  if (sum <= 0.0) throw InternalError("fit produced a degenerate weight vector");
  for (double& a : alpha) a /= sum;
  out.weights.alphas = alpha;
  out.accuracy = static_cast<double>(best.count) / static_cast<double>(cases.size());
  check_simplex(out.weights);
  return out;
}

struct SlotWeights {
  std::string prompt_id;  // "*" for a corpus-level fit
  std::string slot_id;
  EnsembleWeights weights;
  double dev_accuracy = 0.0;
  bool defaulted = false;
};

struct FittedEnsemble {
  std::vector<std::string> member_ids;
  std::vector<SlotWeights> slots;

  const SlotWeights& find(const std::string& prompt_id, const std::string& slot_id) const {
    for (const auto& s : slots)
      if (s.prompt_id == prompt_id && s.slot_id == slot_id) return s;
    for (const auto& s : slots)
      if (s.prompt_id == "*" && s.slot_id == "*") return s;
    throw DataError("no ensemble weights for prompt '" + prompt_id + "' slot '" + slot_id + "'");
  }
};

inline constexpr std::string_view kEnsembleHeader = "#vident-ensemble v1";

inline std::string serialize_ensemble(const FittedEnsemble& fitted) {
  std::string out(kEnsembleHeader);
  out += '\n';
  out += "prompt_id,slot_id,model_id,alpha,dev_accuracy\n";
  for (const auto& s : fitted.slots) {
    if (s.weights.alphas.size() != fitted.member_ids.size())
      throw InternalError("ensemble slot has wrong member count");
    for (size_t i = 0; i < fitted.member_ids.size(); ++i) {
      out += s.prompt_id + ',' + s.slot_id + ',' + fitted.member_ids[i] + ',' +
             detail::double_text(s.weights.alphas[i]) + ',' +
             detail::double_text(s.dev_accuracy) + '\n';
    }
  }
  return out;
}

inline FittedEnsemble parse_ensemble(const std::string& text, const std::string& path) {
  auto lines = split_lines(text);
  if (lines.size() < 2 || lines[0] != kEnsembleHeader)
    throw DataError(path + ": not an ensemble weight file");
  if (lines[1] != "prompt_id,slot_id,model_id,alpha,dev_accuracy")
    throw DataError(path + ": bad ensemble column header");
  FittedEnsemble out;
  for (size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path + ":" + std::to_string(i + 1);
    std::vector<std::string> f;
    size_t start = 0;
    while (true) {
      size_t comma = lines[i].find(',', start);
      f.push_back(lines[i].substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 5) throw DataError(where + ": expected 5 fields");
    if (std::find(out.member_ids.begin(), out.member_ids.end(), f[2]) == out.member_ids.end())
      out.member_ids.push_back(f[2]);
    SlotWeights* slot = nullptr;
    for (auto& s : out.slots)
      if (s.prompt_id == f[0] && s.slot_id == f[1]) slot = &s;
    if (!slot) {
      out.slots.push_back({f[0], f[1], {}, 0.0, false});
      slot = &out.slots.back();
    }
    slot->weights.alphas.push_back(detail::parse_double(f[3], where));
    slot->dev_accuracy = detail::parse_double(f[4], where);
  }
  for (const auto& s : out.slots) {
    if (s.weights.alphas.size() != out.member_ids.size())
      throw DataError(path + ": slot '" + s.slot_id + "' is missing member rows");
    check_simplex(s.weights);
  }
  return out;
}

}  // namespace vident
