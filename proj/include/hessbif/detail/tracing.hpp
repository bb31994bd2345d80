#pragma once

// Grid continuation shared by the scalar and the system tracer.
//
// A Node carries the grid parameter `t` (the amplitude that is held fixed
// while lambda is solved for) and the resulting BranchPoint. `solve(t, seed)`
// returns std::nullopt when no solution is found at t; `seed` is the nearest
// solved neighbour or nullptr.

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "hessbif/branch.hpp"
#include "hessbif/errors.hpp"

namespace hessbif::detail {

template <typename Node>
struct TraceNodes {
  std::vector<Node> nodes;
  std::vector<double> gaps;  // grid parameters without a solution
};

template <typename Node, typename Solve>
std::optional<Node> try_solve(Solve& solve, double t, const Node* seed) {
  try {
    return solve(t, seed);
  } catch (const NumericalFailure&) {
    return std::nullopt;
  }
}

template <typename Node, typename Solve>
TraceNodes<Node> trace_nodes(Solve& solve, const std::vector<double>& grid, const TraceOptions& opts) {
  const int threads = std::max(1, std::min<int>(opts.threads > 0 ? opts.threads : threads_from_environment(),
                                                static_cast<int>(grid.size())));
  std::vector<std::optional<Node>> solved(grid.size());
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));

  // Contiguous chunks; each chunk seeds from its own previous point only, so
  // the result depends on the thread count but not on scheduling.
  auto run_chunk = [&](int c) {
    const std::size_t begin = grid.size() * static_cast<std::size_t>(c) / threads;
    const std::size_t end = grid.size() * static_cast<std::size_t>(c + 1) / threads;
    try {
      const Node* seed = nullptr;
      for (std::size_t i = begin; i < end; ++i) {
        solved[i] = try_solve<Node>(solve, grid[i], seed);
        if (solved[i]) seed = &*solved[i];
      }
    } catch (...) {
      errors[static_cast<std::size_t>(c)] = std::current_exception();
    }
  };
  if (threads == 1) {
    run_chunk(0);
  } else {
    std::vector<std::thread> pool;
    for (int c = 0; c < threads; ++c) pool.emplace_back(run_chunk, c);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  TraceNodes<Node> out;
  std::size_t attempted = grid.size();
  std::size_t failed = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (solved[i]) {
      out.nodes.push_back(*solved[i]);
    } else {
      out.gaps.push_back(grid[i]);
      ++failed;
    }
  }

  // Continuity: bisect (geometrically) any interval with a large relative jump.
  std::vector<Node> refined;
  auto jump = [](const Node& a, const Node& b) {
    const double la = a.point.lambda, lb = b.point.lambda;
    return std::abs(la - lb) / std::min(la, lb);
  };
  auto fill = [&](auto&& self, const Node& a, const Node& b, int level) -> void {
    if (level >= opts.max_refine_levels || jump(a, b) <= opts.max_relative_jump) return;
    const double tm = std::sqrt(a.t * b.t);
    ++attempted;
    auto mid = try_solve<Node>(solve, tm, &a);
    if (!mid) {
      out.gaps.push_back(tm);
      ++failed;
      return;
    }
    self(self, a, *mid, level + 1);
    refined.push_back(*mid);
    self(self, *mid, b, level + 1);
  };
  for (std::size_t i = 0; i < out.nodes.size(); ++i) {
    if (i > 0) fill(fill, out.nodes[i - 1], out.nodes[i], 0);
    refined.push_back(out.nodes[i]);
  }
  out.nodes = std::move(refined);
  std::sort(out.gaps.begin(), out.gaps.end());

  if (static_cast<double>(failed) > opts.max_gap_fraction * static_cast<double>(attempted))
    throw NumericalFailure("tracing failure: " + std::to_string(failed) + " of " + std::to_string(attempted) +
                           " amplitudes have no lambda root");
  return out;
}

/// Golden-section polish of each discrete extremum of lambda over log t.
template <typename Node, typename Solve>
void polish_folds(std::vector<Node>& nodes, Solve& solve, double plateau_tol) {
  Branch probe;
  for (const auto& n : nodes) probe.points.push_back(n.point);
  const auto folds = detect_folds(probe, plateau_tol);
  std::vector<Node> extra;
  for (const auto& fold : folds) {
    const std::size_t i = fold.index;
    if (i == 0 || i + 1 >= nodes.size()) continue;
    const double sign = fold.kind == FoldKind::Max ? 1.0 : -1.0;
    Node best = nodes[i];
    auto eval = [&](double x) -> double {
      auto n = try_solve<Node>(solve, std::exp(x), &best);
      if (!n) return -std::numeric_limits<double>::infinity();
      if (sign * n->point.lambda > sign * best.point.lambda) best = *n;
      return sign * n->point.lambda;
    };
    constexpr double kInvPhi = 0.6180339887498949;
    double a = std::log(nodes[i - 1].t), b = std::log(nodes[i + 1].t);
    double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    while (b - a > 1e-5) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - kInvPhi * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + kInvPhi * (b - a);
        f2 = eval(x2);
      }
    }
    if (best.t != nodes[i].t) extra.push_back(best);
  }
  for (auto& e : extra) nodes.push_back(e);
  std::sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) { return x.t < y.t; });
}

}  // namespace hessbif::detail
