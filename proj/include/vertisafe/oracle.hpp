#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vertisafe/transport.hpp"

namespace vertisafe {

class SearchSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationResult {
  bool feasible = false;
  std::optional<TransportWitness> assignment;
  std::uint64_t visited = 0;
};

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

// Number of ways to split `supply` over `k` cells, ignoring bounds.
inline std::uint64_t compositions(std::int64_t supply, std::size_t k) {
  if (k == 0) return supply == 0 ? 1 : 0;
  // C(supply + k - 1, k - 1)
  std::uint64_t result = 1;
  for (std::size_t i = 1; i < k; ++i) {
    result = saturating_mul(result, static_cast<std::uint64_t>(supply) + i);
    if (result == UINT64_MAX) return result;
    result /= i;
  }
  return result;
}

struct Enumerator {
  const TransportInstance& inst;
  std::vector<std::vector<std::size_t>> row_cells;
  std::vector<std::int64_t> room;  // INT64_MAX when unbounded
  TransportWitness current;
  std::uint64_t visited = 0;

  bool row(std::size_t r) {
    if (r == row_cells.size()) return true;
    return split(r, 0, inst.rows[r].supply);
  }

  bool split(std::size_t r, std::size_t i, std::int64_t left) {
    const auto& cells = row_cells[r];
    if (i == cells.size()) {
      ++visited;
      return left == 0 && row(r + 1);
    }
    const std::size_t c = cells[i];
    const std::size_t col = inst.cells[c].column;
    std::int64_t hi = left;
    if (inst.cells[c].bound) hi = std::min(hi, *inst.cells[c].bound);
    for (std::int64_t x = 0; x <= hi; ++x) {
      if (x > room[col]) break;
      room[col] -= x;
      current[c] = x;
      bool ok = split(r, i + 1, left - x);
      room[col] += x;
      if (ok) return true;
      current[c] = 0;
    }
    return false;
  }
};

}  // namespace detail

/// Decides the instance by trying every integral split of every row's
/// supply over its cells. Refuses when the unpruned search space exceeds
/// `limit`.
inline EnumerationResult enumerate_assignments(const TransportInstance& inst, std::uint64_t limit = 10'000'000) {
  check_well_formed(inst);
  detail::Enumerator en{inst, std::vector<std::vector<std::size_t>>(inst.rows.size()), {}, TransportWitness(inst.cells.size(), 0)};
  for (std::size_t c = 0; c < inst.cells.size(); ++c) en.row_cells[inst.cells[c].row].push_back(c);
  std::uint64_t space = 1;
  for (std::size_t r = 0; r < inst.rows.size(); ++r)
    space = detail::saturating_mul(space, detail::compositions(inst.rows[r].supply, en.row_cells[r].size()));
  if (space > limit) throw SearchSpaceTooLarge("search space of " + std::to_string(space) + " exceeds limit");

  EnumerationResult result;
  en.room.resize(inst.columns.size());
  for (std::size_t k = 0; k < inst.columns.size(); ++k) {
    auto res = inst.residual(k);
    if (res && *res < 0) return result;
    en.room[k] = res ? *res : INT64_MAX;
  }
  result.feasible = en.row(0);
  result.visited = en.visited;
  if (result.feasible) result.assignment = en.current;
  return result;
}

/// Exact feasibility of the real relaxation, by a phase-one simplex over
/// rationals with Bland's rule.
inline bool lp_relaxation_feasible(const TransportInstance& inst) {
  check_well_formed(inst);
  using Q = boost::rational<std::int64_t>;
  const Q zero(0);
  const std::size_t n_cells = inst.cells.size();

  // Constraint rows: equality per transport row, <= per bounded column,
  // <= per bounded cell. Every right-hand side must be non-negative.
  struct Constraint {
    std::vector<std::size_t> cells;
    std::int64_t rhs;
    bool equality;
  };
  std::vector<Constraint> cons;
  for (std::size_t r = 0; r < inst.rows.size(); ++r) {
    Constraint c{{}, inst.rows[r].supply, true};
    for (std::size_t i = 0; i < n_cells; ++i)
      if (inst.cells[i].row == r) c.cells.push_back(i);
    cons.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < inst.columns.size(); ++k) {
    auto res = inst.residual(k);
    if (!res) continue;
    if (*res < 0) return false;
    Constraint c{{}, *res, false};
    for (std::size_t i = 0; i < n_cells; ++i)
      if (inst.cells[i].column == k) c.cells.push_back(i);
    cons.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < n_cells; ++i)
    if (inst.cells[i].bound) cons.push_back({{i}, *inst.cells[i].bound, false});

  const std::size_t m = cons.size();
  std::size_t n_slack = 0;
  std::size_t n_art = 0;
  for (const auto& c : cons) (c.equality ? n_art : n_slack)++;
  const std::size_t n_vars = n_cells + n_slack + n_art;

  // Tableau rows 0..m-1, objective row m; last column is the right-hand side.
  std::vector<std::vector<Q>> t(m + 1, std::vector<Q>(n_vars + 1, Q(0)));
  std::vector<std::size_t> basis(m);
  std::size_t slack = n_cells;
  std::size_t art = n_cells + n_slack;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c : cons[i].cells) t[i][c] = 1;
    t[i][n_vars] = cons[i].rhs;
    basis[i] = cons[i].equality ? art++ : slack++;
    t[i][basis[i]] = 1;
  }
  // Minimise the sum of artificials: objective row holds reduced costs.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n_cells + n_slack) continue;
    for (std::size_t j = 0; j <= n_vars; ++j) t[m][j] -= t[i][j];
  }
  for (std::size_t j = n_cells + n_slack; j < n_vars; ++j) t[m][j] += 1;

  for (;;) {
    std::size_t enter = n_vars;
    for (std::size_t j = 0; j < n_vars; ++j)
      if (t[m][j] < zero) {
        enter = j;
        break;
      }
    if (enter == n_vars) break;
    std::size_t leave = m;
    Q best_ratio;
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] <= zero) continue;
      Q ratio = t[i][n_vars] / t[i][enter];
      if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction; cannot happen in phase one
    Q pivot = t[leave][enter];
    for (auto& x : t[leave]) x /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == zero) continue;
      Q f = t[i][enter];
      for (std::size_t j = 0; j <= n_vars; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }
  return t[m][n_vars] == zero;
}

}  // namespace vertisafe
