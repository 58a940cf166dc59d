#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vertisafe {

/// Bipartite feasibility problem: route every row's supply to columns over
/// allowed cells without exceeding column capacities or cell bounds.
///
/// Columns without a capacity are unbounded. Fixed cells carry a
/// predetermined amount into a column and are folded into its capacity; a
/// column left with negative capacity makes the instance infeasible.
struct TransportInstance {
  struct Row {
    std::string label;
    std::int64_t supply = 0;
  };
  struct Column {
    std::string label;
    std::optional<std::int64_t> capacity;
  };
  struct Cell {
    std::size_t row = 0;
    std::size_t column = 0;
    std::optional<std::int64_t> bound;
  };
  struct FixedCell {
    std::size_t column = 0;
    std::int64_t amount = 0;
  };

  std::vector<Row> rows;
  std::vector<Column> columns;
  std::vector<Cell> cells;
  std::vector<FixedCell> fixed;

  std::int64_t total_supply() const {
    std::int64_t s = 0;
    for (const auto& r : rows) s += r.supply;
    return s;
  }

  /// Column capacity after fixed cells; nullopt when unbounded.
  std::optional<std::int64_t> residual(std::size_t column) const {
    auto cap = columns.at(column).capacity;
    if (!cap) return std::nullopt;
    std::int64_t c = *cap;
    for (const auto& f : fixed)
      if (f.column == column) c -= f.amount;
    return c;
  }

  /// Largest amount cell `c` can carry: its bound, capped by the row supply.
  std::int64_t cell_limit(std::size_t c) const {
    const Cell& cell = cells.at(c);
    std::int64_t lim = rows.at(cell.row).supply;
    if (cell.bound) lim = std::min(lim, *cell.bound);
    return std::max<std::int64_t>(lim, 0);
  }
};

class MalformedInstance : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-cell amounts, aligned with TransportInstance::cells.
using TransportWitness = std::vector<std::int64_t>;

/// Cut-based infeasibility proof: the rows can only send their supply into
/// `columns` or across the listed boundary cells, and together those hold
/// less than the rows must ship.
struct TransportCertificate {
  std::vector<std::size_t> rows;
  std::vector<std::size_t> columns;
  std::vector<std::size_t> boundary_cells;
  std::int64_t demand = 0;
  std::int64_t room = 0;
};

struct SolveOutcome {
  bool feasible = false;
  TransportWitness witness;
  std::optional<TransportCertificate> certificate;
};

inline void check_well_formed(const TransportInstance& inst) {
  for (std::size_t r = 0; r < inst.rows.size(); ++r)
    if (inst.rows[r].supply < 0) throw MalformedInstance("row " + inst.rows[r].label + " has negative supply");
  for (const auto& c : inst.cells) {
    if (c.row >= inst.rows.size() || c.column >= inst.columns.size())
      throw MalformedInstance("cell references a missing row or column");
    if (c.bound && *c.bound < 0) throw MalformedInstance("cell bound must be non-negative");
  }
  for (const auto& f : inst.fixed)
    if (f.column >= inst.columns.size() || f.amount < 0) throw MalformedInstance("fixed cell is out of range");
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (const auto& c : inst.cells) keys.emplace_back(c.row, c.column);
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) throw MalformedInstance("duplicate cell");
}

/// True iff `witness` ships every row's supply exactly, stays within column
/// residuals and cell bounds, and has no negative entries.
inline bool validate_witness(const TransportInstance& inst, const TransportWitness& witness) {
  if (witness.size() != inst.cells.size()) return false;
  std::vector<std::int64_t> row_sum(inst.rows.size(), 0);
  std::vector<std::int64_t> col_sum(inst.columns.size(), 0);
  for (std::size_t c = 0; c < inst.cells.size(); ++c) {
    const auto& cell = inst.cells[c];
    if (cell.row >= inst.rows.size() || cell.column >= inst.columns.size()) return false;
    if (witness[c] < 0) return false;
    if (cell.bound && witness[c] > *cell.bound) return false;
    row_sum[cell.row] += witness[c];
    col_sum[cell.column] += witness[c];
  }
  for (std::size_t r = 0; r < inst.rows.size(); ++r)
    if (row_sum[r] != inst.rows[r].supply) return false;
  for (std::size_t k = 0; k < inst.columns.size(); ++k) {
    auto res = inst.residual(k);
    if (res && col_sum[k] > *res) return false;
  }
  return true;
}

/// Recomputes the certificate arithmetic from the instance alone.
inline bool validate_certificate(const TransportInstance& inst, const TransportCertificate& cert) {
  std::vector<bool> in_rows(inst.rows.size(), false);
  std::vector<bool> in_cols(inst.columns.size(), false);
  for (auto r : cert.rows) {
    if (r >= inst.rows.size()) return false;
    in_rows[r] = true;
  }
  for (auto k : cert.columns) {
    if (k >= inst.columns.size()) return false;
    in_cols[k] = true;
  }
  std::int64_t demand = 0;
  for (std::size_t r = 0; r < inst.rows.size(); ++r)
    if (in_rows[r]) demand += inst.rows[r].supply;
  std::int64_t room = 0;
  for (std::size_t k = 0; k < inst.columns.size(); ++k) {
    if (!in_cols[k]) continue;
    auto res = inst.residual(k);
    if (!res) return false;  // an unbounded column absorbs everything
    room += *res;
  }
  // Every cell leaving the row set towards an outside column must be listed,
  // and listed cells must really cross the boundary.
  std::vector<bool> listed(inst.cells.size(), false);
  for (auto c : cert.boundary_cells) {
    if (c >= inst.cells.size()) return false;
    const auto& cell = inst.cells[c];
    if (!in_rows[cell.row] || in_cols[cell.column]) return false;
    listed[c] = true;
  }
  for (std::size_t c = 0; c < inst.cells.size(); ++c) {
    const auto& cell = inst.cells[c];
    if (in_rows[cell.row] && !in_cols[cell.column]) {
      if (!listed[c]) return false;
      room += inst.cell_limit(c);
    }
  }
  return demand == cert.demand && room == cert.room && demand > room;
}

namespace detail {

/// Dinic max-flow; arcs are scanned in insertion order so results are
/// reproducible.
class MaxFlow {
 public:
  MaxFlow(std::size_t n, std::size_t arcs) : adj_(n), level_(n), next_(n) { arcs_.reserve(2 * arcs); }

  std::size_t add_arc(std::size_t from, std::size_t to, std::int64_t cap) {
    adj_[from].push_back(arcs_.size());
    arcs_.push_back({to, cap});
    adj_[to].push_back(arcs_.size());
    arcs_.push_back({from, 0});
    return arcs_.size() - 2;
  }

  std::int64_t flow_on(std::size_t arc) const { return arcs_[arc ^ 1].cap; }

  std::int64_t run(std::size_t s, std::size_t t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (std::int64_t f = dfs(s, t, std::numeric_limits<std::int64_t>::max())) total += f;
    }
    return total;
  }

  /// Nodes reachable from `s` in the residual graph.
  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t a : adj_[u]) {
        const Arc& arc = arcs_[a];
        if (arc.cap > 0 && !seen[arc.to]) {
          seen[arc.to] = true;
          stack.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    std::int64_t cap;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    auto& queue = queue_;
    queue.assign(1, s);
    level_[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      std::size_t u = queue[h];
      for (std::size_t a : adj_[u]) {
        const Arc& arc = arcs_[a];
        if (arc.cap > 0 && level_[arc.to] < 0) {
          level_[arc.to] = level_[u] + 1;
          queue.push_back(arc.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(std::size_t u, std::size_t t, std::int64_t pushed) {
    if (u == t) return pushed;
    for (std::size_t& i = next_[u]; i < adj_[u].size(); ++i) {
      std::size_t a = adj_[u][i];
      Arc& arc = arcs_[a];
      if (arc.cap <= 0 || level_[arc.to] != level_[u] + 1) continue;
      if (std::int64_t got = dfs(arc.to, t, std::min(pushed, arc.cap))) {
        arc.cap -= got;
        arcs_[a ^ 1].cap += got;
        return got;
      }
    }
    return 0;
  }

  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> arcs_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
  std::vector<std::size_t> queue_;
};

}  // namespace detail

/// Decides the instance by a max-flow saturation test.
///
/// The constraint matrix is totally unimodular, so integral and fractional
/// feasibility coincide and the flow gives an integral witness directly.
/// On failure the residual-graph cut is returned as a certificate.
inline SolveOutcome solve(const TransportInstance& inst) {
  check_well_formed(inst);
  SolveOutcome out;

  const std::int64_t total = inst.total_supply();
  std::vector<std::int64_t> room(inst.columns.size());
  for (std::size_t k = 0; k < inst.columns.size(); ++k) {
    auto res = inst.residual(k);
    if (res && *res < 0) {
      TransportCertificate cert;
      cert.columns = {k};
      cert.room = *res;
      out.certificate = cert;
      return out;
    }
    room[k] = res ? *res : total;
  }

  if (total == 0) {
    out.feasible = true;
    out.witness.assign(inst.cells.size(), 0);
    return out;
  }

  // Cells in (row, column) order fix the augmentation order.
  std::vector<std::size_t> order(inst.cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = inst.cells[a];
    const auto& y = inst.cells[b];
    return x.row != y.row ? x.row < y.row : x.column < y.column;
  });

  const std::size_t n_rows = inst.rows.size();
  const std::size_t source = n_rows + inst.columns.size();
  const std::size_t sink = source + 1;
  detail::MaxFlow mf(sink + 1, n_rows + inst.cells.size() + inst.columns.size());
  for (std::size_t r = 0; r < n_rows; ++r) mf.add_arc(source, r, inst.rows[r].supply);
  std::vector<std::size_t> cell_arc(inst.cells.size());
  for (std::size_t c : order) cell_arc[c] = mf.add_arc(inst.cells[c].row, n_rows + inst.cells[c].column, inst.cell_limit(c));
  for (std::size_t k = 0; k < inst.columns.size(); ++k) mf.add_arc(n_rows + k, sink, room[k]);

  const std::int64_t shipped = mf.run(source, sink);
  if (shipped == total) {
    out.feasible = true;
    out.witness.resize(inst.cells.size());
    for (std::size_t c = 0; c < inst.cells.size(); ++c) out.witness[c] = mf.flow_on(cell_arc[c]);
    return out;
  }

  auto seen = mf.reachable(source);
  TransportCertificate cert;
  for (std::size_t r = 0; r < n_rows; ++r)
    if (seen[r]) {
      cert.rows.push_back(r);
      cert.demand += inst.rows[r].supply;
    }
  for (std::size_t k = 0; k < inst.columns.size(); ++k)
    if (seen[n_rows + k]) {
      cert.columns.push_back(k);
      cert.room += room[k];
    }
  for (std::size_t c = 0; c < inst.cells.size(); ++c) {
    const auto& cell = inst.cells[c];
    if (seen[cell.row] && !seen[n_rows + cell.column]) {
      cert.boundary_cells.push_back(c);
      cert.room += inst.cell_limit(c);
    }
  }
  out.certificate = std::move(cert);
  return out;
}

}  // namespace vertisafe
