#pragma once

#include <chrono>
#include <cmath>
#include <deque>
#include <queue>

#include "gridmap.hpp"
#include "plan.hpp"

namespace gridnav {

// Uniform cell decomposition of the workspace. A cell is blocked when its
// closed square overlaps any obstacle rectangle (touching counts). Neighbors
// are the 8 surrounding cells; diagonal moves additionally require both
// adjacent orthogonal cells to be free (no corner cutting).
struct CellGraph {
  int cols = 0;
  int rows = 0;
  double cell_size = 0.0;
  double origin_x = 0.0;
  double origin_y = 0.0;
  std::vector<uint8_t> blocked;

  bool in_bounds(int col, int row) const { return col >= 0 && col < cols && row >= 0 && row < rows; }
  bool is_blocked(int col, int row) const {
    return blocked[static_cast<size_t>(row) * cols + col] != 0;
  }
  Point center(int col, int row) const {
    return {origin_x + (col + 0.5) * cell_size, origin_y + (row + 0.5) * cell_size};
  }
  CellIndex cell_of(const Point& p) const {
    double tc = (p.x - origin_x) / cell_size;
    double tr = (p.y - origin_y) / cell_size;
    int col = static_cast<int>(std::floor(tc));
    int row = static_cast<int>(std::floor(tr));
    if (col == cols && tc - cols <= kEps) col--;
    if (row == rows && tr - rows <= kEps) row--;
    if (!in_bounds(col, row)) throw std::out_of_range("point outside decomposed workspace");
    return {col, row};
  }

  bool step_ok(int col, int row, int dc, int dr) const {
    int nc = col + dc, nr = row + dr;
    if (!in_bounds(nc, nr) || is_blocked(nc, nr)) return false;
    if (dc != 0 && dr != 0 && (is_blocked(col + dc, row) || is_blocked(col, row + dr)))
      return false;
    return true;
  }

  long node_count() const {
    long n = 0;
    for (uint8_t b : blocked) n += b == 0;
    return n;
  }
  long edge_count() const {
    long e = 0;
    for (int r = 0; r < rows; r++)
      for (int c = 0; c < cols; c++) {
        if (is_blocked(c, r)) continue;
        for (int dr = -1; dr <= 1; dr++)
          for (int dc = -1; dc <= 1; dc++) {
            if (dc == 0 && dr == 0) continue;
            if (step_ok(c, r, dc, dr)) e++;
          }
      }
    return e;
  }
};

inline CellGraph decompose(const Workspace& ws, const std::vector<ObstacleRect>& obstacles,
                           double cell_size) {
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  CellGraph g;
  g.cell_size = cell_size;
  g.origin_x = ws.x_min;
  g.origin_y = ws.y_min;
  g.cols = std::max(1, static_cast<int>(std::ceil(ws.width() / cell_size - kEps)));
  g.rows = std::max(1, static_cast<int>(std::ceil(ws.height() / cell_size - kEps)));
  g.blocked.assign(static_cast<size_t>(g.cols) * g.rows, 0);
  for (const ObstacleRect& r : obstacles) {
    // padded index range, then an exact closed-overlap test per cell so that
    // rectangles flush with the lattice still block the touching cells
    int c0 = std::max(0, static_cast<int>(std::floor((r.x_bl - ws.x_min) / cell_size)) - 1);
    int c1 = std::min(g.cols - 1, static_cast<int>(std::floor((r.x_tr - ws.x_min) / cell_size)) + 1);
    int r0 = std::max(0, static_cast<int>(std::floor((r.y_bl - ws.y_min) / cell_size)) - 1);
    int r1 = std::min(g.rows - 1, static_cast<int>(std::floor((r.y_tr - ws.y_min) / cell_size)) + 1);
    for (int row = r0; row <= r1; row++) {
      double y0 = ws.y_min + row * cell_size, y1 = y0 + cell_size;
      if (y1 < r.y_bl || y0 > r.y_tr) continue;
      for (int col = c0; col <= c1; col++) {
        double x0 = ws.x_min + col * cell_size, x1 = x0 + cell_size;
        if (x1 < r.x_bl || x0 > r.x_tr) continue;
        g.blocked[static_cast<size_t>(row) * g.cols + col] = 1;
      }
    }
  }
  return g;
}

// Drops interior waypoints collinear with their neighbors. Reversals also
// have zero cross product, so only direction-preserving merges are taken.
inline std::vector<Waypoint> simplify_waypoints(const std::vector<Waypoint>& wps) {
  if (wps.size() < 3) return wps;
  std::vector<Waypoint> out;
  out.push_back(wps.front());
  for (size_t i = 1; i + 1 < wps.size(); i++) {
    const Waypoint& a = out.back();
    const Waypoint& b = wps[i];
    const Waypoint& c = wps[i + 1];
    double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    double dot = (b.x - a.x) * (c.x - b.x) + (b.y - a.y) * (c.y - b.y);
    if (std::abs(cross) <= kEps && dot >= 0.0) continue;
    out.push_back(b);
  }
  out.push_back(wps.back());
  return out;
}

struct GraphPlanResult {
  std::optional<MotionPlan> plan;
  GraphStats stats;
  std::string error;  // non-empty for precondition failures (blocked or outside cells)
};

namespace detail {

inline bool graph_preamble(const CellGraph& g, const Point& start, const Point& goal,
                           CellIndex& s, CellIndex& t, GraphPlanResult& r) {
  r.stats.nodes = g.node_count();
  r.stats.edges = g.edge_count();
  try {
    s = g.cell_of(start);
    t = g.cell_of(goal);
  } catch (const std::out_of_range&) {
    r.error = "start or goal outside the workspace";
    return false;
  }
  if (g.is_blocked(s.col, s.row)) {
    r.error = "start cell is blocked";
    return false;
  }
  if (g.is_blocked(t.col, t.row)) {
    r.error = "goal cell is blocked";
    return false;
  }
  return true;
}

inline MotionPlan cells_to_plan(const CellGraph& g, const std::vector<CellIndex>& cells,
                                const Point& start, const Point& goal, PlannerKind kind) {
  std::vector<Waypoint> wps;
  wps.push_back({start.x, start.y, std::nullopt});
  for (const CellIndex& c : cells) {
    Point p = g.center(c.col, c.row);
    wps.push_back({p.x, p.y, std::nullopt});
  }
  wps.push_back({goal.x, goal.y, std::nullopt});
  std::vector<Waypoint> dedup;
  for (const Waypoint& w : wps) {
    if (!dedup.empty() && std::abs(dedup.back().x - w.x) <= kEps &&
        std::abs(dedup.back().y - w.y) <= kEps)
      continue;
    dedup.push_back(w);
  }
  MotionPlan plan;
  plan.planner = kind;
  plan.waypoints = simplify_waypoints(dedup);
  return plan;
}

constexpr int kNeighborOrder[8][2] = {{1, 0}, {-1, 0}, {0, 1},  {0, -1},
                                      {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};

}  // namespace detail

// Hop-count shortest path; diagonal and orthogonal steps both cost one hop.
// A node counts as expanded when it is popped and goal-tested.
inline GraphPlanResult bfs_plan(const CellGraph& g, const Point& start, const Point& goal) {
  GraphPlanResult result;
  CellIndex s, t;
  if (!detail::graph_preamble(g, start, goal, s, t, result)) return result;

  auto start_time = std::chrono::steady_clock::now();
  auto id = [&](int c, int r) { return r * g.cols + c; };
  std::vector<int> parent(static_cast<size_t>(g.cols) * g.rows, -2);
  std::deque<int> frontier;
  int start_id = id(s.col, s.row), goal_id = id(t.col, t.row);
  frontier.push_back(start_id);
  parent[start_id] = -1;
  long expanded = 0;
  bool found = false;
  while (!frontier.empty()) {
    int cur = frontier.front();
    frontier.pop_front();
    expanded++;
    if (cur == goal_id) {
      found = true;
      break;
    }
    int c = cur % g.cols, r = cur / g.cols;
    for (auto [dc, dr] : detail::kNeighborOrder) {
      if (!g.step_ok(c, r, dc, dr)) continue;
      int nxt = id(c + dc, r + dr);
      if (parent[nxt] != -2) continue;
      parent[nxt] = cur;
      frontier.push_back(nxt);
    }
  }
  result.stats.expanded = expanded;
  if (!found) return result;

  std::vector<CellIndex> cells;
  for (int cur = goal_id; cur != -1; cur = parent[cur])
    cells.push_back({cur % g.cols, cur / g.cols});
  std::reverse(cells.begin(), cells.end());
  MotionPlan plan = detail::cells_to_plan(g, cells, start, goal, PlannerKind::Bfs);
  plan.graph_stats = result.stats;
  plan.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  result.plan = std::move(plan);
  return result;
}

// Metric shortest path: orthogonal steps cost 1, diagonal steps sqrt(2),
// octile-distance heuristic. Ties break on smaller heuristic then insertion
// order so runs are deterministic.
inline GraphPlanResult astar_plan(const CellGraph& g, const Point& start, const Point& goal) {
  GraphPlanResult result;
  CellIndex s, t;
  if (!detail::graph_preamble(g, start, goal, s, t, result)) return result;

  auto start_time = std::chrono::steady_clock::now();
  const double kSqrt2 = std::sqrt(2.0);
  const size_t n = static_cast<size_t>(g.cols) * g.rows;
  auto id = [&](int c, int r) { return r * g.cols + c; };
  auto heuristic = [&](int c, int r) {
    double dx = std::abs(c - t.col), dy = std::abs(r - t.row);
    return std::max(dx, dy) + (kSqrt2 - 1.0) * std::min(dx, dy);
  };

  struct QEntry {
    double f;
    double h;
    long seq;
    int node;
  };
  auto cmp = [](const QEntry& a, const QEntry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return a.seq > b.seq;
  };
  std::priority_queue<QEntry, std::vector<QEntry>, decltype(cmp)> open(cmp);
  std::vector<double> gcost(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -2);
  std::vector<uint8_t> closed(n, 0);

  int start_id = id(s.col, s.row), goal_id = id(t.col, t.row);
  long seq = 0;
  gcost[start_id] = 0.0;
  parent[start_id] = -1;
  open.push({heuristic(s.col, s.row), heuristic(s.col, s.row), seq++, start_id});
  long expanded = 0;
  bool found = false;
  while (!open.empty()) {
    QEntry top = open.top();
    open.pop();
    if (closed[top.node]) continue;
    closed[top.node] = 1;
    expanded++;
    if (top.node == goal_id) {
      found = true;
      break;
    }
    int c = top.node % g.cols, r = top.node / g.cols;
    for (auto [dc, dr] : detail::kNeighborOrder) {
      if (!g.step_ok(c, r, dc, dr)) continue;
      int nxt = id(c + dc, r + dr);
      if (closed[nxt]) continue;
      double step = (dc != 0 && dr != 0) ? kSqrt2 : 1.0;
      double cand = gcost[top.node] + step;
      if (cand < gcost[nxt]) {
        gcost[nxt] = cand;
        parent[nxt] = top.node;
        double h = heuristic(c + dc, r + dr);
        open.push({cand + h, h, seq++, nxt});
      }
    }
  }
  result.stats.expanded = expanded;
  if (!found) return result;

  std::vector<CellIndex> cells;
  for (int cur = goal_id; cur != -1; cur = parent[cur])
    cells.push_back({cur % g.cols, cur / g.cols});
  std::reverse(cells.begin(), cells.end());
  MotionPlan plan = detail::cells_to_plan(g, cells, start, goal, PlannerKind::AStar);
  plan.graph_stats = result.stats;
  plan.solve_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  result.plan = std::move(plan);
  return result;
}

}  // namespace gridnav
