#include "network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "reflectcost/comparison.hpp"

namespace reflectcost::detail {

namespace {

constexpr int kUp = 1;     // tree arc points from node to parent
constexpr int kDown = -1;  // tree arc points from parent to node

// Primal network simplex over a strongly feasible spanning tree rooted at an
// artificial node. Real arcs i -> n + j are implicit; artificial arc of node u
// has index n*m + u.
class Solver {
 public:
  Solver(const std::vector<double>& cost, const std::vector<double>& supply, const std::vector<double>& demand)
      : n_(supply.size()), m_(demand.size()), cost_(cost) {
    nodes_ = n_ + m_;
    root_ = nodes_;
    real_arcs_ = n_ * m_;
    max_cost_ = 0.0;
    for (double c : cost_) max_cost_ = std::max(max_cost_, std::abs(c));
    art_cost_ = (max_cost_ + 1.0) * static_cast<double>(nodes_);
    eps_ = 1e-11 * (max_cost_ + 1.0);

    flow_.assign(real_arcs_ + nodes_, 0.0);
    in_tree_.assign(real_arcs_, 0);
    art_cost_of_.assign(nodes_, 0.0);
    art_out_.assign(nodes_, 1);
    parent_.assign(nodes_ + 1, -1);
    pred_.assign(nodes_ + 1, -1);
    dir_.assign(nodes_ + 1, kUp);
    depth_.assign(nodes_ + 1, 0);
    pi_.assign(nodes_ + 1, 0.0);
    children_.assign(nodes_ + 1, {});

    for (std::size_t u = 0; u < nodes_; ++u) {
      const double b = u < n_ ? supply[u] : -demand[u - n_];
      const std::size_t e = real_arcs_ + u;
      parent_[u] = static_cast<int>(root_);
      pred_[u] = static_cast<long>(e);
      depth_[u] = 1;
      children_[root_].push_back(static_cast<int>(u));
      if (b >= 0.0) {
        art_out_[u] = 1;
        dir_[u] = kUp;
        flow_[e] = b;
        art_cost_of_[u] = 0.0;
        pi_[u] = 0.0;
      } else {
        art_out_[u] = 0;
        dir_[u] = kDown;
        flow_[e] = -b;
        art_cost_of_[u] = art_cost_;
        pi_[u] = art_cost_;
      }
    }
    block_ = std::max<std::size_t>(10, static_cast<std::size_t>(std::sqrt(static_cast<double>(real_arcs_))));
  }

  TransportationSolution run() {
    const std::size_t cap = 1000 * (nodes_ + 1) + 100000;
    std::size_t pivots = 0;
    for (;;) {
      long entering = find_entering();
      if (entering < 0) {
        recompute_potentials();
        entering = find_entering();
        if (entering < 0) break;
      }
      pivot(static_cast<std::size_t>(entering));
      if (++pivots > cap) throw numerical_error("transport: network simplex iteration cap reached");
      if (pivots % 2000 == 0) recompute_potentials();
    }
    TransportationSolution out;
    out.flow.assign(flow_.begin(), flow_.begin() + static_cast<long>(real_arcs_));
    out.u.resize(n_);
    out.v.resize(m_);
    for (std::size_t i = 0; i < n_; ++i) out.u[i] = -pi_[i];
    for (std::size_t j = 0; j < m_; ++j) out.v[j] = pi_[n_ + j];
    out.pivots = pivots;
    return out;
  }

 private:
  std::size_t source(std::size_t e) const {
    if (e < real_arcs_) return e / m_;
    const std::size_t u = e - real_arcs_;
    return art_out_[u] ? u : root_;
  }
  std::size_t target(std::size_t e) const {
    if (e < real_arcs_) return n_ + e % m_;
    const std::size_t u = e - real_arcs_;
    return art_out_[u] ? root_ : u;
  }
  double arc_cost(std::size_t e) const { return e < real_arcs_ ? cost_[e] : art_cost_of_[e - real_arcs_]; }

  // Block pricing over real arcs; artificial arcs never re-enter.
  long find_entering() {
    double best = -eps_;
    long found = -1;
    std::size_t checked = 0;
    std::size_t e = next_arc_;
    std::size_t i = e / m_, j = e % m_;
    for (std::size_t k = 0; k < real_arcs_; ++k) {
      if (!in_tree_[e]) {
        const double rc = cost_[e] + pi_[i] - pi_[n_ + j];
        if (rc < best) {
          best = rc;
          found = static_cast<long>(e);
        }
      }
      ++e;
      if (++j == m_) {
        j = 0;
        ++i;
      }
      if (e == real_arcs_) {
        e = 0;
        i = 0;
        j = 0;
      }
      if (++checked == block_) {
        if (found >= 0) break;
        checked = 0;
      }
    }
    next_arc_ = e;
    return found;
  }

  void pivot(std::size_t in) {
    const std::size_t s = source(in), t = target(in);
    std::size_t a = s, b = t;
    while (a != b) {
      if (depth_[a] > depth_[b]) {
        a = static_cast<std::size_t>(parent_[a]);
      } else if (depth_[b] > depth_[a]) {
        b = static_cast<std::size_t>(parent_[b]);
      } else {
        a = static_cast<std::size_t>(parent_[a]);
        b = static_cast<std::size_t>(parent_[b]);
      }
    }
    const std::size_t join = a;

    // Leaving arc: strict on the source side, last tie on the target side.
    double delta = std::numeric_limits<double>::infinity();
    long out_node = -1;
    int side = 0;
    for (std::size_t u = s; u != join; u = static_cast<std::size_t>(parent_[u])) {
      if (dir_[u] == kUp && flow_[pred_[u]] < delta) {
        delta = flow_[pred_[u]];
        out_node = static_cast<long>(u);
        side = 1;
      }
    }
    for (std::size_t u = t; u != join; u = static_cast<std::size_t>(parent_[u])) {
      if (dir_[u] == kDown && flow_[pred_[u]] <= delta) {
        delta = flow_[pred_[u]];
        out_node = static_cast<long>(u);
        side = 2;
      }
    }
    if (out_node < 0) throw numerical_error("transport: unbounded cycle");

    if (delta > 0.0) {
      flow_[in] += delta;
      for (std::size_t u = s; u != join; u = static_cast<std::size_t>(parent_[u]))
        flow_[pred_[u]] -= dir_[u] * delta;
      for (std::size_t u = t; u != join; u = static_cast<std::size_t>(parent_[u]))
        flow_[pred_[u]] += dir_[u] * delta;
    }
    const std::size_t u_out = static_cast<std::size_t>(out_node);
    const std::size_t leaving = static_cast<std::size_t>(pred_[u_out]);
    flow_[leaving] = 0.0;
    if (leaving < real_arcs_) in_tree_[leaving] = 0;
    in_tree_[in] = 1;

    const std::size_t u_in = side == 1 ? s : t;
    const std::size_t v_in = side == 1 ? t : s;
    rehang(u_in, v_in, u_out, in);
  }

  void detach(std::size_t child, std::size_t par) {
    auto& c = children_[par];
    auto it = std::find(c.begin(), c.end(), static_cast<int>(child));
    *it = c.back();
    c.pop_back();
  }

  // Reverse the stem u_in .. u_out and hang the subtree below v_in through arc `in`.
  void rehang(std::size_t u_in, std::size_t v_in, std::size_t u_out, std::size_t in) {
    stem_.clear();
    for (std::size_t u = u_in;; u = static_cast<std::size_t>(parent_[u])) {
      stem_.push_back(u);
      if (u == u_out) break;
    }
    detach(u_out, static_cast<std::size_t>(parent_[u_out]));
    stem_pred_.resize(stem_.size());
    stem_dir_.resize(stem_.size());
    for (std::size_t k = 0; k < stem_.size(); ++k) {
      stem_pred_[k] = pred_[stem_[k]];
      stem_dir_[k] = dir_[stem_[k]];
    }
    for (std::size_t k = 0; k + 1 < stem_.size(); ++k) {
      const std::size_t w = stem_[k], up = stem_[k + 1];
      detach(w, up);
      parent_[up] = static_cast<int>(w);
      pred_[up] = stem_pred_[k];
      dir_[up] = -stem_dir_[k];
      children_[w].push_back(static_cast<int>(up));
    }
    parent_[u_in] = static_cast<int>(v_in);
    pred_[u_in] = static_cast<long>(in);
    dir_[u_in] = source(in) == u_in ? kUp : kDown;
    children_[v_in].push_back(static_cast<int>(u_in));

    const double target_pi = dir_[u_in] == kUp ? pi_[v_in] - arc_cost(in) : pi_[v_in] + arc_cost(in);
    const double sigma = target_pi - pi_[u_in];
    stack_.clear();
    stack_.push_back(static_cast<int>(u_in));
    depth_[u_in] = depth_[v_in] + 1;
    while (!stack_.empty()) {
      const int u = stack_.back();
      stack_.pop_back();
      pi_[u] += sigma;
      for (int c : children_[u]) {
        depth_[c] = depth_[u] + 1;
        stack_.push_back(c);
      }
    }
  }

  void recompute_potentials() {
    stack_.clear();
    pi_[root_] = 0.0;
    for (int c : children_[root_]) stack_.push_back(c);
    while (!stack_.empty()) {
      const int u = stack_.back();
      stack_.pop_back();
      const std::size_t p = static_cast<std::size_t>(parent_[u]);
      const double c = arc_cost(static_cast<std::size_t>(pred_[u]));
      pi_[u] = dir_[u] == kUp ? pi_[p] - c : pi_[p] + c;
      for (int ch : children_[u]) stack_.push_back(ch);
    }
  }

  std::size_t n_, m_, nodes_, root_, real_arcs_;
  const std::vector<double>& cost_;
  double max_cost_, art_cost_, eps_;
  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<double> art_cost_of_;
  std::vector<char> art_out_;
  std::vector<int> parent_;
  std::vector<long> pred_;
  std::vector<int> dir_;
  std::vector<int> depth_;
  std::vector<double> pi_;
  std::vector<std::vector<int>> children_;
  std::vector<std::size_t> stem_;
  std::vector<long> stem_pred_;
  std::vector<int> stem_dir_;
  std::vector<int> stack_;
  std::size_t block_;
  std::size_t next_arc_ = 0;
};

}  // namespace

TransportationSolution solve_transportation(const std::vector<double>& cost, const std::vector<double>& supply,
                                            const std::vector<double>& demand) {
  if (supply.empty() || demand.empty() || cost.size() != supply.size() * demand.size())
    throw std::invalid_argument("transport: inconsistent dimensions");
  return Solver(cost, supply, demand).run();
}

}  // namespace reflectcost::detail
