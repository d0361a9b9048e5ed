#include "cbo/label_dp.hpp"

#include <algorithm>
#include <optional>

#include "cbo/error.hpp"

namespace cbo {

namespace {

std::optional<Millis> admit(const GraphNode& node, Millis arrive) {
  if (arrive < node.earliest) {
    if (!node.can_wait) return std::nullopt;
    arrive = node.earliest;
  }
  const Millis done = arrive + node.service;
  if (done > node.latest) return std::nullopt;
  return done;
}

using LevelLabels = std::vector<std::vector<OptLabel>>;

class PathRecovery {
 public:
  explicit PathRecovery(const std::vector<LevelLabels>& labels) : labels_(labels) {}

  // Node indices for levels 0..level, ending at (level, node, label).
  std::vector<std::int32_t> path(std::size_t level, std::int32_t node, std::int32_t label) const {
    std::vector<std::int32_t> out(level + 1);
    for (std::size_t l = level + 1; l-- > 0;) {
      out[l] = node;
      const auto& lab = labels_[l][static_cast<std::size_t>(node)][static_cast<std::size_t>(label)];
      node = lab.parent_node;
      label = lab.parent_label;
    }
    return out;
  }

  // Path of a candidate whose parent lives at `level - 1`.
  std::vector<std::int32_t> candidate_path(std::size_t level, std::int32_t node,
                                           const OptLabel& candidate) const {
    std::vector<std::int32_t> out;
    if (level > 0) out = path(level - 1, candidate.parent_node, candidate.parent_label);
    out.push_back(node);
    return out;
  }

 private:
  const std::vector<LevelLabels>& labels_;
};

}  // namespace

LayeredSolution solve_layered(const LayeredGraph& graph, const LabelOptions& options) {
  const std::size_t n = graph.levels.size();
  for (const auto& level : graph.levels) {
    if (level.empty()) throw InvalidArgument("solve_layered: empty level");
  }

  // Earlier is never worse only when every window lets a path wait. With
  // hard (no-wait) windows only exact duplicates can be merged.
  bool monotone = graph.end.can_wait;
  for (const auto& level : graph.levels) {
    for (const auto& node : level) monotone = monotone && node.can_wait;
  }

  LayeredSolution solution;
  solution.stats.labels_per_node.resize(n);
  std::vector<LevelLabels> labels(n);
  const PathRecovery recovery(labels);

  const GraphNode start_node{};  // exit duration 0
  const OptLabel start_label{graph.start_time, 0, -1, -1};

  // Generates every admissible successor label of `target` from the labels of
  // the previous level (or the start node).
  auto expand = [&](std::size_t level, const GraphNode& target) {
    std::vector<OptLabel> out;
    auto extend = [&](const GraphNode& from, const OptLabel& label, std::int32_t node,
                      std::int32_t idx) {
      const auto done = admit(target, label.time + from.exit_duration);
      if (!done) return;
      out.push_back(OptLabel{*done, label.cost + target.cost, node, idx});
    };
    if (level == 0) {
      extend(start_node, start_label, -1, -1);
    } else {
      const auto& prev = labels[level - 1];
      for (std::size_t u = 0; u < prev.size(); ++u) {
        for (std::size_t k = 0; k < prev[u].size(); ++k) {
          extend(graph.levels[level - 1][u], prev[u][k], static_cast<std::int32_t>(u),
                 static_cast<std::int32_t>(k));
        }
      }
    }
    solution.stats.labels_created += out.size();
    return out;
  };

  for (std::size_t level = 0; level < n; ++level) {
    const auto& nodes = graph.levels[level];
    labels[level].resize(nodes.size());
    solution.stats.labels_per_node[level].resize(nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v) {
      const auto node_index = static_cast<std::int32_t>(v);
      auto candidates = expand(level, nodes[v]);
      auto& kept = labels[level][v];

      if (!options.prune_dominated) {
        kept = std::move(candidates);
      } else {
        std::stable_sort(candidates.begin(), candidates.end(), [](const auto& x, const auto& y) {
          return x.time != y.time ? x.time < y.time : x.cost < y.cost;
        });
        for (std::size_t i = 0; i < candidates.size();) {
          // Exact (time, cost) duplicates: keep the lexicographically smallest path.
          std::size_t j = i + 1;
          std::size_t best = i;
          if (j < candidates.size() && candidates[j].time == candidates[i].time &&
              candidates[j].cost == candidates[i].cost) {
            auto best_path = recovery.candidate_path(level, node_index, candidates[i]);
            for (; j < candidates.size() && candidates[j].time == candidates[i].time &&
                   candidates[j].cost == candidates[i].cost;
                 ++j) {
              auto p = recovery.candidate_path(level, node_index, candidates[j]);
              if (p < best_path) {
                best_path = std::move(p);
                best = j;
              }
            }
          }
          if (!monotone || kept.empty() || candidates[best].cost < kept.back().cost) {
            kept.push_back(candidates[best]);
          }
          i = j;
        }
      }
      solution.stats.labels_per_node[level][v] = kept.size();
      solution.stats.max_labels_per_node = std::max(solution.stats.max_labels_per_node, kept.size());
    }
  }

  // End node: minimum cost, then lexicographically smallest path.
  auto finals = expand(n, graph.end);
  if (finals.empty()) return solution;

  std::size_t best = 0;
  for (std::size_t i = 1; i < finals.size(); ++i) {
    if (finals[i].cost < finals[best].cost) best = i;
  }
  std::vector<std::int32_t> best_path;
  if (n > 0) best_path = recovery.path(n - 1, finals[best].parent_node, finals[best].parent_label);
  for (std::size_t i = best + 1; i < finals.size(); ++i) {
    if (finals[i].cost != finals[best].cost || n == 0) continue;
    auto p = recovery.path(n - 1, finals[i].parent_node, finals[i].parent_label);
    if (p < best_path) {
      best_path = std::move(p);
      best = i;
    }
  }

  solution.feasible = true;
  solution.cost = finals[best].cost;
  solution.end_time = finals[best].time;
  solution.path.assign(best_path.begin(), best_path.end());
  return solution;
}

}  // namespace cbo
