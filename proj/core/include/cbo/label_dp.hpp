#ifndef CBO_LABEL_DP_HPP_
#define CBO_LABEL_DP_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cbo/time.hpp"

namespace cbo {

// Node of a layered time-window graph. A path entering the node at time t
// (predecessor time plus the predecessor's exit duration) is admitted iff,
// after optionally waiting until `earliest` and then spending `service`,
// its time lies in [earliest + service, latest].
struct GraphNode {
  Millis earliest{-kNoTime.count};
  Millis latest{kNoTime};
  Millis service{};
  // Added to every edge that leaves this node.
  Millis exit_duration{};
  std::int64_t cost{0};
  // If false, arriving before `earliest` is infeasible instead of waiting.
  bool can_wait{true};
};

// Start node (time `start_time`, zero cost) -> levels[0] -> ... -> levels[n-1]
// -> end node. Every node of a level is connected to every node of the next.
struct LayeredGraph {
  Millis start_time{};
  std::vector<std::vector<GraphNode>> levels;
  GraphNode end{};
};

struct OptLabel {
  Millis time;
  std::int64_t cost;
  // Predecessor: node and label index in the previous level (-1 at level 0).
  std::int32_t parent_node;
  std::int32_t parent_label;
};

struct LabelOptions {
  // Disabling is only meant for tests: label sets then grow exponentially.
  bool prune_dominated{true};
};

struct LabelStats {
  std::size_t labels_created{0};
  std::size_t max_labels_per_node{0};
  // For every (level, node): label count after pruning.
  std::vector<std::vector<std::size_t>> labels_per_node;
};

struct LayeredSolution {
  bool feasible{false};
  std::int64_t cost{0};
  Millis end_time{};
  // Chosen node index per level.
  std::vector<std::size_t> path;
  LabelStats stats;
};

// Least-cost start->end path visiting every level once within the node
// windows. When every node can wait, labels are pruned by Pareto dominance on
// (time, cost); with hard windows only exact (time, cost) duplicates merge.
// Among exact ties the path that is lexicographically smallest by node index
// is kept.
LayeredSolution solve_layered(const LayeredGraph& graph, const LabelOptions& options = {});

}  // namespace cbo

#endif  // CBO_LABEL_DP_HPP_
