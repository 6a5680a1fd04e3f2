// High-level solving driver: accept or search a layout, split disconnected
// skeletons into weakly-connected components, solve each part with the
// width-parameterized solvers, and merge costs and witnesses.
#pragma once

#include <optional>

#include "soac/decomposition.hpp"
#include "soac/model.hpp"
#include "soac/oracle.hpp"

namespace soac {

struct SolveOptions {
  std::optional<SpanningTreeLayout> layout;  // bypasses the layout search
  std::optional<int> alpha;                  // engaged: min-max mode
  FindLayoutOptions layout_search;
  SearchBudget budget;
};

struct SolveReport {
  SolveResult result;
  int width = 0;  // largest layout width used across components
  int components = 0;
};

// Agents whose endpoints lie in different components cannot be routed: plain
// mode then yields Infinity, min-max mode charges each one against alpha and
// distributes the remaining budget over the components optimally.  A supplied
// layout must span the whole graph (its extra edges may bridge components)
// and is used directly, without splitting.
SolveReport solve_instance(const Instance& inst, const SolveOptions& opt = {});

}  // namespace soac
