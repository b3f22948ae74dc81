#pragma once

#include <cstddef>
#include <vector>

namespace reflectcost::detail {

struct TransportationSolution {
  std::vector<double> flow;  // row-major n x m
  std::vector<double> u;     // supply-side potentials
  std::vector<double> v;     // demand-side potentials
  std::size_t pivots = 0;
};

/// Network simplex on the complete bipartite graph; cost is row-major n x m.
TransportationSolution solve_transportation(const std::vector<double>& cost, const std::vector<double>& supply,
                                            const std::vector<double>& demand);

}  // namespace reflectcost::detail
