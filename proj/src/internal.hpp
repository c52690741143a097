#pragma once

#include "ucp/problem.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace ucp::detail {

inline std::vector<Grid> build_grids(const std::vector<GridSpec>& specs, std::size_t expected, const char* problem) {
  if (specs.size() != expected)
    throw std::invalid_argument(std::string(problem) + ": expected " + std::to_string(expected) + " stage grids, got " +
                                std::to_string(specs.size()));
  std::vector<Grid> grids;
  for (const auto& s : specs) grids.push_back(s.make());
  return grids;
}

}  // namespace ucp::detail
