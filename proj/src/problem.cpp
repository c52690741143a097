#include "ucp/problem.hpp"

#include <cmath>

namespace ucp {

void ProblemSpec::check_conforms(const ControllerSet& controllers) const {
  if (controllers.size() != stages())
    throw std::invalid_argument("controller set has " + std::to_string(controllers.size()) +
                                " stages, problem expects " + std::to_string(stages()));
  for (std::size_t m = 0; m < stages(); ++m) {
    if (!(controllers[m].grid == grids_[m]))
      throw std::invalid_argument("controller " + std::to_string(m) + " is not on the stage grid");
    if (!controllers[m].values.allFinite())
      throw std::invalid_argument("controller " + std::to_string(m) + " has non-finite values");
  }
}

}  // namespace ucp
