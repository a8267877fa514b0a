#include "sdkg/errors.hpp"

#include <utility>

namespace sdkg {

SubintervalDivergence::SubintervalDivergence(int subinterval, double start_time,
                                             std::vector<double> residuals)
    : std::runtime_error("Picard iteration did not contract on subinterval " +
                         std::to_string(subinterval) + " starting at t = " +
                         std::to_string(start_time)),
      subinterval_(subinterval),
      start_time_(start_time),
      residuals_(std::move(residuals)) {}

}  // namespace sdkg
