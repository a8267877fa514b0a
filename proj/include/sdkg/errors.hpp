#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sdkg {

// Bad arguments, bad configuration, violated preconditions.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Picard iteration failed to contract on one subinterval.
class SubintervalDivergence : public std::runtime_error {
public:
    SubintervalDivergence(int subinterval, double start_time, std::vector<double> residuals);

    int subinterval() const { return subinterval_; }
    double start_time() const { return start_time_; }
    const std::vector<double>& residuals() const { return residuals_; }

private:
    int subinterval_;
    double start_time_;
    std::vector<double> residuals_;
};

}  // namespace sdkg
