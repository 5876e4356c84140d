#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mmv {

/// Invalid argument or configuration value. The CLI maps it to exit code 2.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed experiment spec, metric string, or metric/prior mismatch.
class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical routine failed to reach its tolerance. Exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TracePoint {
    int iteration = 0;
    double change = 0.0;   // mean squared change of the estimate
    double delta_v = 0.0;  // aggregated scalar-channel variance
};

/// GAMP left the admissible region (nonpositive / non-finite variance, NaN estimate).
class DivergenceError : public NumericError {
public:
    DivergenceError(const std::string& what, std::vector<TracePoint> trace)
        : NumericError(what), trace_(std::move(trace)) {}

    const std::vector<TracePoint>& trace() const noexcept { return trace_; }

private:
    std::vector<TracePoint> trace_;
};

} // namespace mmv
