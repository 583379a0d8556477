#pragma once

#include <stdexcept>
#include <string>

namespace hymlab {

// A monad map lost injectivity/surjectivity at the evaluation point
// (true sheaf singularities end up here, they are not noise).
struct DegeneratePointError : std::domain_error {
    explicit DegeneratePointError(const std::string& msg) : std::domain_error(msg) {}
};

struct PreconditionError : std::invalid_argument {
    explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Quadrature / Monte-Carlo / solver failure.
struct ComputeError : std::runtime_error {
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hymlab
