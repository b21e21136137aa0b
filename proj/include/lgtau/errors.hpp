#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lgtau {

/// Enumeration budget or similar resource cap exceeded.
class ResourceLimitError : public std::runtime_error {
public:
    ResourceLimitError(const std::string &what, double required)
        : std::runtime_error(what), required_(required)
    {
    }
    /// The budget that would have been needed.
    double required() const noexcept { return required_; }

private:
    double required_;
};

/// Iterative solver failed to converge; carries the residual history.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string &what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history))
    {
    }
    const std::vector<double> &history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// The conformal map stopped being locally univalent.
class GeometryError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quadrature or time-step resolution insufficient.
class ResolutionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two independent routes to the same quantity disagree.
class ConsistencyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation requested beyond the finite-time singularity.
class SingularityError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lgtau
