#pragma once

// Bounded weighted least squares through Ceres' Levenberg-Marquardt trust
// region, with the parameter covariance the fits report.

#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace spp {

struct LeastSquaresProblem {
    /// Fills `residuals` (already sized) with weighted residuals at `params`.
    std::function<void(const Eigen::VectorXd& params, Eigen::VectorXd& residuals)> residuals;
    /// Fills `jacobian` (residuals x params) of the weighted residuals.
    std::function<void(const Eigen::VectorXd& params, Eigen::MatrixXd& jacobian)> jacobian;
    Eigen::Index n_residuals = 0;
    Eigen::VectorXd lower;  // may be -inf
    Eigen::VectorXd upper;  // may be +inf
};

struct LeastSquaresOptions {
    int max_iterations = 200;
    double relative_step_tolerance = 1e-10;
    double initial_damping = 1e-3;
};

struct LeastSquaresResult {
    Eigen::VectorXd params;
    double cost = 0.0;  // sum of squared weighted residuals
    int iterations = 0;
    bool converged = false;
    /// (J^T J)^-1 over the parameters off their bounds; rows/cols of
    /// parameters pinned at a bound are zero.
    Eigen::MatrixXd covariance;
    Eigen::Array<bool, Eigen::Dynamic, 1> at_bound;
};

/// Monotone: every accepted step lowers the cost. Stops when the relative step
/// falls below the tolerance, or after max_iterations (converged = false).
LeastSquaresResult solve_least_squares(const LeastSquaresProblem& problem,
                                       Eigen::VectorXd initial,
                                       const LeastSquaresOptions& options = {});

}  // namespace spp
