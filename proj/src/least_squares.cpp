#include "spp/least_squares.hpp"

#include <cmath>
#include <vector>

#include <ceres/ceres.h>

#include "spp/error.hpp"

namespace spp {

namespace {

// One parameter block holding the whole vector; residuals and Jacobian come
// from the problem's callbacks.
class CallbackCost final : public ceres::CostFunction {
public:
    CallbackCost(const LeastSquaresProblem& problem, int n_params) : problem_(problem) {
        set_num_residuals(static_cast<int>(problem.n_residuals));
        mutable_parameter_block_sizes()->push_back(n_params);
        params_.resize(n_params);
        residuals_.resize(problem.n_residuals);
        jacobian_.resize(problem.n_residuals, n_params);
    }

    bool Evaluate(double const* const* parameters, double* residuals,
                  double** jacobians) const override {
        const Eigen::Index n = params_.size();
        for (Eigen::Index j = 0; j < n; ++j) {
            params_[j] = parameters[0][j];
        }
        problem_.residuals(params_, residuals_);
        if (!residuals_.allFinite()) {
            return false;
        }
        Eigen::Map<Eigen::VectorXd>(residuals, residuals_.size()) = residuals_;
        if (jacobians != nullptr && jacobians[0] != nullptr) {
            problem_.jacobian(params_, jacobian_);
            using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
            Eigen::Map<RowMajor>(jacobians[0], jacobian_.rows(), jacobian_.cols()) = jacobian_;
        }
        return true;
    }

private:
    const LeastSquaresProblem& problem_;
    // Scratch space; Ceres evaluates one cost function from a single thread.
    mutable Eigen::VectorXd params_;
    mutable Eigen::VectorXd residuals_;
    mutable Eigen::MatrixXd jacobian_;
};

// An optimum on a bound is only approached asymptotically. A parameter within
// the step tolerance of a bound whose cost gradient points out of the box is
// moved onto it.
void snap_to_active_bounds(const LeastSquaresProblem& problem, Eigen::VectorXd& params,
                           double tolerance) {
    Eigen::VectorXd r(problem.n_residuals);
    Eigen::MatrixXd jac(problem.n_residuals, params.size());
    problem.residuals(params, r);
    problem.jacobian(params, jac);
    const Eigen::VectorXd gradient = jac.transpose() * r;
    for (Eigen::Index j = 0; j < params.size(); ++j) {
        const double lo = problem.lower[j];
        const double hi = problem.upper[j];
        if (std::isfinite(lo) && params[j] - lo <= tolerance * (1.0 + std::abs(lo)) &&
            gradient[j] > 0.0) {
            params[j] = lo;
        } else if (std::isfinite(hi) && hi - params[j] <= tolerance * (1.0 + std::abs(hi)) &&
                   gradient[j] < 0.0) {
            params[j] = hi;
        }
    }
}

}  // namespace

LeastSquaresResult solve_least_squares(const LeastSquaresProblem& problem,
                                       Eigen::VectorXd initial,
                                       const LeastSquaresOptions& options) {
    const Eigen::Index n = initial.size();
    if (problem.lower.size() != n || problem.upper.size() != n) {
        throw DomainError("least squares: bound vectors do not match the parameter count");
    }
    if (problem.n_residuals < n) {
        throw InsufficientDataError("least squares: fewer residuals than parameters");
    }

    LeastSquaresResult result;
    result.params = initial.cwiseMax(problem.lower).cwiseMin(problem.upper);

    const auto pinned = [&](Eigen::Index j) {
        return result.params[j] <= problem.lower[j] || result.params[j] >= problem.upper[j];
    };

    // Projected LM can stop with a parameter on its bound before the free
    // ones have settled; a second pass holds the pinned ones constant.
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<int> fixed;
        if (pass == 1) {
            for (Eigen::Index j = 0; j < n; ++j) {
                if (pinned(j)) {
                    fixed.push_back(static_cast<int>(j));
                }
            }
            if (fixed.empty() || static_cast<Eigen::Index>(fixed.size()) == n) {
                break;
            }
        }

        ceres::Problem::Options problem_options;
        problem_options.cost_function_ownership = ceres::TAKE_OWNERSHIP;
        ceres::Problem solver_problem(problem_options);
        double* x = result.params.data();
        solver_problem.AddResidualBlock(new CallbackCost(problem, static_cast<int>(n)), nullptr, x);
        if (!fixed.empty()) {
            solver_problem.SetParameterization(
                x, new ceres::SubsetParameterization(static_cast<int>(n), fixed));
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::isfinite(problem.lower[j])) {
                solver_problem.SetParameterLowerBound(x, static_cast<int>(j), problem.lower[j]);
            }
            if (std::isfinite(problem.upper[j])) {
                solver_problem.SetParameterUpperBound(x, static_cast<int>(j), problem.upper[j]);
            }
        }

        ceres::Solver::Options solver_options;
        solver_options.trust_region_strategy_type = ceres::LEVENBERG_MARQUARDT;
        solver_options.linear_solver_type = ceres::DENSE_QR;
        solver_options.use_nonmonotonic_steps = false;
        solver_options.max_num_iterations = options.max_iterations;
        solver_options.parameter_tolerance = options.relative_step_tolerance;
        solver_options.function_tolerance = 1e-15;
        solver_options.gradient_tolerance = 1e-16;
        solver_options.initial_trust_region_radius = 1.0 / options.initial_damping;
        solver_options.logging_type = ceres::SILENT;
        solver_options.minimizer_progress_to_stdout = false;
        solver_options.num_threads = 1;

        ceres::Solver::Summary summary;
        ceres::Solve(solver_options, &solver_problem, &summary);
        if (summary.termination_type == ceres::FAILURE) {
            throw FitFailure("least squares: " + summary.message);
        }
        const int steps = static_cast<int>(summary.iterations.size()) - 1;
        if (pass == 0) {
            result.iterations = steps;
            result.converged = summary.termination_type == ceres::CONVERGENCE;
            snap_to_active_bounds(problem, result.params, options.relative_step_tolerance);
        } else {
            result.iterations += steps;
            result.converged = result.converged && summary.termination_type == ceres::CONVERGENCE;
        }
    }

    Eigen::VectorXd r(problem.n_residuals);
    Eigen::MatrixXd jac(problem.n_residuals, n);
    problem.residuals(result.params, r);
    problem.jacobian(result.params, jac);
    result.cost = r.squaredNorm();

    result.at_bound.resize(n);
    std::vector<Eigen::Index> off_bound;
    for (Eigen::Index j = 0; j < n; ++j) {
        result.at_bound[j] = pinned(j);
        if (!result.at_bound[j]) {
            off_bound.push_back(j);
        }
    }
    result.covariance = Eigen::MatrixXd::Zero(n, n);
    if (!off_bound.empty()) {
        const auto m = static_cast<Eigen::Index>(off_bound.size());
        Eigen::MatrixXd free_jac(problem.n_residuals, m);
        for (Eigen::Index k = 0; k < m; ++k) {
            free_jac.col(k) = jac.col(off_bound[static_cast<std::size_t>(k)]);
        }
        const Eigen::MatrixXd inv = (free_jac.transpose() * free_jac)
                                        .completeOrthogonalDecomposition()
                                        .pseudoInverse();
        for (Eigen::Index a = 0; a < m; ++a) {
            for (Eigen::Index b = 0; b < m; ++b) {
                result.covariance(off_bound[static_cast<std::size_t>(a)],
                                  off_bound[static_cast<std::size_t>(b)]) = inv(a, b);
            }
        }
    }
    return result;
}

}  // namespace spp
