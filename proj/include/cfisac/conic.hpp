#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cfisac/channel.hpp"

namespace cfisac {
namespace conic {

/// Real parameterization of a Hermitian n x n matrix: n diagonal entries
/// followed by (re, im) pairs for every i < j in row-major pair order.
/// Total n*n real parameters.
int herm_param_count(int n);
Eigen::MatrixXcd herm_from_params(const Eigen::Ref<const Eigen::VectorXd>& params, int n);
Eigen::VectorXd herm_to_params(const Eigen::MatrixXcd& mat);

/// Coefficient vector of the linear functional X -> Re tr(C X) in the
/// Hermitian parameterization (C need not be Hermitian).
Eigen::VectorXd trace_functional(const Eigen::MatrixXcd& c);

/// Hermitian-valued affine map M(x) = constant + sum_t x[terms[t].first] * terms[t].second.
struct AffineMatrixMap {
    Eigen::MatrixXcd constant;
    std::vector<std::pair<int, Eigen::MatrixXcd>> terms;

    int dim() const { return static_cast<int>(constant.rows()); }
    Eigen::MatrixXcd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct LinearConstraint {
    Eigen::VectorXd coeff;  // dense over the full parameter vector
    double rhs = 0.0;
};

/// Small-scale conic problem over Hermitian PSD matrix variables and free
/// scalars: linear (+ optional convex quadratic) objective, -log det terms,
/// scalar affine constraints and linear matrix inequalities.
struct ConicProblem {
    std::vector<int> mat_dims;   // each variable is Hermitian PSD of this dim
    int num_scalars = 0;

    Eigen::VectorXd lin_cost;                  // may be empty (= zero)
    std::optional<Eigen::MatrixXd> quad_cost;  // adds 0.5 x^T Q x, Q PSD
    std::vector<AffineMatrixMap> logdet_terms; // adds -log det(M_d(x))
    std::vector<LinearConstraint> ineqs;       // coeff . x <= rhs
    std::vector<LinearConstraint> eqs;         // coeff . x == rhs
    std::vector<AffineMatrixMap> lmis;         // M(x) >= 0
    std::vector<int> nonneg_scalars;           // scalar indices forced >= 0

    int param_offset(int var) const;
    int scalar_offset() const;
    int num_params() const;
    /// Extracts matrix variable var from the parameter vector.
    Eigen::MatrixXcd matrix_value(const Eigen::Ref<const Eigen::VectorXd>& x, int var) const;
    /// Writes a Hermitian value into the parameter vector.
    void set_matrix(Eigen::Ref<Eigen::VectorXd> x, int var, const Eigen::MatrixXcd& value) const;
};

enum class SolveStatus { Optimal, Infeasible, MaxIter, NumericalFailure };

struct ConicSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    double kkt_stationarity = 0.0;  // scaled Newton residual at the final center
    double kkt_feasibility = 0.0;   // worst constraint violation
    double duality_gap = 0.0;       // barrier gap m / t
    double complementarity = 0.0;   // worst lambda_i * slack_i
    int iterations = 0;             // total Newton steps
    std::string message;
};

struct SolverOptions {
    double tol = 1e-6;
    int max_iter = 200;
    double infeas_margin = 1e-8;
    double t_init = 1.0;
    double mu = 10.0;
};

/// Log-barrier interior-point solve. Phase I finds a strictly feasible point
/// (or an infeasibility certificate); phase II follows the central path until
/// the barrier gap drops below tol.
ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});

/// Euclidean projection of a per-AP beamformer group onto the power ball
/// sum_k ||w_k||^2 <= budget: radial scaling, the exact minimizer.
std::vector<Eigen::VectorXcd> project_power_ball(const std::vector<Eigen::VectorXcd>& beams,
                                                 double budget);

/// Elementwise clamp of association weights to [0, xi].
Eigen::MatrixXd box_project(const Eigen::MatrixXd& delta_raw, const Eigen::MatrixXd& xi);

/// Plain-text dump for debugging.
std::string describe(const ConicProblem& problem);

}  // namespace conic
}  // namespace cfisac
