#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfisac/conic.hpp"
#include "cfisac/fim.hpp"
#include "cfisac/rng.hpp"
#include "cfisac/signal.hpp"

namespace cfisac {

/// Configuration of the alternating design loop: BCD tolerances, thresholds,
/// proximal and regularization weights, recovery parameters.
struct B2sConfig {
    double gamma_th = 3.1622776601683795;  // 5 dB, linear
    double sigma2 = noise_power(5.0e9, 7.0);
    double p_max = 1.0;     // W per AP, data plus pilots
    double rho_sen = 0.1;   // pilot fraction of P_max
    SensingConfig sensing;
    double eps_bcd = 1e-3;
    int max_iter = 50;
    double tau_delta = 0.1;     // proximal weight of the association update
    double psi_weight = 0.0;    // weighted l1 regularizer on delta
    int randomization_samples = 50;
    double bin_threshold = 0.5;  // ties map to 1
    Eigen::VectorXd slack_penalty;  // per-UE; empty means all ones
    conic::SolverOptions solver;
};

/// Beamforming subproblem: lifted covariances W_k, optional per-UE slacks.
struct BeamformingSdp {
    conic::ConicProblem problem;
    bool with_slack = false;
    int num_ues = 0;
    int n_tot = 0;
};

/// Association subproblem over the unmasked delta entries.
struct DeltaProblem {
    conic::ConicProblem problem;
    std::vector<std::pair<int, int>> vars;  // (m, k) per scalar, masked entries excluded
};

struct B2sIteration {
    int iter = 0;
    double objective = 0.0;  // surrogate sensing objective after the iteration
    conic::SolveStatus stage1_status = conic::SolveStatus::NumericalFailure;
    conic::SolveStatus stage2_status = conic::SolveStatus::NumericalFailure;
    bool slack_used = false;
    double sinr_residual = 0.0;  // worst SINR-row violation of the lifted solution
    double stage1_seconds = 0.0;
    double stage2_seconds = 0.0;
};

struct B2sTrace {
    double initial_objective = 0.0;
    std::vector<B2sIteration> iterations;
    std::string final_status;
};

struct RecoveryReport {
    bool used_randomization = false;
    bool failed = false;  // no SINR-feasible candidate found
    std::vector<double> eig_ratio;  // lambda_2 / lambda_1 per UE
};

/// Exact a-posteriori audit of the final binary design.
struct VerifyReport {
    Eigen::VectorXd sinr;
    Eigen::VectorXd sinr_margin;  // gamma_k - gamma_th
    std::vector<double> crb_trace;
    std::vector<bool> crb_feasible;
    Eigen::VectorXd ap_power;
    Eigen::VectorXd power_margin;  // p_max - power_m
    bool sinr_ok = false;
    bool crb_ok = false;
    bool power_ok = false;
};

struct B2sResult {
    IsacDesign design;               // binary delta, rank-one beamformers
    Eigen::MatrixXd delta_relaxed;   // converged fractional association
    std::vector<Eigen::MatrixXcd> lifted;
    RecoveryReport recovery;
    VerifyReport verify;
    B2sTrace trace;
};

/// Surrogate sensing objective sum_s -log det(J11_s(design) + eps_phi I)
/// evaluated at the given association weights and lifted covariances.
double surrogate_objective(const Scenario& scenario, const ChannelSet& channels,
                           const Eigen::MatrixXd& delta,
                           const std::vector<Eigen::MatrixXcd>& lifted,
                           const std::vector<Eigen::MatrixXcd>& pilot_cov,
                           const Eigen::MatrixXi& st_mask, const SensingConfig& sensing);

/// Builds the beamforming semidefinite subproblem at fixed delta: minimize
/// the surrogate sensing objective (plus slack penalties when enabled)
/// subject to affine SINR rows, per-AP power rows and the per-target
/// information LMIs. Throws B2sInfeasible when some UE has no visible AP.
BeamformingSdp build_beamforming_sdp(const Scenario& scenario, const ChannelSet& channels,
                                     const Eigen::MatrixXd& delta,
                                     const std::vector<Eigen::MatrixXcd>& pilot_cov,
                                     const Eigen::MatrixXi& st_mask, const B2sConfig& config,
                                     bool with_slack);

/// Builds the convex association subproblem at fixed beamformers: proximal
/// surrogate sensing objective, linearized difference-of-convex SINR rows
/// (second-order parts as small LMIs), tangent-minorant sensing LMIs and the
/// box 0 <= delta <= visibility.
DeltaProblem build_association_subproblem(const Scenario& scenario, const ChannelSet& channels,
                                          const std::vector<Eigen::VectorXcd>& beams,
                                          const std::vector<Eigen::MatrixXcd>& lifted,
                                          const Eigen::MatrixXd& delta_prev,
                                          const Eigen::MatrixXi& ue_mask,
                                          const std::vector<Eigen::MatrixXcd>& pilot_cov,
                                          const Eigen::MatrixXi& st_mask, const B2sConfig& config);

/// Rank-one beamformer recovery: principal eigenvector when every lifted
/// covariance is numerically rank one, otherwise Gaussian randomization with
/// per-AP power-ball projection and best-feasible selection.
std::vector<Eigen::VectorXcd> recover_rank_one(const std::vector<Eigen::MatrixXcd>& lifted,
                                               const Scenario& scenario,
                                               const ChannelSet& channels,
                                               const Eigen::MatrixXd& delta,
                                               const std::vector<Eigen::MatrixXcd>& pilot_cov,
                                               const Eigen::MatrixXi& st_mask,
                                               const B2sConfig& config, RngStream& rng,
                                               RecoveryReport& report);

/// Thresholds delta at config.bin_threshold (ties map to 1), greedily
/// re-enables the strongest masked AP of each SINR-failing UE, then audits
/// exact SINR, exact Schur-complement CRB and per-AP power.
std::pair<IsacDesign, VerifyReport> binarize_and_verify(
    const Eigen::MatrixXd& delta_star, const std::vector<Eigen::VectorXcd>& beams,
    const std::vector<Eigen::MatrixXcd>& pilot_cov, const Eigen::MatrixXi& ue_mask,
    const Eigen::MatrixXi& st_mask, const Scenario& scenario, const ChannelSet& channels,
    const B2sConfig& config);

/// Full alternating loop: beamforming update, association update, stopping
/// on relative objective change, rank-one recovery, binarization and exact
/// verification. Deterministic in (inputs, seed).
B2sResult run_b2s(const Scenario& scenario, const ChannelSet& channels,
                  const VisibilityMask& mask, const B2sConfig& config, uint64_t seed,
                  const std::optional<std::vector<Eigen::VectorXcd>>& warm_start = std::nullopt);

}  // namespace cfisac
