#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "cfisac/channel.hpp"
#include "cfisac/signal.hpp"

namespace cfisac {

/// Derivative blocks of the round-trip channel matrix G = beta_rt * a a^T
/// with respect to (range, angle, Re beta_rt, Im beta_rt). Plain transposes,
/// matching the a a^T round-trip structure.
struct ChannelJacobianBlocks {
    Eigen::MatrixXcd g_range;
    Eigen::MatrixXcd g_angle;
    Eigen::MatrixXcd g_re;
    Eigen::MatrixXcd g_im;

    const Eigen::MatrixXcd& block(int p) const {
        switch (p) {
            case 0: return g_range;
            case 1: return g_angle;
            case 2: return g_re;
            default: return g_im;
        }
    }
};

/// Sensing-side description of one AP-ST pair: exact spherical steering,
/// its analytic derivatives and the round-trip gain.
struct SensingLink {
    int ap = 0;
    LinkGeometry geom;
    Eigen::VectorXcd steering;  // exact spherical response
    cplx beta_rt = 0.0;         // squared complex one-way gain
    ChannelJacobianBlocks jac;
};

ChannelJacobianBlocks channel_jacobian_blocks(const LinkGeometry& link, cplx beta_rt,
                                              double frequency);

/// Builds the sensing link from AP m to the true position of ST s.
SensingLink make_sensing_link(const Scenario& scenario, const ChannelParams& params, int m, int s);

/// Per-AP 4x4 FIM via the trace forms: J_pq = (2T/N0) Re tr(G_q X G_p^H).
Eigen::Matrix4d per_ap_fim(const Eigen::MatrixXcd& transmit_cov, const ChannelJacobianBlocks& jac,
                           double n0, int slots);

/// Fisher blocks of one ST stacked over its participating APs.
struct FimBlocks {
    std::vector<int> aps;                   // participating AP indices
    std::vector<Eigen::Matrix4d> per_ap;    // aligned with aps
    double n0 = 0.0;
    int slots = 0;

    Eigen::MatrixXd j11() const;  // 2P x 2P block diagonal
    Eigen::MatrixXd j12() const;
    Eigen::MatrixXd j22() const;
};

struct CrbEntry {
    Eigen::MatrixXd crb;   // Schur-complement CRB of the geometric parameters
    double trace = 0.0;
    bool feasible = false;  // trace <= eps_th
};

struct CrbReport {
    std::vector<CrbEntry> per_st;
    double total_trace = 0.0;
};

/// Schur-complement CRB for one ST. Throws SingularFim when J22 or the Schur
/// complement is singular (target unobservable under this design).
CrbEntry crb_per_st(const FimBlocks& blocks, double eps_th);

/// Per-AP transmit covariances induced by a design:
/// X_m = sum_k delta_{m,k}^2 * (m-block of W_k or w_k w_k^H) + Q_m^sen.
std::vector<Eigen::MatrixXcd> transmit_covariances(const Scenario& scenario,
                                                   const IsacDesign& design,
                                                   const ApLayout& layout);

struct SensingConfig {
    double n0 = 1e-10;      // sensing noise power
    int slots = 64;         // coherence slots T
    double eps_th = 1e-2;   // CRB feasibility threshold
    double eps_phi = 1e-6;  // log-det regularizer
};

/// Exact Schur-complement CRB of every ST under the given design.
CrbReport evaluate_crb(const Scenario& scenario, const ChannelSet& channels,
                       const IsacDesign& design, const SensingConfig& config);

/// -log det(J11 + eps_phi I), natural logarithm.
double phi_logdet(const Eigen::MatrixXd& j11, double eps_phi);

/// Affine dependence of the stacked J11 of ST s on the lifted covariances:
/// J11 entry (block for AP aps[a], row p, col q) =
///   constant(a,p,q) + sum_k Re tr(coeff[a][p][q][k] * W_k).
/// The coefficients absorb the delta^2 weights and the 2T/N0 scale.
struct J11AffineMap {
    std::vector<int> aps;
    // constant[a] and coeff[a](p,q) per UE; coeff matrices are N_tot x N_tot
    // but nonzero only on the (m,m) block.
    std::vector<Eigen::Matrix2d> constant;
    std::vector<std::array<std::array<std::vector<Eigen::MatrixXcd>, 2>, 2>> coeff;

    int dim() const { return 2 * static_cast<int>(aps.size()); }
    /// Evaluates the map at given lifted covariances.
    Eigen::MatrixXd evaluate(const std::vector<Eigen::MatrixXcd>& lifted) const;
};

/// Builds the affine map of J11_s in the lifted covariances for fixed delta
/// (pilot contribution goes into the constant part).
J11AffineMap surrogate_fim_j11(const Scenario& scenario, const ChannelSet& channels,
                               const Eigen::MatrixXd& delta,
                               const std::vector<Eigen::MatrixXcd>& pilot_cov,
                               const Eigen::MatrixXi& st_mask, int s,
                               const SensingConfig& config);

}  // namespace cfisac
