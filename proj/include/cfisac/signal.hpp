#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cfisac/channel.hpp"
#include "cfisac/scenario.hpp"

namespace cfisac {

/// Antenna-index bookkeeping for the stacked multi-AP representation.
struct ApLayout {
    std::vector<int> offsets;
    std::vector<int> dims;
    int total = 0;

    static ApLayout from_scenario(const Scenario& scenario);
    Eigen::VectorXcd ap_block(const Eigen::VectorXcd& stacked, int m) const {
        return stacked.segment(offsets[m], dims[m]);
    }
};

/// Joint ISAC design: association weights, beamformers (stacked rank-one
/// and/or lifted covariances), sensing-pilot covariances and the fixed
/// sensing participation mask.
struct IsacDesign {
    Eigen::MatrixXd delta;                     // M x K, in [0,1]
    std::vector<Eigen::VectorXcd> beamformers; // per UE: stacked N_tot vector
    std::vector<Eigen::MatrixXcd> lifted;      // per UE: N_tot x N_tot covariance (may be empty)
    std::vector<Eigen::MatrixXcd> pilot_cov;   // per AP: N_m x N_m PSD
    Eigen::MatrixXi st_mask;                   // M x S

    bool has_beamformers() const { return !beamformers.empty(); }
    bool has_lifted() const { return !lifted.empty(); }
};

struct CommReport {
    Eigen::VectorXd sinr;             // per UE
    Eigen::VectorXd rate;             // bit/s
    Eigen::VectorXd interference_mu;  // per UE
    Eigen::VectorXd interference_si;  // per UE
    double total_power = 0.0;         // W
    double energy_efficiency = 0.0;   // bit/J
    double sum_rate = 0.0;            // bit/s
};

/// Thermal noise power in watts: -174 dBm/Hz + 10 log10(B) + F.
double noise_power(double bandwidth, double noise_figure_db);

/// Rank-one pilot covariances pointing at the ST prior centers. Each AP
/// splits the fraction rho_sen of P_max equally over its visible targets.
std::vector<Eigen::MatrixXcd> sensing_pilot_covariance(const Scenario& scenario,
                                                       const ChannelSet& channels,
                                                       const Eigen::MatrixXi& st_mask,
                                                       double rho_sen, double p_max);

/// Per-UE SINR. Uses the rank-one beamformers when present, otherwise the
/// lifted covariances via the trace forms.
Eigen::VectorXd sinr(const ChannelSet& channels, const Scenario& scenario,
                     const IsacDesign& design, double sigma2);

/// Sensing-pilot interference seen at UE k (uncorrelated pilots per AP).
double sensing_interference_at_ue(const ChannelSet& channels, const Scenario& scenario,
                                  const IsacDesign& design, int k);

CommReport comm_report(const ChannelSet& channels, const Scenario& scenario,
                       const IsacDesign& design, double sigma2, double bandwidth);

/// Transmit power of AP m: data beams plus pilot trace.
double ap_transmit_power(const IsacDesign& design, const ApLayout& layout, int m);

}  // namespace cfisac
