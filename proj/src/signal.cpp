#include "cfisac/signal.hpp"

#include <cmath>

#include "cfisac/errors.hpp"

namespace cfisac {

ApLayout ApLayout::from_scenario(const Scenario& scenario) {
    ApLayout layout;
    layout.offsets.reserve(scenario.num_aps());
    layout.dims.reserve(scenario.num_aps());
    int off = 0;
    for (int m = 0; m < scenario.num_aps(); ++m) {
        layout.offsets.push_back(off);
        layout.dims.push_back(scenario.ap_arrays[m].num_antennas);
        off += scenario.ap_arrays[m].num_antennas;
    }
    layout.total = off;
    return layout;
}

double noise_power(double bandwidth, double noise_figure_db) {
    if (bandwidth <= 0.0) throw DomainError("noise_power: bandwidth must be positive");
    double dbm = -174.0 + 10.0 * std::log10(bandwidth) + noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

std::vector<Eigen::MatrixXcd> sensing_pilot_covariance(const Scenario& scenario,
                                                       const ChannelSet& channels,
                                                       const Eigen::MatrixXi& st_mask,
                                                       double rho_sen, double p_max) {
    if (rho_sen < 0.0 || rho_sen >= 1.0)
        throw DomainError("sensing_pilot_covariance: rho_sen must be in [0,1)");
    std::vector<Eigen::MatrixXcd> pilots;
    pilots.reserve(scenario.num_aps());
    for (int m = 0; m < scenario.num_aps(); ++m) {
        const int n_ant = scenario.ap_arrays[m].num_antennas;
        Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n_ant, n_ant);
        int visible = 0;
        for (int s = 0; s < scenario.num_sts(); ++s) visible += st_mask(m, s);
        if (visible > 0 && rho_sen > 0.0) {
            double per_target_power = rho_sen * p_max / visible;
            for (int s = 0; s < scenario.num_sts(); ++s) {
                if (!st_mask(m, s)) continue;
                // Pilot points at the prior center with the exact spherical phase.
                LinkGeometry geom = make_link_geometry(scenario.ap_positions[m],
                                                       scenario.ap_arrays[m],
                                                       scenario.st_regions[s].center);
                Eigen::VectorXcd a =
                    steering_vector(geom, FieldRegime::Near, channels.params.frequency);
                q += (per_target_power / n_ant) * (a * a.adjoint());
            }
        }
        pilots.push_back(q);
    }
    return pilots;
}

double sensing_interference_at_ue(const ChannelSet& channels, const Scenario& scenario,
                                  const IsacDesign& design, int k) {
    double acc = 0.0;
    for (int m = 0; m < scenario.num_aps(); ++m) {
        if (design.pilot_cov.empty()) break;
        const Eigen::VectorXcd& h = channels.ue_link(m, k).channel;
        acc += (h.adjoint() * design.pilot_cov[m] * h).real()(0, 0);
    }
    return std::max(acc, 0.0);
}

namespace {

/// Stacked channel of UE k with the association weights of column j applied.
Eigen::VectorXcd masked_stacked_channel(const ChannelSet& channels, const Scenario& scenario,
                                        const ApLayout& layout, const Eigen::MatrixXd& delta,
                                        int k, int j) {
    Eigen::VectorXcd h(layout.total);
    for (int m = 0; m < scenario.num_aps(); ++m) {
        h.segment(layout.offsets[m], layout.dims[m]) =
            delta(m, j) * channels.ue_link(m, k).channel;
    }
    return h;
}

}  // namespace

Eigen::VectorXd sinr(const ChannelSet& channels, const Scenario& scenario,
                     const IsacDesign& design, double sigma2) {
    if (sigma2 <= 0.0) throw DomainError("sinr: noise power must be positive");
    const int num_ues = scenario.num_ues();
    ApLayout layout = ApLayout::from_scenario(scenario);
    Eigen::VectorXd gamma(num_ues);
    for (int k = 0; k < num_ues; ++k) {
        double signal = 0.0;
        double interference = 0.0;
        for (int j = 0; j < num_ues; ++j) {
            Eigen::VectorXcd h = masked_stacked_channel(channels, scenario, layout, design.delta, k, j);
            double power;
            if (design.has_beamformers()) {
                cplx inner = h.dot(design.beamformers[j]);  // conjugate dot
                power = std::norm(inner);
            } else if (design.has_lifted()) {
                power = (h.adjoint() * design.lifted[j] * h).real()(0, 0);
            } else {
                power = 0.0;
            }
            if (j == k)
                signal = power;
            else
                interference += power;
        }
        double si = sensing_interference_at_ue(channels, scenario, design, k);
        gamma[k] = signal / (interference + si + sigma2);
    }
    return gamma;
}

double ap_transmit_power(const IsacDesign& design, const ApLayout& layout, int m) {
    double power = 0.0;
    if (design.has_beamformers()) {
        for (const auto& w : design.beamformers)
            power += w.segment(layout.offsets[m], layout.dims[m]).squaredNorm();
    } else if (design.has_lifted()) {
        for (const auto& w : design.lifted)
            power += w.block(layout.offsets[m], layout.offsets[m], layout.dims[m], layout.dims[m])
                         .trace()
                         .real();
    }
    if (!design.pilot_cov.empty()) power += design.pilot_cov[m].trace().real();
    return power;
}

CommReport comm_report(const ChannelSet& channels, const Scenario& scenario,
                       const IsacDesign& design, double sigma2, double bandwidth) {
    CommReport report;
    report.sinr = sinr(channels, scenario, design, sigma2);
    const int num_ues = scenario.num_ues();
    ApLayout layout = ApLayout::from_scenario(scenario);
    report.rate.resize(num_ues);
    report.interference_mu.resize(num_ues);
    report.interference_si.resize(num_ues);
    for (int k = 0; k < num_ues; ++k) {
        report.rate[k] = bandwidth * std::log2(1.0 + report.sinr[k]);
        report.interference_si[k] = sensing_interference_at_ue(channels, scenario, design, k);
        double mu = 0.0;
        for (int j = 0; j < num_ues; ++j) {
            if (j == k) continue;
            Eigen::VectorXcd h = masked_stacked_channel(channels, scenario, layout, design.delta, k, j);
            if (design.has_beamformers())
                mu += std::norm(h.dot(design.beamformers[j]));
            else if (design.has_lifted())
                mu += (h.adjoint() * design.lifted[j] * h).real()(0, 0);
        }
        report.interference_mu[k] = mu;
    }
    report.sum_rate = report.rate.sum();
    report.total_power = 0.0;
    for (int m = 0; m < scenario.num_aps(); ++m)
        report.total_power += ap_transmit_power(design, layout, m);
    report.energy_efficiency =
        report.total_power > 0.0 ? report.sum_rate / report.total_power : 0.0;
    return report;
}

}  // namespace cfisac
