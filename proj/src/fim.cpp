#include "cfisac/fim.hpp"

#include <cmath>

#include "cfisac/errors.hpp"

namespace cfisac {

ChannelJacobianBlocks channel_jacobian_blocks(const LinkGeometry& link, cplx beta_rt,
                                              double frequency) {
    Eigen::VectorXcd a = steering_vector(link, FieldRegime::Near, frequency);
    SteeringJacobian jac = steering_jacobian(link, frequency);
    ChannelJacobianBlocks blocks;
    blocks.g_range = beta_rt * (jac.d_range * a.transpose() + a * jac.d_range.transpose());
    blocks.g_angle = beta_rt * (jac.d_angle * a.transpose() + a * jac.d_angle.transpose());
    blocks.g_re = a * a.transpose();
    blocks.g_im = cplx(0.0, 1.0) * (a * a.transpose());
    return blocks;
}

SensingLink make_sensing_link(const Scenario& scenario, const ChannelParams& params, int m,
                              int s) {
    SensingLink link;
    link.ap = m;
    link.geom = make_link_geometry(scenario.ap_positions[m], scenario.ap_arrays[m],
                                   scenario.st_regions[s].true_position);
    link.steering = steering_vector(link.geom, FieldRegime::Near, params.frequency);
    double loss = pathloss(params.frequency, link.geom.range, params.kappa);
    double beta_mag = std::sqrt(params.tx_gain * 1.0 / loss);  // G_r = 1 for STs
    cplx one_way = beta_mag * std::polar(1.0, -2.0 * M_PI * params.frequency / kSpeedOfLight *
                                                  link.geom.range);
    link.beta_rt = one_way * one_way;
    link.jac = channel_jacobian_blocks(link.geom, link.beta_rt, params.frequency);
    return link;
}

Eigen::Matrix4d per_ap_fim(const Eigen::MatrixXcd& transmit_cov,
                           const ChannelJacobianBlocks& jac, double n0, int slots) {
    if (n0 <= 0.0) throw DomainError("per_ap_fim: noise power must be positive");
    if (slots < 1) throw DomainError("per_ap_fim: need at least one slot");
    const double scale = 2.0 * slots / n0;
    Eigen::Matrix4d fim;
    for (int p = 0; p < 4; ++p) {
        for (int q = p; q < 4; ++q) {
            double entry =
                scale *
                (jac.block(q) * transmit_cov * jac.block(p).adjoint()).trace().real();
            fim(p, q) = entry;
            fim(q, p) = entry;
        }
    }
    return fim;
}

namespace {

Eigen::MatrixXd stack_blocks(const std::vector<Eigen::Matrix4d>& per_ap, int row0, int col0) {
    const int count = static_cast<int>(per_ap.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * count, 2 * count);
    for (int a = 0; a < count; ++a)
        out.block(2 * a, 2 * a, 2, 2) = per_ap[a].block(row0, col0, 2, 2);
    return out;
}

}  // namespace

Eigen::MatrixXd FimBlocks::j11() const { return stack_blocks(per_ap, 0, 0); }
Eigen::MatrixXd FimBlocks::j12() const { return stack_blocks(per_ap, 0, 2); }
Eigen::MatrixXd FimBlocks::j22() const { return stack_blocks(per_ap, 2, 2); }

CrbEntry crb_per_st(const FimBlocks& blocks, double eps_th) {
    const int count = static_cast<int>(blocks.per_ap.size());
    CrbEntry entry;
    entry.crb = Eigen::MatrixXd::Zero(2 * count, 2 * count);
    for (int a = 0; a < count; ++a) {
        const Eigen::Matrix4d& fim = blocks.per_ap[a];
        Eigen::Matrix2d j11 = fim.block(0, 0, 2, 2);
        Eigen::Matrix2d j12 = fim.block(0, 2, 2, 2);
        Eigen::Matrix2d j22 = fim.block(2, 2, 2, 2);
        Eigen::FullPivLU<Eigen::Matrix2d> lu22(j22);
        if (!lu22.isInvertible())
            throw SingularFim("crb_per_st: singular J22 block (target unobservable)");
        Eigen::Matrix2d schur = j11 - j12 * lu22.inverse() * j12.transpose();
        Eigen::FullPivLU<Eigen::Matrix2d> lus(schur);
        if (!lus.isInvertible())
            throw SingularFim("crb_per_st: singular Schur complement (target unobservable)");
        entry.crb.block(2 * a, 2 * a, 2, 2) = lus.inverse();
    }
    entry.trace = entry.crb.trace();
    entry.feasible = entry.trace <= eps_th;
    return entry;
}

std::vector<Eigen::MatrixXcd> transmit_covariances(const Scenario& scenario,
                                                   const IsacDesign& design,
                                                   const ApLayout& layout) {
    std::vector<Eigen::MatrixXcd> covs;
    covs.reserve(scenario.num_aps());
    for (int m = 0; m < scenario.num_aps(); ++m) {
        const int n_ant = layout.dims[m];
        Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n_ant, n_ant);
        for (int k = 0; k < scenario.num_ues(); ++k) {
            double weight = design.delta(m, k) * design.delta(m, k);
            if (weight == 0.0) continue;
            if (design.has_beamformers()) {
                Eigen::VectorXcd w = design.beamformers[k].segment(layout.offsets[m], n_ant);
                x += weight * (w * w.adjoint());
            } else if (design.has_lifted()) {
                x += weight * design.lifted[k].block(layout.offsets[m], layout.offsets[m], n_ant,
                                                     n_ant);
            }
        }
        if (!design.pilot_cov.empty()) x += design.pilot_cov[m];
        covs.push_back(x);
    }
    return covs;
}

CrbReport evaluate_crb(const Scenario& scenario, const ChannelSet& channels,
                       const IsacDesign& design, const SensingConfig& config) {
    ApLayout layout = ApLayout::from_scenario(scenario);
    std::vector<Eigen::MatrixXcd> covs = transmit_covariances(scenario, design, layout);
    CrbReport report;
    for (int s = 0; s < scenario.num_sts(); ++s) {
        FimBlocks blocks;
        blocks.n0 = config.n0;
        blocks.slots = config.slots;
        for (int m = 0; m < scenario.num_aps(); ++m) {
            if (!design.st_mask(m, s)) continue;
            SensingLink link = make_sensing_link(scenario, channels.params, m, s);
            blocks.aps.push_back(m);
            blocks.per_ap.push_back(per_ap_fim(covs[m], link.jac, config.n0, config.slots));
        }
        if (blocks.aps.empty())
            throw SingularFim("evaluate_crb: no participating AP for ST " + std::to_string(s));
        report.per_st.push_back(crb_per_st(blocks, config.eps_th));
        report.total_trace += report.per_st.back().trace;
    }
    return report;
}

double phi_logdet(const Eigen::MatrixXd& j11, double eps_phi) {
    Eigen::MatrixXd reg = j11 + eps_phi * Eigen::MatrixXd::Identity(j11.rows(), j11.cols());
    Eigen::LLT<Eigen::MatrixXd> llt(reg);
    if (llt.info() != Eigen::Success)
        throw SingularFim("phi_logdet: regularized J11 not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < reg.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
    return -2.0 * logdet;
}

Eigen::MatrixXd J11AffineMap::evaluate(const std::vector<Eigen::MatrixXcd>& lifted) const {
    const int count = static_cast<int>(aps.size());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * count, 2 * count);
    for (int a = 0; a < count; ++a) {
        Eigen::Matrix2d block = constant[a];
        for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
                for (size_t k = 0; k < coeff[a][p][q].size(); ++k) {
                    if (coeff[a][p][q][k].size() == 0) continue;
                    block(p, q) += (coeff[a][p][q][k].conjugate().cwiseProduct(lifted[k])).sum().real();
                }
            }
        }
        out.block(2 * a, 2 * a, 2, 2) = block;
    }
    return out;
}

J11AffineMap surrogate_fim_j11(const Scenario& scenario, const ChannelSet& channels,
                               const Eigen::MatrixXd& delta,
                               const std::vector<Eigen::MatrixXcd>& pilot_cov,
                               const Eigen::MatrixXi& st_mask, int s,
                               const SensingConfig& config) {
    ApLayout layout = ApLayout::from_scenario(scenario);
    const int num_ues = scenario.num_ues();
    const double scale = 2.0 * config.slots / config.n0;
    J11AffineMap map;
    for (int m = 0; m < scenario.num_aps(); ++m) {
        if (!st_mask(m, s)) continue;
        SensingLink link = make_sensing_link(scenario, channels.params, m, s);
        const int n_ant = layout.dims[m];
        const int off = layout.offsets[m];
        map.aps.push_back(m);
        Eigen::Matrix2d constant = Eigen::Matrix2d::Zero();
        std::array<std::array<std::vector<Eigen::MatrixXcd>, 2>, 2> coeffs;
        for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
                // J_pq = scale * Re tr(G_q X G_p^H) = Re tr((G_p^H G_q) X).
                Eigen::MatrixXcd kernel = link.jac.block(p).adjoint() * link.jac.block(q);
                if (!pilot_cov.empty())
                    constant(p, q) += scale * (kernel * pilot_cov[m]).trace().real();
                coeffs[p][q].resize(num_ues);
                for (int k = 0; k < num_ues; ++k) {
                    double weight = delta(m, k) * delta(m, k);
                    if (weight == 0.0) continue;
                    // Re tr(C W_k) with C supported on the (m,m) block; stored as
                    // the full-size coefficient so that sum(conj(C) .* W) = tr(C^H W)
                    // ... use C Hermitian-ized by the Re in evaluate().
                    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(layout.total, layout.total);
                    // tr(kernel * X_m) with X_m = S_m W_k S_m^H  =>  tr(S_m^H kernel S_m W_k);
                    // evaluate() computes Re sum(conj(C) .* W) = Re tr(C^H W), so store C^H form.
                    c.block(off, off, n_ant, n_ant) = (scale * weight) * kernel.adjoint();
                    coeffs[p][q][k] = std::move(c);
                }
            }
        }
        map.constant.push_back(constant);
        map.coeff.push_back(std::move(coeffs));
    }
    return map;
}

}  // namespace cfisac
