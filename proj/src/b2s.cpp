#include "cfisac/b2s.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "cfisac/errors.hpp"

namespace cfisac {

namespace {

using conic::AffineMatrixMap;
using conic::ConicProblem;
using conic::LinearConstraint;
using conic::SolveStatus;

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXcd masked_channel(const ChannelSet& channels, const Scenario& scenario,
                                const ApLayout& layout, const Eigen::MatrixXd& delta, int k,
                                int j) {
    Eigen::VectorXcd h(layout.total);
    for (int m = 0; m < scenario.num_aps(); ++m)
        h.segment(layout.offsets[m], layout.dims[m]) = delta(m, j) * channels.ue_link(m, k).channel;
    return h;
}

double pilot_interference(const ChannelSet& channels, const Scenario& scenario,
                          const std::vector<Eigen::MatrixXcd>& pilot_cov, int k) {
    if (pilot_cov.empty()) return 0.0;
    double acc = 0.0;
    for (int m = 0; m < scenario.num_aps(); ++m) {
        const Eigen::VectorXcd& h = channels.ue_link(m, k).channel;
        acc += (h.adjoint() * pilot_cov[m] * h).real()(0, 0);
    }
    return std::max(acc, 0.0);
}

Eigen::MatrixXcd j11_constant_block(const J11AffineMap& map) {
    const int dim = map.dim();
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t a = 0; a < map.aps.size(); ++a)
        c.block(2 * static_cast<int>(a), 2 * static_cast<int>(a), 2, 2) =
            map.constant[a].cast<cplx>();
    return c;
}

/// Expands the affine J11 map into per-parameter Hermitian term matrices of
/// the conic problem (one term per nonzero lifted-covariance parameter).
std::vector<std::pair<int, Eigen::MatrixXcd>> j11_terms(const J11AffineMap& map,
                                                        const ConicProblem& problem,
                                                        int num_ues) {
    const int dim = map.dim();
    std::vector<std::pair<int, Eigen::MatrixXcd>> terms;
    for (int k = 0; k < num_ues; ++k) {
        const int np = conic::herm_param_count(problem.mat_dims[k]);
        std::vector<Eigen::MatrixXcd> per_param(np);
        std::vector<bool> touched(np, false);
        for (size_t a = 0; a < map.aps.size(); ++a) {
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) {
                    const Eigen::MatrixXcd& c = map.coeff[a][p][q][k];
                    if (c.size() == 0) continue;
                    Eigen::VectorXd v = conic::trace_functional(c.adjoint());
                    for (int t = 0; t < np; ++t) {
                        if (v[t] == 0.0) continue;
                        if (!touched[t]) {
                            per_param[t] = Eigen::MatrixXcd::Zero(dim, dim);
                            touched[t] = true;
                        }
                        per_param[t](2 * static_cast<int>(a) + p,
                                     2 * static_cast<int>(a) + q) += v[t];
                    }
                }
            }
        }
        const int off = problem.param_offset(k);
        for (int t = 0; t < np; ++t)
            if (touched[t]) terms.emplace_back(off + t, std::move(per_param[t]));
    }
    return terms;
}

/// Per-participating-AP 2x2 sensing contribution of UE k's covariance at
/// unit association weight.
std::vector<std::vector<Eigen::Matrix2d>> unit_sensing_blocks(
    const J11AffineMap& unit_map, const std::vector<Eigen::MatrixXcd>& lifted) {
    const int num_aps = static_cast<int>(unit_map.aps.size());
    const int num_ues = static_cast<int>(lifted.size());
    std::vector<std::vector<Eigen::Matrix2d>> blocks(num_aps,
                                                     std::vector<Eigen::Matrix2d>(num_ues));
    for (int a = 0; a < num_aps; ++a) {
        for (int k = 0; k < num_ues; ++k) {
            Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) {
                    const Eigen::MatrixXcd& c = unit_map.coeff[a][p][q][k];
                    if (c.size() == 0) continue;
                    m(p, q) = (c.conjugate().cwiseProduct(lifted[k])).sum().real();
                }
            }
            blocks[a][k] = 0.5 * (m + m.transpose());
        }
    }
    return blocks;
}

}  // namespace

double surrogate_objective(const Scenario& scenario, const ChannelSet& channels,
                           const Eigen::MatrixXd& delta,
                           const std::vector<Eigen::MatrixXcd>& lifted,
                           const std::vector<Eigen::MatrixXcd>& pilot_cov,
                           const Eigen::MatrixXi& st_mask, const SensingConfig& sensing) {
    double acc = 0.0;
    for (int s = 0; s < scenario.num_sts(); ++s) {
        J11AffineMap map =
            surrogate_fim_j11(scenario, channels, delta, pilot_cov, st_mask, s, sensing);
        if (map.aps.empty()) continue;
        acc += phi_logdet(map.evaluate(lifted), sensing.eps_phi);
    }
    return acc;
}

BeamformingSdp build_beamforming_sdp(const Scenario& scenario, const ChannelSet& channels,
                                     const Eigen::MatrixXd& delta,
                                     const std::vector<Eigen::MatrixXcd>& pilot_cov,
                                     const Eigen::MatrixXi& st_mask, const B2sConfig& config,
                                     bool with_slack) {
    ApLayout layout = ApLayout::from_scenario(scenario);
    const int num_ues = scenario.num_ues();
    for (int k = 0; k < num_ues; ++k)
        if (delta.col(k).cwiseAbs().sum() == 0.0)
            throw B2sInfeasible("build_beamforming_sdp: UE " + std::to_string(k) +
                                " has no visible AP");

    BeamformingSdp sdp;
    sdp.with_slack = with_slack;
    sdp.num_ues = num_ues;
    sdp.n_tot = layout.total;
    ConicProblem& p = sdp.problem;
    p.mat_dims.assign(num_ues, layout.total);
    p.num_scalars = with_slack ? num_ues : 0;
    const int nx = p.num_params();
    p.lin_cost = Eigen::VectorXd::Zero(nx);
    if (with_slack) {
        for (int k = 0; k < num_ues; ++k) {
            double lambda =
                config.slack_penalty.size() > 0 ? config.slack_penalty[k] : 1.0;
            p.lin_cost[p.scalar_offset() + k] = lambda;
            p.nonneg_scalars.push_back(k);
        }
    }

    // Sensing: one log-det objective term and one information LMI per target.
    for (int s = 0; s < scenario.num_sts(); ++s) {
        J11AffineMap map =
            surrogate_fim_j11(scenario, channels, delta, pilot_cov, st_mask, s, config.sensing);
        if (map.aps.empty()) continue;
        const int dim = map.dim();
        auto terms = j11_terms(map, p, num_ues);
        Eigen::MatrixXcd constant = j11_constant_block(map);
        AffineMatrixMap obj;
        obj.constant =
            constant + config.sensing.eps_phi * Eigen::MatrixXcd::Identity(dim, dim);
        obj.terms = terms;
        p.logdet_terms.push_back(std::move(obj));
        AffineMatrixMap lmi;
        lmi.constant =
            constant - (1.0 / config.sensing.eps_th) * Eigen::MatrixXcd::Identity(dim, dim);
        lmi.terms = std::move(terms);
        p.lmis.push_back(std::move(lmi));
    }

    // SINR rows: gamma_th * interference - signal (- slack) <= -gamma_th * (I_SI + sigma2).
    for (int k = 0; k < num_ues; ++k) {
        LinearConstraint row;
        row.coeff = Eigen::VectorXd::Zero(nx);
        for (int j = 0; j < num_ues; ++j) {
            Eigen::VectorXcd g = masked_channel(channels, scenario, layout, delta, k, j);
            Eigen::VectorXd v = conic::trace_functional(g * g.adjoint());
            double sign = (j == k) ? -1.0 : config.gamma_th;
            row.coeff.segment(p.param_offset(j), v.size()) += sign * v;
        }
        if (with_slack) row.coeff[p.scalar_offset() + k] = -1.0;
        row.rhs = -config.gamma_th *
                  (pilot_interference(channels, scenario, pilot_cov, k) + config.sigma2);
        p.ineqs.push_back(std::move(row));
    }

    // Per-AP power rows over the data covariances; pilots use the remainder.
    for (int m = 0; m < scenario.num_aps(); ++m) {
        LinearConstraint row;
        row.coeff = Eigen::VectorXd::Zero(nx);
        for (int k = 0; k < num_ues; ++k)
            for (int i = 0; i < layout.dims[m]; ++i)
                row.coeff[p.param_offset(k) + layout.offsets[m] + i] = 1.0;
        double pilot_trace = pilot_cov.empty() ? 0.0 : pilot_cov[m].trace().real();
        row.rhs = config.p_max - pilot_trace;
        if (row.rhs <= 0.0)
            throw DomainError("build_beamforming_sdp: pilot power exhausts the AP budget");
        p.ineqs.push_back(std::move(row));
    }
    return sdp;
}

DeltaProblem build_association_subproblem(const Scenario& scenario, const ChannelSet& channels,
                                          const std::vector<Eigen::VectorXcd>& beams,
                                          const std::vector<Eigen::MatrixXcd>& lifted,
                                          const Eigen::MatrixXd& delta_prev,
                                          const Eigen::MatrixXi& ue_mask,
                                          const std::vector<Eigen::MatrixXcd>& pilot_cov,
                                          const Eigen::MatrixXi& st_mask,
                                          const B2sConfig& config) {
    ApLayout layout = ApLayout::from_scenario(scenario);
    const int num_aps = scenario.num_aps();
    const int num_ues = scenario.num_ues();

    DeltaProblem dp;
    Eigen::MatrixXi pos = Eigen::MatrixXi::Constant(num_aps, num_ues, -1);
    for (int m = 0; m < num_aps; ++m) {
        for (int k = 0; k < num_ues; ++k) {
            if (!ue_mask(m, k)) continue;
            pos(m, k) = static_cast<int>(dp.vars.size());
            dp.vars.emplace_back(m, k);
        }
    }
    const int nv = static_cast<int>(dp.vars.size());
    ConicProblem& p = dp.problem;
    p.num_scalars = nv;
    p.lin_cost = Eigen::VectorXd::Zero(nv);
    p.quad_cost = config.tau_delta * Eigen::MatrixXd::Identity(nv, nv);
    for (int v = 0; v < nv; ++v) {
        auto [m, k] = dp.vars[v];
        p.lin_cost[v] = -config.tau_delta * delta_prev(m, k) + config.psi_weight;
        p.nonneg_scalars.push_back(v);
        LinearConstraint upper;
        upper.coeff = Eigen::VectorXd::Zero(nv);
        upper.coeff[v] = 1.0;
        upper.rhs = 1.0;
        p.ineqs.push_back(std::move(upper));
    }

    // Inner channel products c_{j,k,m} = h_{m,k}^H w_{m,j}.
    std::vector<std::vector<Eigen::VectorXcd>> inner(num_ues);
    for (int k = 0; k < num_ues; ++k) {
        inner[k].resize(num_ues);
        for (int j = 0; j < num_ues; ++j) {
            Eigen::VectorXcd c(num_aps);
            for (int m = 0; m < num_aps; ++m)
                c[m] = channels.ue_link(m, k).channel.dot(layout.ap_block(beams[j], m));
            inner[k][j] = c;
        }
    }

    const double sqrt_gamma = std::sqrt(config.gamma_th);
    for (int k = 0; k < num_ues; ++k) {
        double rhs_base = config.gamma_th *
                          (pilot_interference(channels, scenario, pilot_cov, k) + config.sigma2);
        // Linearized signal power around delta_prev.
        cplx t0 = 0.0;
        for (int m = 0; m < num_aps; ++m) t0 += delta_prev(m, k) * inner[k][k][m];
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(nv);
        double u0 = std::norm(t0);
        for (int m = 0; m < num_aps; ++m) {
            int v = pos(m, k);
            if (v < 0) continue;
            double g = 2.0 * (std::conj(t0) * inner[k][k][m]).real();
            grad[v] = g;
            u0 -= g * delta_prev(m, k);
        }
        // Interference rows (real and imaginary parts per interferer).
        struct Row {
            std::vector<std::pair<int, double>> entries;
        };
        std::vector<Row> rows;
        for (int j = 0; j < num_ues; ++j) {
            if (j == k) continue;
            Row re, im;
            for (int m = 0; m < num_aps; ++m) {
                int v = pos(m, j);
                if (v < 0) continue;
                cplx c = sqrt_gamma * inner[k][j][m];
                if (c.real() != 0.0) re.entries.emplace_back(v, c.real());
                if (c.imag() != 0.0) im.entries.emplace_back(v, c.imag());
            }
            if (!re.entries.empty()) rows.push_back(std::move(re));
            if (!im.entries.empty()) rows.push_back(std::move(im));
        }
        if (rows.empty()) {
            // No interference: the linearized SINR row is affine.
            LinearConstraint row;
            row.coeff = -grad;
            row.rhs = u0 - rhs_base;
            p.ineqs.push_back(std::move(row));
        } else {
            // ||A delta||^2 <= u_hat(delta) - rhs_base as a bordered LMI.
            const int nr = static_cast<int>(rows.size());
            AffineMatrixMap lmi;
            lmi.constant = Eigen::MatrixXcd::Zero(nr + 1, nr + 1);
            lmi.constant.topLeftCorner(nr, nr) = Eigen::MatrixXcd::Identity(nr, nr);
            lmi.constant(nr, nr) = u0 - rhs_base;
            std::vector<Eigen::MatrixXcd> per_var(nv);
            std::vector<bool> touched(nv, false);
            auto touch = [&](int v) -> Eigen::MatrixXcd& {
                if (!touched[v]) {
                    per_var[v] = Eigen::MatrixXcd::Zero(nr + 1, nr + 1);
                    touched[v] = true;
                }
                return per_var[v];
            };
            for (int r = 0; r < nr; ++r) {
                for (const auto& [v, coeff] : rows[r].entries) {
                    Eigen::MatrixXcd& t = touch(v);
                    t(r, nr) += coeff;
                    t(nr, r) += coeff;
                }
            }
            for (int v = 0; v < nv; ++v)
                if (grad[v] != 0.0) touch(v)(nr, nr) += grad[v];
            for (int v = 0; v < nv; ++v)
                if (touched[v]) lmi.terms.emplace_back(v, std::move(per_var[v]));
            p.lmis.push_back(std::move(lmi));
        }
    }

    // Sensing surrogate: each delta^2 replaced by its tangent minorant
    // 2 delta_prev delta - delta_prev^2 inside the per-AP aggregation.
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(num_aps, num_ues);
    for (int s = 0; s < scenario.num_sts(); ++s) {
        J11AffineMap unit_map =
            surrogate_fim_j11(scenario, channels, ones, pilot_cov, st_mask, s, config.sensing);
        if (unit_map.aps.empty()) continue;
        const int dim = unit_map.dim();
        auto blocks = unit_sensing_blocks(unit_map, lifted);
        Eigen::MatrixXcd constant = j11_constant_block(unit_map);
        std::vector<std::pair<int, Eigen::MatrixXcd>> terms;
        for (size_t a = 0; a < unit_map.aps.size(); ++a) {
            const int m = unit_map.aps[a];
            for (int k = 0; k < num_ues; ++k) {
                double d0 = delta_prev(m, k);
                if (d0 == 0.0) continue;
                Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(dim, dim);
                embed.block(2 * static_cast<int>(a), 2 * static_cast<int>(a), 2, 2) =
                    blocks[a][k].cast<cplx>();
                constant -= (d0 * d0) * embed;
                int v = pos(m, k);
                if (v >= 0) terms.emplace_back(v, (2.0 * d0) * embed);
            }
        }
        AffineMatrixMap obj;
        obj.constant = constant + config.sensing.eps_phi * Eigen::MatrixXcd::Identity(dim, dim);
        obj.terms = terms;
        p.logdet_terms.push_back(std::move(obj));
        AffineMatrixMap lmi;
        lmi.constant =
            constant - (1.0 / config.sensing.eps_th) * Eigen::MatrixXcd::Identity(dim, dim);
        lmi.terms = std::move(terms);
        p.lmis.push_back(std::move(lmi));
    }
    return dp;
}

namespace {

/// Per-AP group projection of stacked beamformers onto the power balls
/// sum_k ||w_{m,k}||^2 <= budget_m.
void project_per_ap(std::vector<Eigen::VectorXcd>& beams, const ApLayout& layout,
                    const std::vector<double>& budgets) {
    for (size_t m = 0; m < budgets.size(); ++m) {
        double total = 0.0;
        for (const auto& w : beams)
            total += w.segment(layout.offsets[m], layout.dims[m]).squaredNorm();
        if (total <= budgets[m] || total == 0.0) continue;
        double scale = std::sqrt(budgets[m] / total);
        for (auto& w : beams) w.segment(layout.offsets[m], layout.dims[m]) *= scale;
    }
}

std::vector<Eigen::MatrixXcd> lift_rank_one(const std::vector<Eigen::VectorXcd>& beams) {
    std::vector<Eigen::MatrixXcd> lifted;
    lifted.reserve(beams.size());
    for (const auto& w : beams) lifted.push_back(w * w.adjoint());
    return lifted;
}

}  // namespace

std::vector<Eigen::VectorXcd> recover_rank_one(const std::vector<Eigen::MatrixXcd>& lifted,
                                               const Scenario& scenario,
                                               const ChannelSet& channels,
                                               const Eigen::MatrixXd& delta,
                                               const std::vector<Eigen::MatrixXcd>& pilot_cov,
                                               const Eigen::MatrixXi& st_mask,
                                               const B2sConfig& config, RngStream& rng,
                                               RecoveryReport& report) {
    ApLayout layout = ApLayout::from_scenario(scenario);
    const int num_ues = static_cast<int>(lifted.size());
    std::vector<double> budgets(scenario.num_aps());
    for (int m = 0; m < scenario.num_aps(); ++m)
        budgets[m] =
            config.p_max - (pilot_cov.empty() ? 0.0 : pilot_cov[m].trace().real());

    report = RecoveryReport{};
    std::vector<Eigen::MatrixXcd> sqrtw(num_ues);
    std::vector<Eigen::VectorXcd> principal(num_ues);
    bool all_rank_one = true;
    for (int k = 0; k < num_ues; ++k) {
        Eigen::MatrixXcd w = 0.5 * (lifted[k] + lifted[k].adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(w);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        const int n = static_cast<int>(ev.size());
        double top = ev[n - 1];
        double second = n > 1 ? ev[n - 2] : 0.0;
        double ratio = top > 0.0 ? second / top : 0.0;
        report.eig_ratio.push_back(ratio);
        if (ratio > 1e-6) all_rank_one = false;
        principal[k] = std::sqrt(top) * es.eigenvectors().col(n - 1);
        sqrtw[k] = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    }

    auto evaluate = [&](std::vector<Eigen::VectorXcd> beams, double& min_margin,
                        double& objective) {
        project_per_ap(beams, layout, budgets);
        IsacDesign design;
        design.delta = delta;
        design.beamformers = beams;
        design.pilot_cov = pilot_cov;
        design.st_mask = st_mask;
        Eigen::VectorXd gamma = sinr(channels, scenario, design, config.sigma2);
        min_margin = (gamma.array() - config.gamma_th).minCoeff();
        objective = surrogate_objective(scenario, channels, delta, lift_rank_one(beams),
                                        pilot_cov, st_mask, config.sensing);
        return beams;
    };

    if (all_rank_one) {
        project_per_ap(principal, layout, budgets);
        return principal;
    }

    report.used_randomization = true;
    const double feas_tol = -1e-9 * std::max(1.0, config.gamma_th);
    std::vector<Eigen::VectorXcd> best;
    double best_objective = std::numeric_limits<double>::infinity();
    double best_margin = -std::numeric_limits<double>::infinity();
    bool have_feasible = false;
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int n = 0; n <= config.randomization_samples; ++n) {
        std::vector<Eigen::VectorXcd> cand(num_ues);
        if (n == 0) {
            cand = principal;  // eigenvector candidate always competes
        } else {
            for (int k = 0; k < num_ues; ++k) {
                Eigen::VectorXcd g(layout.total);
                for (int i = 0; i < layout.total; ++i)
                    g[i] = cplx(rng.normal(), rng.normal()) * inv_sqrt2;
                cand[k] = sqrtw[k] * g;
            }
        }
        double margin = 0.0;
        double objective = 0.0;
        cand = evaluate(std::move(cand), margin, objective);
        bool feasible = margin >= feas_tol;
        if (feasible && (!have_feasible || objective < best_objective)) {
            have_feasible = true;
            best = cand;
            best_objective = objective;
            best_margin = margin;
        } else if (!have_feasible && margin > best_margin) {
            best = cand;
            best_margin = margin;
        }
    }
    report.failed = !have_feasible;
    return best;
}

std::pair<IsacDesign, VerifyReport> binarize_and_verify(
    const Eigen::MatrixXd& delta_star, const std::vector<Eigen::VectorXcd>& beams,
    const std::vector<Eigen::MatrixXcd>& pilot_cov, const Eigen::MatrixXi& ue_mask,
    const Eigen::MatrixXi& st_mask, const Scenario& scenario, const ChannelSet& channels,
    const B2sConfig& config) {
    const int num_aps = scenario.num_aps();
    const int num_ues = scenario.num_ues();
    IsacDesign design;
    design.delta = Eigen::MatrixXd::Zero(num_aps, num_ues);
    for (int m = 0; m < num_aps; ++m)
        for (int k = 0; k < num_ues; ++k)
            if (ue_mask(m, k) && delta_star(m, k) >= config.bin_threshold)
                design.delta(m, k) = 1.0;
    design.beamformers = beams;
    design.pilot_cov = pilot_cov;
    design.st_mask = st_mask;

    // Greedy feasibility refinement: re-enable the strongest masked AP of a
    // failing UE until its SINR passes or no candidate is left.
    const double feas_tol = 1e-9 * std::max(1.0, config.gamma_th);
    for (int round = 0; round < num_aps * num_ues; ++round) {
        Eigen::VectorXd gamma = sinr(channels, scenario, design, config.sigma2);
        int worst = -1;
        double worst_margin = -feas_tol;
        for (int k = 0; k < num_ues; ++k) {
            double margin = gamma[k] - config.gamma_th;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst = k;
            }
        }
        if (worst < 0) break;
        int pick = -1;
        double best_norm = 0.0;
        for (int m = 0; m < num_aps; ++m) {
            if (!ue_mask(m, worst) || design.delta(m, worst) > 0.0) continue;
            double strength = channels.ue_link(m, worst).channel.norm();
            if (strength > best_norm) {
                best_norm = strength;
                pick = m;
            }
        }
        if (pick < 0) break;
        design.delta(pick, worst) = 1.0;
    }

    VerifyReport report;
    report.sinr = sinr(channels, scenario, design, config.sigma2);
    report.sinr_margin = report.sinr.array() - config.gamma_th;
    report.sinr_ok = (report.sinr_margin.array() >= -feas_tol).all();
    ApLayout layout = ApLayout::from_scenario(scenario);
    report.ap_power.resize(num_aps);
    report.power_margin.resize(num_aps);
    for (int m = 0; m < num_aps; ++m) {
        report.ap_power[m] = ap_transmit_power(design, layout, m);
        report.power_margin[m] = config.p_max - report.ap_power[m];
    }
    report.power_ok = (report.power_margin.array() >= -1e-9).all();
    report.crb_ok = true;
    for (int s = 0; s < scenario.num_sts(); ++s) {
        try {
            IsacDesign one = design;  // evaluate_crb walks all STs; isolate s
            one.st_mask = Eigen::MatrixXi::Zero(num_aps, scenario.num_sts());
            one.st_mask.col(s) = st_mask.col(s);
            CrbReport crb = evaluate_crb(scenario, channels, one, config.sensing);
            report.crb_trace.push_back(crb.per_st[s].trace);
            report.crb_feasible.push_back(crb.per_st[s].feasible);
        } catch (const SingularFim&) {
            report.crb_trace.push_back(std::numeric_limits<double>::infinity());
            report.crb_feasible.push_back(false);
        }
        if (!report.crb_feasible.back()) report.crb_ok = false;
    }
    return {design, report};
}

namespace {

/// Conjugate-matched initial beamformers: each AP splits its data budget
/// equally over the UEs it serves.
std::vector<Eigen::VectorXcd> matched_initial_beams(const Scenario& scenario,
                                                    const ChannelSet& channels,
                                                    const ApLayout& layout,
                                                    const Eigen::MatrixXd& delta,
                                                    const std::vector<double>& budgets) {
    const int num_ues = scenario.num_ues();
    std::vector<Eigen::VectorXcd> beams(num_ues, Eigen::VectorXcd::Zero(layout.total));
    for (int m = 0; m < scenario.num_aps(); ++m) {
        int served = 0;
        for (int k = 0; k < num_ues; ++k)
            if (delta(m, k) > 0.0) ++served;
        if (served == 0) continue;
        double per_ue = budgets[m] / served;
        for (int k = 0; k < num_ues; ++k) {
            if (delta(m, k) <= 0.0) continue;
            Eigen::VectorXcd h = channels.ue_link(m, k).channel;
            double norm = h.norm();
            if (norm <= 0.0) continue;
            beams[k].segment(layout.offsets[m], layout.dims[m]) =
                std::sqrt(per_ue) * h.conjugate() / norm;
        }
    }
    return beams;
}

}  // namespace

B2sResult run_b2s(const Scenario& scenario, const ChannelSet& channels,
                  const VisibilityMask& mask, const B2sConfig& config, uint64_t seed,
                  const std::optional<std::vector<Eigen::VectorXcd>>& warm_start) {
    if (config.max_iter < 1) throw DomainError("run_b2s: max_iter must be at least 1");
    if (config.eps_bcd <= 0.0) throw DomainError("run_b2s: eps_bcd must be positive");
    if (config.tau_delta < 0.0) throw DomainError("run_b2s: tau_delta must be nonnegative");
    if (config.bin_threshold <= 0.0 || config.bin_threshold > 1.0)
        throw DomainError("run_b2s: bin_threshold must be in (0, 1]");

    const int num_ues = scenario.num_ues();
    for (int k = 0; k < num_ues; ++k)
        if (mask.ue_mask.col(k).sum() == 0)
            throw B2sInfeasible("run_b2s: UE " + std::to_string(k) + " has no visible AP");
    for (int s = 0; s < scenario.num_sts(); ++s)
        if (mask.st_mask.col(s).sum() == 0)
            throw B2sInfeasible("run_b2s: ST " + std::to_string(s) + " has no participating AP");

    ApLayout layout = ApLayout::from_scenario(scenario);
    std::vector<Eigen::MatrixXcd> pilots =
        sensing_pilot_covariance(scenario, channels, mask.st_mask, config.rho_sen, config.p_max);
    std::vector<double> budgets(scenario.num_aps());
    for (int m = 0; m < scenario.num_aps(); ++m)
        budgets[m] = config.p_max - pilots[m].trace().real();

    Eigen::MatrixXd delta = mask.ue_mask.cast<double>();
    std::vector<Eigen::VectorXcd> beams;
    if (warm_start) {
        beams = *warm_start;
        project_per_ap(beams, layout, budgets);
    } else {
        beams = matched_initial_beams(scenario, channels, layout, delta, budgets);
    }
    std::vector<Eigen::MatrixXcd> lifted = lift_rank_one(beams);

    B2sResult result;
    result.trace.initial_objective = surrogate_objective(scenario, channels, delta, lifted,
                                                         pilots, mask.st_mask, config.sensing);
    double j_prev = result.trace.initial_objective;
    RngStream rng(seed);
    int stage2_infeasible_streak = 0;
    bool converged = false;

    for (int iter = 0; iter < config.max_iter; ++iter) {
        B2sIteration record;
        record.iter = iter;

        auto t0 = std::chrono::steady_clock::now();
        BeamformingSdp sdp =
            build_beamforming_sdp(scenario, channels, delta, pilots, mask.st_mask, config, false);
        conic::ConicSolution sol = conic::solve(sdp.problem, config.solver);
        if (sol.status == SolveStatus::Infeasible) {
            record.slack_used = true;
            sdp = build_beamforming_sdp(scenario, channels, delta, pilots, mask.st_mask, config,
                                        true);
            sol = conic::solve(sdp.problem, config.solver);
        }
        record.stage1_status = sol.status;
        record.stage1_seconds = seconds_since(t0);
        if (sol.status == SolveStatus::Infeasible ||
            sol.status == SolveStatus::NumericalFailure)
            throw B2sInfeasible("run_b2s: beamforming stage failed at iteration " +
                                std::to_string(iter));
        lifted.clear();
        for (int k = 0; k < num_ues; ++k) {
            Eigen::MatrixXcd w = sdp.problem.matrix_value(sol.x, k);
            lifted.push_back(0.5 * (w + w.adjoint()));
        }
        // Worst SINR-row violation of the lifted solution.
        record.sinr_residual = 0.0;
        for (size_t i = 0; i < sdp.problem.ineqs.size() && i < static_cast<size_t>(num_ues);
             ++i) {
            double slack = sdp.problem.ineqs[i].rhs - sdp.problem.ineqs[i].coeff.dot(sol.x);
            record.sinr_residual = std::max(record.sinr_residual, -slack);
        }

        RngStream rec_rng = rng.fork(static_cast<uint64_t>(iter));
        beams = recover_rank_one(lifted, scenario, channels, delta, pilots, mask.st_mask, config,
                                 rec_rng, result.recovery);

        t0 = std::chrono::steady_clock::now();
        DeltaProblem dprob =
            build_association_subproblem(scenario, channels, beams, lifted, delta, mask.ue_mask,
                                         pilots, mask.st_mask, config);
        conic::ConicSolution dsol = conic::solve(dprob.problem, config.solver);
        record.stage2_status = dsol.status;
        record.stage2_seconds = seconds_since(t0);
        if (dsol.status == SolveStatus::Infeasible ||
            dsol.status == SolveStatus::NumericalFailure) {
            if (++stage2_infeasible_streak >= 2)
                throw B2sInfeasible("run_b2s: association stage failed at iteration " +
                                    std::to_string(iter));
            // Keep the current association and continue with the new beams.
        } else {
            stage2_infeasible_streak = 0;
            for (size_t v = 0; v < dprob.vars.size(); ++v) {
                auto [m, k] = dprob.vars[v];
                delta(m, k) = std::min(std::max(dsol.x[v], 0.0), 1.0);
            }
        }

        record.objective = surrogate_objective(scenario, channels, delta, lifted, pilots,
                                               mask.st_mask, config.sensing);
        result.trace.iterations.push_back(record);
        double rel = std::abs(record.objective - j_prev) / std::max(1.0, std::abs(j_prev));
        j_prev = record.objective;
        if (rel <= config.eps_bcd) {
            converged = true;
            break;
        }
    }
    result.trace.final_status = converged ? "converged" : "max-iterations";

    RngStream final_rng = rng.fork(static_cast<uint64_t>(config.max_iter) + 1);
    beams = recover_rank_one(lifted, scenario, channels, delta, pilots, mask.st_mask, config,
                             final_rng, result.recovery);
    result.delta_relaxed = delta;
    result.lifted = lifted;
    auto [design, verify] = binarize_and_verify(delta, beams, pilots, mask.ue_mask, mask.st_mask,
                                                scenario, channels, config);
    result.design = std::move(design);
    result.verify = std::move(verify);
    return result;
}

}  // namespace cfisac
