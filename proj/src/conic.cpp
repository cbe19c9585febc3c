#include "cfisac/conic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "cfisac/errors.hpp"

namespace cfisac {
namespace conic {

int herm_param_count(int n) { return n * n; }

namespace {

/// Basis element t of the Hermitian parameterization, expressed as a sum of
/// at most two scaled unit dyads alpha * e_p e_q^H.
struct BasisElem {
    int n_terms = 0;
    int p[2] = {0, 0};
    int q[2] = {0, 0};
    cplx a[2] = {0.0, 0.0};
};

BasisElem basis_elem(int n, int t) {
    BasisElem b;
    if (t < n) {
        b.n_terms = 1;
        b.p[0] = b.q[0] = t;
        b.a[0] = 1.0;
        return b;
    }
    int u = t - n;
    int pair = u / 2;
    int kind = u % 2;
    // Row-major enumeration of pairs (i < j).
    int i = 0;
    int remaining = pair;
    while (remaining >= n - 1 - i) {
        remaining -= n - 1 - i;
        ++i;
    }
    int j = i + 1 + remaining;
    b.n_terms = 2;
    b.p[0] = i;
    b.q[0] = j;
    b.p[1] = j;
    b.q[1] = i;
    if (kind == 0) {
        b.a[0] = 1.0;
        b.a[1] = 1.0;
    } else {
        b.a[0] = cplx(0.0, 1.0);
        b.a[1] = cplx(0.0, -1.0);
    }
    return b;
}

}  // namespace

Eigen::MatrixXcd herm_from_params(const Eigen::Ref<const Eigen::VectorXd>& params, int n) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = params[i];
    int t = n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            m(i, j) = cplx(params[t], params[t + 1]);
            m(j, i) = std::conj(m(i, j));
            t += 2;
        }
    }
    return m;
}

Eigen::VectorXd herm_to_params(const Eigen::MatrixXcd& mat) {
    const int n = static_cast<int>(mat.rows());
    Eigen::VectorXd params(herm_param_count(n));
    for (int i = 0; i < n; ++i) params[i] = mat(i, i).real();
    int t = n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            params[t] = mat(i, j).real();
            params[t + 1] = mat(i, j).imag();
            t += 2;
        }
    }
    return params;
}

Eigen::VectorXd trace_functional(const Eigen::MatrixXcd& c) {
    const int n = static_cast<int>(c.rows());
    Eigen::MatrixXcd ch = 0.5 * (c + c.adjoint());
    Eigen::VectorXd coeff(herm_param_count(n));
    for (int i = 0; i < n; ++i) coeff[i] = ch(i, i).real();
    int t = n;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            coeff[t] = 2.0 * ch(i, j).real();
            coeff[t + 1] = 2.0 * ch(i, j).imag();
            t += 2;
        }
    }
    return coeff;
}

Eigen::MatrixXcd AffineMatrixMap::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    Eigen::MatrixXcd m = constant;
    for (const auto& [idx, mat] : terms) m += x[idx] * mat;
    return m;
}

int ConicProblem::param_offset(int var) const {
    int off = 0;
    for (int v = 0; v < var; ++v) off += herm_param_count(mat_dims[v]);
    return off;
}

int ConicProblem::scalar_offset() const { return param_offset(static_cast<int>(mat_dims.size())); }

int ConicProblem::num_params() const { return scalar_offset() + num_scalars; }

Eigen::MatrixXcd ConicProblem::matrix_value(const Eigen::Ref<const Eigen::VectorXd>& x,
                                            int var) const {
    return herm_from_params(x.segment(param_offset(var), herm_param_count(mat_dims[var])),
                            mat_dims[var]);
}

void ConicProblem::set_matrix(Eigen::Ref<Eigen::VectorXd> x, int var,
                              const Eigen::MatrixXcd& value) const {
    x.segment(param_offset(var), herm_param_count(mat_dims[var])) = herm_to_params(value);
}

namespace {

double min_eigenvalue(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// Worst constraint violation at x (positive means infeasible/not strictly
/// interior).
double violation(const ConicProblem& p, const Eigen::VectorXd& x) {
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t v = 0; v < p.mat_dims.size(); ++v)
        worst = std::max(worst, -min_eigenvalue(p.matrix_value(x, v)));
    for (const auto& lmi : p.lmis) worst = std::max(worst, -min_eigenvalue(lmi.evaluate(x)));
    for (const auto& ld : p.logdet_terms)
        worst = std::max(worst, -min_eigenvalue(ld.evaluate(x)));
    for (const auto& c : p.ineqs) worst = std::max(worst, c.coeff.dot(x) - c.rhs);
    for (int i : p.nonneg_scalars) worst = std::max(worst, -x[p.scalar_offset() + i]);
    return worst;
}

bool domain_ok(const ConicProblem& p, const Eigen::VectorXd& x) {
    for (size_t v = 0; v < p.mat_dims.size(); ++v) {
        Eigen::LLT<Eigen::MatrixXcd> llt(p.matrix_value(x, v));
        if (llt.info() != Eigen::Success) return false;
    }
    for (const auto& lmi : p.lmis) {
        Eigen::LLT<Eigen::MatrixXcd> llt(lmi.evaluate(x));
        if (llt.info() != Eigen::Success) return false;
    }
    for (const auto& ld : p.logdet_terms) {
        Eigen::LLT<Eigen::MatrixXcd> llt(ld.evaluate(x));
        if (llt.info() != Eigen::Success) return false;
    }
    for (const auto& c : p.ineqs)
        if (c.coeff.dot(x) >= c.rhs) return false;
    for (int i : p.nonneg_scalars)
        if (x[p.scalar_offset() + i] <= 0.0) return false;
    return true;
}

/// Barrier complexity parameter (sum of cone dimensions).
int barrier_count(const ConicProblem& p) {
    int m = 0;
    for (int d : p.mat_dims) m += d;
    for (const auto& lmi : p.lmis) m += lmi.dim();
    m += static_cast<int>(p.ineqs.size());
    m += static_cast<int>(p.nonneg_scalars.size());
    return m;
}

double logdet_psd(const Eigen::LLT<Eigen::MatrixXcd>& llt) {
    double acc = 0.0;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
    return 2.0 * acc;
}

/// Adds weight * (-log det M(x)) with its gradient and Hessian. Returns false
/// when M(x) is not positive definite.
bool accumulate_logdet(const AffineMatrixMap& map, const Eigen::VectorXd& x, double weight,
                       double& phi, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    Eigen::MatrixXcd m = map.evaluate(x);
    Eigen::LLT<Eigen::MatrixXcd> llt(m);
    if (llt.info() != Eigen::Success) return false;
    phi += -weight * logdet_psd(llt);
    const int nm = map.dim();
    Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(nm, nm));
    const int n_terms = static_cast<int>(map.terms.size());
    // Stack vec(A_i) and vec(P A_i P) and use one gemm for the Hessian block.
    Eigen::MatrixXcd va(nm * nm, n_terms);
    Eigen::MatrixXcd vw(nm * nm, n_terms);
    for (int i = 0; i < n_terms; ++i) {
        const Eigen::MatrixXcd& a = map.terms[i].second;
        grad[map.terms[i].first] -= weight * (inv.cwiseProduct(a.conjugate())).sum().real();
        va.col(i) = Eigen::Map<const Eigen::VectorXcd>(a.data(), nm * nm);
        Eigen::MatrixXcd w = inv * a * inv;
        vw.col(i) = Eigen::Map<const Eigen::VectorXcd>(w.data(), nm * nm);
    }
    Eigen::MatrixXd h_loc = (va.adjoint() * vw).real();
    for (int i = 0; i < n_terms; ++i) {
        int gi = map.terms[i].first;
        for (int j = 0; j < n_terms; ++j)
            hess(gi, map.terms[j].first) += weight * 0.5 * (h_loc(i, j) + h_loc(j, i));
    }
    return true;
}

/// Barrier of a Hermitian PSD matrix variable, using closed-form entry
/// products of the inverse instead of per-basis matrices.
bool accumulate_psd_var(const ConicProblem& p, int var, const Eigen::VectorXd& x, double& phi,
                        Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
    const int n = p.mat_dims[var];
    const int off = p.param_offset(var);
    Eigen::MatrixXcd xm = p.matrix_value(x, var);
    Eigen::LLT<Eigen::MatrixXcd> llt(xm);
    if (llt.info() != Eigen::Success) return false;
    phi += -logdet_psd(llt);
    Eigen::MatrixXcd inv = llt.solve(Eigen::MatrixXcd::Identity(n, n));
    const int np = herm_param_count(n);
    std::vector<BasisElem> basis(np);
    for (int t = 0; t < np; ++t) basis[t] = basis_elem(n, t);
    for (int t = 0; t < np; ++t) {
        const BasisElem& bt = basis[t];
        cplx g = 0.0;
        for (int u = 0; u < bt.n_terms; ++u) g += bt.a[u] * inv(bt.q[u], bt.p[u]);
        grad[off + t] -= g.real();
        for (int s = t; s < np; ++s) {
            const BasisElem& bs = basis[s];
            cplx h = 0.0;
            for (int u = 0; u < bt.n_terms; ++u)
                for (int v = 0; v < bs.n_terms; ++v)
                    h += bt.a[u] * bs.a[v] * inv(bt.q[u], bs.p[v]) * inv(bs.q[v], bt.p[u]);
            hess(off + t, off + s) += h.real();
            if (s != t) hess(off + s, off + t) += h.real();
        }
    }
    return true;
}

/// Objective value without barriers.
double objective_value(const ConicProblem& p, const Eigen::VectorXd& x) {
    double f = 0.0;
    if (p.lin_cost.size() > 0) f += p.lin_cost.dot(x);
    if (p.quad_cost) f += 0.5 * x.dot(*p.quad_cost * x);
    for (const auto& ld : p.logdet_terms) {
        Eigen::LLT<Eigen::MatrixXcd> llt(ld.evaluate(x));
        if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
        f -= logdet_psd(llt);
    }
    return f;
}

struct Assembly {
    bool ok = false;
    double phi = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

Assembly assemble(const ConicProblem& p, const Eigen::VectorXd& x, double t) {
    const int nx = p.num_params();
    Assembly a;
    a.grad = Eigen::VectorXd::Zero(nx);
    a.hess = Eigen::MatrixXd::Zero(nx, nx);
    // Objective, weighted by t.
    if (p.lin_cost.size() > 0) {
        a.phi += t * p.lin_cost.dot(x);
        a.grad += t * p.lin_cost;
    }
    if (p.quad_cost) {
        Eigen::VectorXd qx = *p.quad_cost * x;
        a.phi += t * 0.5 * x.dot(qx);
        a.grad += t * qx;
        a.hess += t * *p.quad_cost;
    }
    for (const auto& ld : p.logdet_terms)
        if (!accumulate_logdet(ld, x, t, a.phi, a.grad, a.hess)) return a;
    // Barriers, weight 1.
    for (size_t v = 0; v < p.mat_dims.size(); ++v)
        if (!accumulate_psd_var(p, static_cast<int>(v), x, a.phi, a.grad, a.hess)) return a;
    for (const auto& lmi : p.lmis)
        if (!accumulate_logdet(lmi, x, 1.0, a.phi, a.grad, a.hess)) return a;
    for (const auto& c : p.ineqs) {
        double slack = c.rhs - c.coeff.dot(x);
        if (slack <= 0.0) return a;
        a.phi += -std::log(slack);
        a.grad += c.coeff / slack;
        a.hess += (c.coeff * c.coeff.transpose()) / (slack * slack);
    }
    for (int i : p.nonneg_scalars) {
        double v = x[p.scalar_offset() + i];
        if (v <= 0.0) return a;
        a.phi += -std::log(v);
        a.grad[p.scalar_offset() + i] -= 1.0 / v;
        a.hess(p.scalar_offset() + i, p.scalar_offset() + i) += 1.0 / (v * v);
    }
    a.ok = true;
    return a;
}

double barrier_phi(const ConicProblem& p, const Eigen::VectorXd& x, double t) {
    if (!domain_ok(p, x)) return std::numeric_limits<double>::infinity();
    double phi = t * objective_value(p, x);
    for (size_t v = 0; v < p.mat_dims.size(); ++v) {
        Eigen::LLT<Eigen::MatrixXcd> llt(p.matrix_value(x, static_cast<int>(v)));
        phi -= logdet_psd(llt);
    }
    for (const auto& lmi : p.lmis) {
        Eigen::LLT<Eigen::MatrixXcd> llt(lmi.evaluate(x));
        phi -= logdet_psd(llt);
    }
    for (const auto& c : p.ineqs) phi -= std::log(c.rhs - c.coeff.dot(x));
    for (int i : p.nonneg_scalars) phi -= std::log(x[p.scalar_offset() + i]);
    // Note: objective log-det terms are already weighted by t inside
    // objective_value via f, so nothing further here.
    return phi;
}

struct EqSystem {
    Eigen::MatrixXd a;  // me x nx
    Eigen::VectorXd b;
    bool present() const { return a.rows() > 0; }
};

EqSystem eq_system(const ConicProblem& p) {
    EqSystem sys;
    const int me = static_cast<int>(p.eqs.size());
    sys.a.resize(me, p.num_params());
    sys.b.resize(me);
    for (int i = 0; i < me; ++i) {
        sys.a.row(i) = p.eqs[i].coeff.transpose();
        sys.b[i] = p.eqs[i].rhs;
    }
    return sys;
}

struct CenterResult {
    bool ok = false;
    double residual = 0.0;
    int steps = 0;
};

/// Damped Newton centering of t*f + barrier at fixed t. Early-stop predicate
/// (may be null) is checked after every accepted step.
CenterResult center(const ConicProblem& p, Eigen::VectorXd& x, double t, const EqSystem& eq,
                    int max_steps, int& budget,
                    const std::function<bool(const Eigen::VectorXd&)>& early_stop) {
    CenterResult result;
    const int nx = p.num_params();
    for (int it = 0; it < max_steps && budget > 0; ++it, --budget) {
        Assembly a = assemble(p, x, t);
        if (!a.ok) return result;
        // Solve the (possibly equality-constrained) Newton system.
        Eigen::MatrixXd h = a.hess;
        double ridge = 1e-12 * std::max(1.0, h.diagonal().maxCoeff());
        Eigen::LLT<Eigen::MatrixXd> llt;
        for (int attempt = 0; attempt < 6; ++attempt) {
            Eigen::MatrixXd hr = h + ridge * Eigen::MatrixXd::Identity(nx, nx);
            llt.compute(hr);
            if (llt.info() == Eigen::Success) break;
            ridge *= 100.0;
        }
        if (llt.info() != Eigen::Success) return result;
        Eigen::VectorXd dx;
        if (eq.present()) {
            Eigen::VectorXd hg = llt.solve(a.grad);
            Eigen::MatrixXd hat = llt.solve(eq.a.transpose());
            Eigen::MatrixXd s = eq.a * hat;
            Eigen::VectorXd w = s.ldlt().solve(-eq.a * hg);
            dx = -llt.solve(a.grad + eq.a.transpose() * w);
            result.residual = (a.grad + eq.a.transpose() * w).lpNorm<Eigen::Infinity>();
        } else {
            dx = -llt.solve(a.grad);
            result.residual = a.grad.lpNorm<Eigen::Infinity>();
        }
        double decrement = -a.grad.dot(dx);
        result.steps = it + 1;
        if (decrement / 2.0 < 1e-10) {
            result.ok = true;
            return result;
        }
        // Backtracking line search with domain checks.
        double alpha = 1.0;
        double phi0 = a.phi;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            Eigen::VectorXd cand = x + alpha * dx;
            double phi_c = barrier_phi(p, cand, t);
            if (std::isfinite(phi_c) && phi_c <= phi0 + 0.25 * alpha * a.grad.dot(dx)) {
                x = cand;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            // Stuck; report the center as-is if the decrement is already small.
            result.ok = decrement / 2.0 < 1e-6;
            return result;
        }
        if (early_stop && early_stop(x)) {
            result.ok = true;
            return result;
        }
    }
    result.ok = true;  // out of steps for this stage; caller tracks the budget
    return result;
}

/// Phase-I augmentation: extra scalar s, objective s, constraints shifted.
ConicProblem build_phase1(const ConicProblem& p) {
    ConicProblem p1;
    p1.mat_dims = p.mat_dims;
    p1.num_scalars = p.num_scalars + 1;
    const int nx1 = p1.num_params();
    const int s_idx = nx1 - 1;
    p1.lin_cost = Eigen::VectorXd::Zero(nx1);
    p1.lin_cost[s_idx] = 1.0;
    auto extend = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(nx1);
        out.head(v.size()) = v;
        return out;
    };
    for (const auto& c : p.ineqs) {
        LinearConstraint c1;
        c1.coeff = extend(c.coeff);
        c1.coeff[s_idx] = -1.0;
        c1.rhs = c.rhs;
        p1.ineqs.push_back(std::move(c1));
    }
    for (const auto& c : p.eqs) {
        LinearConstraint c1;
        c1.coeff = extend(c.coeff);
        c1.rhs = c.rhs;
        p1.eqs.push_back(std::move(c1));
    }
    auto shift = [&](const AffineMatrixMap& m) {
        AffineMatrixMap m1 = m;
        m1.terms.emplace_back(s_idx, Eigen::MatrixXcd::Identity(m.dim(), m.dim()));
        return m1;
    };
    for (const auto& lmi : p.lmis) p1.lmis.push_back(shift(lmi));
    for (const auto& ld : p.logdet_terms) p1.lmis.push_back(shift(ld));
    // Nonnegative scalars stay hard (they are strictly feasible at the start).
    p1.nonneg_scalars = p.nonneg_scalars;
    return p1;
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
    ConicSolution sol;
    const int nx = problem.num_params();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(nx);
    for (size_t v = 0; v < problem.mat_dims.size(); ++v)
        problem.set_matrix(x, static_cast<int>(v),
                           Eigen::MatrixXcd::Identity(problem.mat_dims[v], problem.mat_dims[v]));
    for (int i : problem.nonneg_scalars) x[problem.scalar_offset() + i] = 1.0;

    EqSystem eq = eq_system(problem);
    if (eq.present()) {
        // Min-norm correction onto the affine set, with a PD repair loop.
        for (int repair = 0; repair < 20; ++repair) {
            Eigen::VectorXd resid = eq.b - eq.a * x;
            x += eq.a.transpose() * (eq.a * eq.a.transpose()).ldlt().solve(resid);
            bool all_pd = true;
            for (size_t v = 0; v < problem.mat_dims.size(); ++v) {
                Eigen::MatrixXcd xm = problem.matrix_value(x, static_cast<int>(v));
                double lam = min_eigenvalue(xm);
                if (lam <= 1e-10) {
                    all_pd = false;
                    problem.set_matrix(
                        x, static_cast<int>(v),
                        xm + (std::abs(lam) + 0.1) *
                                 Eigen::MatrixXcd::Identity(xm.rows(), xm.cols()));
                }
            }
            for (int i : problem.nonneg_scalars) {
                double& v = x[problem.scalar_offset() + i];
                if (v <= 1e-10) {
                    all_pd = false;
                    v = 1.0;
                }
            }
            if (all_pd && (eq.a * x - eq.b).lpNorm<Eigen::Infinity>() < 1e-9) break;
            if (repair == 19) {
                sol.message = "could not find an interior point on the equality set";
                return sol;
            }
        }
    }

    int budget = options.max_iter;
    // Phase I if the start is not strictly interior.
    if (!domain_ok(problem, x)) {
        ConicProblem p1 = build_phase1(problem);
        Eigen::VectorXd x1 = Eigen::VectorXd::Zero(p1.num_params());
        x1.head(nx) = x;
        double s0 = violation(problem, x) + 1.0;
        x1[p1.num_params() - 1] = s0;
        EqSystem eq1 = eq_system(p1);
        const int s_pos = p1.num_params() - 1;
        auto early = [&](const Eigen::VectorXd& xc) {
            return xc[s_pos] < -1e-3 * std::max(1.0, s0);
        };
        int m1 = barrier_count(p1);
        double t = options.t_init;
        bool interior_found = false;
        while (budget > 0) {
            CenterResult cr = center(p1, x1, t, eq1, 50, budget, early);
            if (!cr.ok) break;
            if (x1[s_pos] < -options.infeas_margin &&
                (early(x1) || m1 / t <= options.infeas_margin)) {
                interior_found = true;
                break;
            }
            if (m1 / t <= options.infeas_margin) break;
            t *= options.mu;
        }
        if (!interior_found && x1[s_pos] < -options.infeas_margin) interior_found = true;
        if (!interior_found) {
            sol.status = SolveStatus::Infeasible;
            sol.x = x1.head(nx);
            sol.message = "phase-I optimum above the infeasibility margin";
            return sol;
        }
        x = x1.head(nx);
    }

    // Phase II: follow the central path.
    const int m = barrier_count(problem);
    double t = options.t_init;
    double last_residual = 0.0;
    bool converged = false;
    while (budget > 0) {
        CenterResult cr = center(problem, x, t, eq, 50, budget, nullptr);
        if (!cr.ok) {
            sol.status = SolveStatus::NumericalFailure;
            sol.x = x;
            sol.message = "Newton centering failed";
            return sol;
        }
        last_residual = cr.residual;
        if (m == 0 || static_cast<double>(m) / t <= options.tol) {
            converged = true;
            break;
        }
        t *= options.mu;
    }

    sol.x = x;
    sol.objective = objective_value(problem, x);
    sol.iterations = options.max_iter - budget;
    sol.duality_gap = m == 0 ? 0.0 : static_cast<double>(m) / t;
    sol.complementarity = 1.0 / t;
    sol.kkt_stationarity = last_residual / t;
    double viol = violation(problem, x);
    double eq_resid = eq.present() ? (eq.a * x - eq.b).lpNorm<Eigen::Infinity>() : 0.0;
    sol.kkt_feasibility = std::max(std::max(viol, 0.0), eq_resid);
    sol.status = converged ? SolveStatus::Optimal : SolveStatus::MaxIter;
    return sol;
}

std::vector<Eigen::VectorXcd> project_power_ball(const std::vector<Eigen::VectorXcd>& beams,
                                                 double budget) {
    if (budget <= 0.0) throw DomainError("project_power_ball: budget must be positive");
    double total = 0.0;
    for (const auto& w : beams) total += w.squaredNorm();
    if (total <= budget) return beams;
    double scale = std::sqrt(budget / total);
    std::vector<Eigen::VectorXcd> out;
    out.reserve(beams.size());
    for (const auto& w : beams) out.push_back(scale * w);
    return out;
}

Eigen::MatrixXd box_project(const Eigen::MatrixXd& delta_raw, const Eigen::MatrixXd& xi) {
    return delta_raw.cwiseMax(0.0).cwiseMin(xi);
}

std::string describe(const ConicProblem& p) {
    std::ostringstream os;
    os << "conic problem: " << p.mat_dims.size() << " matrix vars (dims";
    for (int d : p.mat_dims) os << ' ' << d;
    os << "), " << p.num_scalars << " scalars, " << p.ineqs.size() << " ineqs, " << p.eqs.size()
       << " eqs, " << p.lmis.size() << " LMIs, " << p.logdet_terms.size() << " logdet terms\n";
    return os.str();
}

}  // namespace conic
}  // namespace cfisac
