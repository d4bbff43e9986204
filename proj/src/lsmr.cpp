#include "planeguard/lsmr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "planeguard/error.hpp"

namespace planeguard {
namespace {

struct Givens {
    double c;
    double s;
    double r;
};

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// Stable plane rotation zeroing b in (a, b).
Givens sym_ortho(double a, double b) {
    if (b == 0) return {sign(a), 0.0, std::abs(a)};
    if (a == 0) return {0.0, sign(b), std::abs(b)};
    if (std::abs(b) > std::abs(a)) {
        const double tau = a / b;
        const double s = sign(b) / std::sqrt(1 + tau * tau);
        return {s * tau, s, b / s};
    }
    const double tau = b / a;
    const double c = sign(a) / std::sqrt(1 + tau * tau);
    return {c, c * tau, a / c};
}

}  // namespace

std::string_view describe(LsmrStop stop) {
    switch (stop) {
        case LsmrStop::ZeroSolution: return "x = 0 is the exact solution";
        case LsmrStop::Compatible: return "Ax - b is small enough for the tolerances";
        case LsmrStop::LeastSquares: return "least-squares solution within atol";
        case LsmrStop::ConditionLimit: return "cond(A) exceeds conlim";
        case LsmrStop::MachineCompatible: return "Ax - b is small at machine precision";
        case LsmrStop::MachineLeastSquares: return "least-squares solution at machine precision";
        case LsmrStop::MachineCondition: return "cond(A) is too large for machine precision";
        case LsmrStop::MaxIterations: return "iteration limit reached";
    }
    return "unknown";
}

LsmrResult lsmr_solve(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& b,
                      const LsmrOptions& options) {
    const auto m = A.rows();
    const auto n = A.cols();
    if (m < 1 || n < 1) throw InvalidInput("lsmr: matrix must have at least one row and one column");
    if (b.size() != m) throw InvalidInput("lsmr: right-hand side length does not match the row count");
    if (!A.allFinite() || !b.allFinite()) throw InvalidInput("lsmr: non-finite entries in A or b");
    if (!(options.atol > 0) || !(options.btol > 0)) throw InvalidArgument("lsmr: tolerances must be positive");
    if (!(options.damp >= 0) || !std::isfinite(options.damp)) throw InvalidArgument("lsmr: damp must be >= 0");

    const double damp = options.damp;
    const std::size_t max_iter = options.max_iter ? options.max_iter : 4 * static_cast<std::size_t>(n);
    const double ctol = options.conlim > 0 ? 1.0 / options.conlim : 0.0;

    LsmrResult res;
    res.x = Eigen::VectorXd::Zero(n);

    Eigen::VectorXd u = b;
    const double norm_b = u.norm();
    double beta = norm_b;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    double alpha = 0;
    if (beta > 0) {
        u /= beta;
        v.noalias() = A.transpose() * u;
        alpha = v.norm();
    }
    if (alpha > 0) v /= alpha;

    double zetabar = alpha * beta;
    double alphabar = alpha;
    double rho = 1, rhobar = 1, cbar = 1, sbar = 0;
    Eigen::VectorXd h = v;
    Eigen::VectorXd hbar = Eigen::VectorXd::Zero(n);

    double betadd = beta, betad = 0, rhodold = 1, tautildeold = 0, thetatilde = 0, zeta = 0, d = 0;
    double norm_a2 = alpha * alpha;
    double maxrbar = 0, minrbar = 1e100;
    res.norm_a = std::sqrt(norm_a2);
    res.cond_a = 1;
    res.norm_r = beta;
    res.norm_ar = alpha * beta;
    if (res.norm_ar == 0) return res;

    Eigen::VectorXd tmp_m(m), tmp_n(n);
    while (true) {
        ++res.iterations;

        tmp_m.noalias() = A * v;
        u = tmp_m - alpha * u;
        beta = u.norm();
        if (beta > 0) {
            u /= beta;
            tmp_n.noalias() = A.transpose() * u;
            v = tmp_n - beta * v;
            alpha = v.norm();
            if (alpha > 0) v /= alpha;
        }

        const Givens qhat = sym_ortho(alphabar, damp);

        const double rhoold = rho;
        const Givens p = sym_ortho(qhat.r, beta);
        rho = p.r;
        const double thetanew = p.s * alpha;
        alphabar = p.c * alpha;

        const double rhobarold = rhobar;
        const double zetaold = zeta;
        const double thetabar = sbar * rho;
        const double rhotemp = cbar * rho;
        const Givens pbar = sym_ortho(cbar * rho, thetanew);
        cbar = pbar.c;
        sbar = pbar.s;
        rhobar = pbar.r;
        zeta = cbar * zetabar;
        zetabar = -sbar * zetabar;

        hbar = h - (thetabar * rho / (rhoold * rhobarold)) * hbar;
        res.x += (zeta / (rho * rhobar)) * hbar;
        h = v - (thetanew / rho) * h;

        // |r| estimate
        const double betaacute = qhat.c * betadd;
        const double betacheck = -qhat.s * betadd;
        const double betahat = p.c * betaacute;
        betadd = -p.s * betaacute;

        const double thetatildeold = thetatilde;
        const Givens ptilde = sym_ortho(rhodold, thetabar);
        thetatilde = ptilde.s * rhobar;
        rhodold = ptilde.c * rhobar;
        betad = -ptilde.s * betad + ptilde.c * betahat;

        tautildeold = (zetaold - thetatildeold * tautildeold) / ptilde.r;
        const double taud = (zeta - thetatilde * tautildeold) / rhodold;
        d += betacheck * betacheck;
        res.norm_r = std::sqrt(d + (betad - taud) * (betad - taud) + betadd * betadd);

        // |A| and cond(A) estimates
        norm_a2 += beta * beta;
        res.norm_a = std::sqrt(norm_a2);
        norm_a2 += alpha * alpha;

        maxrbar = std::max(maxrbar, rhobarold);
        if (res.iterations > 1) minrbar = std::min(minrbar, rhobarold);
        res.cond_a = std::max(maxrbar, rhotemp) / std::min(minrbar, rhotemp);

        res.norm_ar = std::abs(zetabar);
        res.norm_x = res.x.norm();

        const double test1 = res.norm_r / norm_b;
        const double test2 = res.norm_a * res.norm_r != 0 ? res.norm_ar / (res.norm_a * res.norm_r)
                                                           : std::numeric_limits<double>::infinity();
        const double test3 = 1 / res.cond_a;
        const double t1 = test1 / (1 + res.norm_a * res.norm_x / norm_b);
        const double rtol = options.btol + options.atol * res.norm_a * res.norm_x / norm_b;

        // Later checks take precedence, matching the reference ordering.
        bool stop = false;
        if (res.iterations >= max_iter) { res.stop = LsmrStop::MaxIterations; stop = true; }
        if (1 + test3 <= 1) { res.stop = LsmrStop::MachineCondition; stop = true; }
        if (1 + test2 <= 1) { res.stop = LsmrStop::MachineLeastSquares; stop = true; }
        if (1 + t1 <= 1) { res.stop = LsmrStop::MachineCompatible; stop = true; }
        if (test3 <= ctol) { res.stop = LsmrStop::ConditionLimit; stop = true; }
        if (test2 <= options.atol) { res.stop = LsmrStop::LeastSquares; stop = true; }
        if (test1 <= rtol) { res.stop = LsmrStop::Compatible; stop = true; }
        if (stop) break;
    }
    return res;
}

}  // namespace planeguard
