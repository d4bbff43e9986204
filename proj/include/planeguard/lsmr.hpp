#pragma once

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace planeguard {

struct LsmrOptions {
    double damp = 0.0;
    double atol = 1e-8;
    double btol = 1e-8;
    double conlim = 1e8;
    std::size_t max_iter = 0;  // 0 selects 4 * cols
};

enum class LsmrStop {
    ZeroSolution,        // b = 0 or A^T b = 0, x = 0 is exact
    Compatible,          // residual below btol + atol * |A| |x| / |b|
    LeastSquares,        // normal-equations residual below atol
    ConditionLimit,      // cond(A) estimate exceeded conlim
    MachineCompatible,   // same as Compatible at machine precision
    MachineLeastSquares, // same as LeastSquares at machine precision
    MachineCondition,    // cond(A) estimate reached 1 / eps
    MaxIterations,
};

std::string_view describe(LsmrStop stop);

struct LsmrResult {
    Eigen::VectorXd x;
    LsmrStop stop = LsmrStop::ZeroSolution;
    std::size_t iterations = 0;
    double norm_r = 0.0;   // estimate of |[b; 0] - [A; damp I] x|
    double norm_ar = 0.0;  // estimate of |A^T r - damp^2 x|
    double norm_a = 0.0;
    double cond_a = 0.0;
    double norm_x = 0.0;

    bool converged() const { return stop != LsmrStop::MaxIterations; }
};

/// Minimizes |A x - b|^2 + damp^2 |x|^2 with the LSMR recurrence
/// (Golub-Kahan bidiagonalization, MINRES on the normal equations).
/// Iteration exhaustion is reported through `stop`, not thrown.
LsmrResult lsmr_solve(const Eigen::Ref<const Eigen::MatrixXd>& A, const Eigen::Ref<const Eigen::VectorXd>& b,
                      const LsmrOptions& options = {});

}  // namespace planeguard
