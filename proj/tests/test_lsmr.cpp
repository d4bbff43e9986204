#include <doctest.h>

#include <Eigen/Dense>

#include "planeguard/error.hpp"
#include "planeguard/lsmr.hpp"
#include "test_support.hpp"

using namespace planeguard;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd a(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = rng.normal();
    return a;
}

Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

// Dense oracle: (A^T A + damp^2 I) x = A^T b.
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double damp) {
    Eigen::MatrixXd g = a.transpose() * a;
    g.diagonal().array() += damp * damp;
    return g.ldlt().solve(a.transpose() * b);
}

double rel_err(const Eigen::VectorXd& x, const Eigen::VectorXd& ref) {
    return (x - ref).norm() / std::max(ref.norm(), 1e-300);
}

}  // namespace

TEST_CASE("identity system") {
    Rng rng(1);
    const auto b = random_vector(rng, 5);
    const auto res = lsmr_solve(Eigen::MatrixXd::Identity(5, 5), b);
    CHECK((res.x - b).norm() <= 1e-10);
    CHECK(res.converged());
}

TEST_CASE("damped random systems match the normal equations") {
    Rng rng(2);
    for (double damp : {0.0, 0.5, 2.0}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto a = random_matrix(rng, 20, 10);
            const auto b = random_vector(rng, 20);
            const auto res = lsmr_solve(a, b, {.damp = damp});
            CAPTURE(damp);
            CHECK(res.converged());
            CHECK(rel_err(res.x, normal_equations(a, b, damp)) <= 1e-6);
        }
    }
}

TEST_CASE("consistent full-rank system is solved exactly") {
    Rng rng(3);
    const auto a = random_matrix(rng, 30, 8);
    const auto x = random_vector(rng, 8);
    const Eigen::VectorXd b = a * x;
    const auto res = lsmr_solve(a, b);
    CHECK(rel_err(res.x, x) <= 1e-7);
    CHECK(res.norm_r <= 1e-6 * b.norm());
}

TEST_CASE("heavy damping drives the solution toward A^T b / damp^2") {
    Rng rng(4);
    Eigen::MatrixXd a = random_matrix(rng, 12, 6);
    a /= a.norm();
    Eigen::VectorXd b = random_vector(rng, 12);
    b /= b.norm();
    const double damp = 1e6;
    const auto res = lsmr_solve(a, b, {.damp = damp});
    const Eigen::VectorXd atb = a.transpose() * b;
    CHECK(res.x.norm() <= 1e-6 * atb.norm());
    CHECK(rel_err(res.x, atb / (damp * damp)) <= 1e-6);
}

TEST_CASE("underdetermined and rank-deficient systems") {
    Rng rng(5);
    // Wide system: minimum-norm solution from a zero start.
    const auto wide = random_matrix(rng, 6, 15);
    const auto b = random_vector(rng, 6);
    const auto res = lsmr_solve(wide, b);
    const Eigen::VectorXd min_norm = wide.transpose() * (wide * wide.transpose()).ldlt().solve(b);
    CHECK(rel_err(res.x, min_norm) <= 1e-6);

    // Duplicated column with damping is well posed.
    Eigen::MatrixXd dup(20, 4);
    const auto base = random_matrix(rng, 20, 3);
    dup << base, base.col(0);
    const auto y = random_vector(rng, 20);
    CHECK(rel_err(lsmr_solve(dup, y, {.damp = 0.3}).x, normal_equations(dup, y, 0.3)) <= 1e-6);
}

TEST_CASE("stop reasons") {
    Rng rng(6);
    const auto a = random_matrix(rng, 40, 20);
    const auto zero = lsmr_solve(a, Eigen::VectorXd::Zero(40));
    CHECK(zero.stop == LsmrStop::ZeroSolution);
    CHECK(zero.x.isZero());

    const auto b = random_vector(rng, 40);
    const auto capped = lsmr_solve(a, b, {.max_iter = 2});
    CHECK(capped.stop == LsmrStop::MaxIterations);
    CHECK_FALSE(capped.converged());
    CHECK(capped.iterations == 2);

    const auto full = lsmr_solve(a, b);
    CHECK(full.converged());
    CHECK(full.iterations <= 80);
    CHECK_FALSE(describe(full.stop).empty());
}

TEST_CASE("invalid inputs") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
    Eigen::MatrixXd bad = a;
    bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(lsmr_solve(bad, b), InvalidInput);
    Eigen::VectorXd bad_b = b;
    bad_b(0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(lsmr_solve(a, bad_b), InvalidInput);
    CHECK_THROWS_AS(lsmr_solve(Eigen::MatrixXd(0, 3), Eigen::VectorXd(0)), InvalidInput);
    CHECK_THROWS_AS(lsmr_solve(a, Eigen::VectorXd::Ones(4)), InvalidInput);
    CHECK_THROWS_AS(lsmr_solve(a, b, {.atol = 0.0}), InvalidArgument);
    CHECK_THROWS_AS(lsmr_solve(a, b, {.btol = -1.0}), InvalidArgument);
    CHECK_THROWS_AS(lsmr_solve(a, b, {.damp = -1.0}), InvalidArgument);
}

TEST_CASE("deterministic") {
    Rng rng(7);
    const auto a = random_matrix(rng, 25, 9);
    const auto b = random_vector(rng, 25);
    const auto r1 = lsmr_solve(a, b, {.damp = 0.1});
    const auto r2 = lsmr_solve(a, b, {.damp = 0.1});
    CHECK(r1.x == r2.x);
    CHECK(r1.iterations == r2.iterations);
}
