#include "minsurf/solver.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace minsurf;
using namespace minsurf::testing;

namespace {

MatrixXd random_matrix(int rows, int cols, TestRng& rng) {
    MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

MatrixXd random_spd(int n, TestRng& rng, double shift = 0.1) {
    const MatrixXd b = random_matrix(n, n, rng);
    MatrixXd k = b.transpose() * b;
    k.diagonal().array() += shift;
    return k;
}

MinNormProblem random_problem(int rows, int cols, TestRng& rng, bool rank_deficient,
                              bool with_gram) {
    MinNormProblem p;
    if (rank_deficient) {
        const int inner = std::max(1, rows / 2);
        p.A = random_matrix(rows, inner, rng) * random_matrix(inner, cols, rng);
    } else {
        p.A = random_matrix(rows, cols, rng);
    }
    // consistent right-hand side
    p.b = p.A * random_matrix(cols, 1, rng);
    if (with_gram) p.k_blocks = {random_spd(cols, rng)};
    return p;
}

}  // namespace

TEST_CASE("square identity constraints pin the solution") {
    TestRng rng(1);
    MinNormProblem p;
    p.A = MatrixXd::Identity(8, 8);
    p.b = random_matrix(8, 1, rng);
    p.k_blocks = {random_spd(8, rng)};
    const auto sol = solve_native(p);
    CHECK((sol.lambda - p.b).norm() < 1e-10);
    CHECK(sol.epsilon_used == 0.0);
}

TEST_CASE("minimum-norm toy case") {
    MinNormProblem p;
    p.A = MatrixXd(1, 2);
    p.A << 1.0, 1.0;
    p.b = VectorXd::Constant(1, 2.0);
    const auto sol = solve_l2(p);
    CHECK(sol.lambda(0) == doctest::Approx(1.0));
    CHECK(sol.lambda(1) == doctest::Approx(1.0));
}

TEST_CASE("native with identity gram coincides with l2") {
    TestRng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        MinNormProblem p = random_problem(6, 24, rng, trial % 3 == 0, false);
        const auto a = solve_l2(p);
        p.objective = NormObjective::Native;
        auto q = p;
        q.k_blocks = {MatrixXd::Identity(24, 24)};
        const auto b_sol = solve_native(q);
        CHECK((a.lambda - b_sol.lambda).norm() < 1e-10 * (1.0 + a.lambda.norm()));
    }
}

TEST_CASE("solve_native and solve_l2 agree with the KKT oracle") {
    TestRng rng(3);
    int native_checked = 0, l2_checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const bool rank_deficient = trial % 4 == 0;
        const int rows = 4 + static_cast<int>(rng.engine() % 8);
        const int cols = rows + 2 + static_cast<int>(rng.engine() % 40);
        {
            MinNormProblem p = random_problem(rows, cols, rng, rank_deficient, true);
            const auto got = solve_native(p);
            const auto want = kkt_oracle(p);
            CHECK((got.lambda - want.lambda).norm() <= 1e-8 * (1.0 + want.lambda.norm()));
            ++native_checked;
        }
        {
            MinNormProblem p = random_problem(rows, cols, rng, rank_deficient, false);
            p.objective = NormObjective::L2;
            const auto got = solve_l2(p);
            const auto want = kkt_oracle(p);
            CHECK((got.lambda - want.lambda).norm() <= 1e-8 * (1.0 + want.lambda.norm()));
            ++l2_checked;
        }
    }
    CHECK(native_checked == 100);
    CHECK(l2_checked == 100);
}

TEST_CASE("feasibility invariant") {
    TestRng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        MinNormProblem p = random_problem(6, 30, rng, trial % 5 == 0, true);
        const auto sol = (trial % 2 == 0) ? solve_native(p) : solve_l2(p);
        CHECK(sol.residual <= p.feasibility_tol());
    }
}

TEST_CASE("first-order optimality in the null space of A") {
    TestRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        MinNormProblem p = random_problem(5, 20, rng, false, true);
        const auto sol = solve_native(p);
        // random feasible direction: project a random vector onto ker(A)
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(p.A);
        const VectorXd v = random_matrix(20, 1, rng);
        const VectorXd d = v - cod.solve(p.A * v);
        REQUIRE((p.A * d).norm() < 1e-8);
        const MatrixXd& k = p.k_blocks[0];
        // grad of lambda' K lambda along d must vanish at the optimum
        const double directional = 2.0 * d.dot(k * sol.lambda);
        CHECK(std::abs(directional) <= 1e-6 * (1.0 + d.norm() * (k * sol.lambda).norm()));
        // and stepping either way never decreases the objective
        for (double t : {1e-3, -1e-3}) {
            const VectorXd stepped = sol.lambda + t * d;
            CHECK(stepped.dot(k * stepped) >= sol.objective_value - 1e-9 * (1 + sol.objective_value));
        }
    }
}

TEST_CASE("any feasible point has no smaller l2 norm") {
    TestRng rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        MinNormProblem p = random_problem(4, 16, rng, false, false);
        const auto sol = solve_l2(p);
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(p.A);
        const VectorXd v = random_matrix(16, 1, rng);
        const VectorXd feasible = sol.lambda + (v - cod.solve(p.A * v));
        CHECK(sol.lambda.norm() <= feasible.norm() + 1e-12);
    }
}

TEST_CASE("block-diagonal gram equals its dense counterpart") {
    TestRng rng(7);
    MinNormProblem blocked = random_problem(6, 0, rng, false, false);
    blocked.A = random_matrix(6, 30, rng);
    blocked.b = blocked.A * random_matrix(30, 1, rng);
    blocked.k_blocks = {random_spd(12, rng), random_spd(18, rng)};

    MinNormProblem dense = blocked;
    MatrixXd k = MatrixXd::Zero(30, 30);
    k.topLeftCorner(12, 12) = blocked.k_blocks[0];
    k.bottomRightCorner(18, 18) = blocked.k_blocks[1];
    dense.k_blocks = {k};

    const auto a = solve_native(blocked);
    const auto b = solve_native(dense);
    CHECK((a.lambda - b.lambda).norm() < 1e-10 * (1.0 + b.lambda.norm()));
    CHECK(a.objective_value == doctest::Approx(b.objective_value).epsilon(1e-10));
}

TEST_CASE("epsilon ladder") {
    TestRng rng(8);
    SUBCASE("well-conditioned gram needs no regularization") {
        MinNormProblem p = random_problem(5, 15, rng, false, true);
        CHECK(solve_native(p).epsilon_used == 0.0);
    }
    SUBCASE("singular gram triggers the ladder and still solves") {
        MinNormProblem p = random_problem(5, 15, rng, false, false);
        const MatrixXd low = random_matrix(15, 3, rng);
        p.k_blocks = {low * low.transpose()};  // rank 3, Cholesky must fail
        const auto sol = solve_native(p);
        CHECK(sol.epsilon_used > 0.0);
        CHECK(sol.residual <= p.feasibility_tol());
    }
}

TEST_CASE("tikhonov") {
    TestRng rng(9);
    MinNormProblem p = random_problem(10, 24, rng, false, true);
    SUBCASE("tiny mu approaches the interpolating solution") {
        const auto sol = solve_tikhonov(p, 1e-12);
        CHECK(sol.residual < 1e-4 * (1.0 + p.b.norm()));
    }
    SUBCASE("huge mu crushes the native norm") {
        const auto small = solve_tikhonov(p, 1e-12);
        const auto big = solve_tikhonov(p, 1e12);
        CHECK(big.objective_value < 1e-12 * std::max(1.0, small.objective_value));
    }
    SUBCASE("first-order condition holds") {
        const double mu = 1e-4;
        const auto sol = solve_tikhonov(p, mu);
        const MatrixXd normal = p.A.transpose() * p.A + mu * p.k_blocks[0];
        const VectorXd rhs = p.A.transpose() * p.b;
        CHECK((normal * sol.lambda - rhs).norm() <= 1e-8 * (1.0 + rhs.norm()));
    }
    SUBCASE("mu must be positive") {
        CHECK_THROWS_AS(solve_tikhonov(p, 0.0), std::domain_error);
    }
}

TEST_CASE("kkt oracle basics") {
    TestRng rng(10);
    SUBCASE("zero right-hand side gives zero coefficients") {
        MinNormProblem p = random_problem(5, 12, rng, false, true);
        p.b.setZero();
        CHECK(kkt_oracle(p).lambda.norm() < 1e-12);
    }
    SUBCASE("dense cap enforced") {
        MinNormProblem p;
        p.A = MatrixXd::Ones(1, 600);
        p.b = VectorXd::Ones(1);
        CHECK_THROWS_AS(kkt_oracle(p), std::invalid_argument);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    MinNormProblem p;
    p.A = MatrixXd::Identity(3, 3);
    p.b = VectorXd::Ones(2);
    CHECK_THROWS_AS(solve_l2(p), std::invalid_argument);
    p.b = VectorXd::Ones(3);
    p.k_blocks = {MatrixXd::Identity(2, 2)};
    CHECK_THROWS_AS(solve_native(p), std::invalid_argument);
}
