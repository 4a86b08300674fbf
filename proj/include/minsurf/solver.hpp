#pragma once

#include "minsurf/common.hpp"

#include <optional>
#include <string>

namespace minsurf {

enum class NormObjective { Native, L2 };

/// K + εI retry ladder, scaled by trace(K)/M so the policy is unit-free.
struct EpsilonPolicy {
    double start_factor = 1e-12;
    double growth = 10.0;
    double max_factor = 1e-4;
};

/// minimize ‖K^{1/2}λ‖₂ (or ‖λ‖₂) subject to Aλ = b. K is held as diagonal
/// blocks; an empty block list marks the identity.
struct MinNormProblem {
    MatrixXd A;
    VectorXd b;
    std::vector<MatrixXd> k_blocks;
    NormObjective objective = NormObjective::Native;
    EpsilonPolicy epsilon_policy;

    int cols() const { return static_cast<int>(A.cols()); }
    double feasibility_tol() const { return 1e-8 * (1.0 + b.norm()); }
};

struct MinNormSolution {
    VectorXd lambda;
    double residual = 0.0;         // ‖Aλ − b‖₂
    double objective_value = 0.0;  // λᵀKλ or ‖λ‖₂²
    double epsilon_used = 0.0;
    std::string method;
};

/// Cholesky of K (per block), minimum-norm least squares on A·L⁻ᵀ, then a
/// triangular back-substitution. Retries with K+εI per the epsilon policy
/// when a factorization fails; throws NumericalError once the ladder is
/// exhausted or the constraints cannot be met.
MinNormSolution solve_native(const MinNormProblem& problem);

/// Minimum-ℓ²-norm solution of Aλ = b via a rank-revealing orthogonal
/// decomposition.
MinNormSolution solve_l2(const MinNormProblem& problem);

/// λ = argmin ‖Aλ−b‖² + μ·λᵀKλ through the regularized normal equations.
MinNormSolution solve_tikhonov(const MinNormProblem& problem, double mu);

/// Dense saddle-point solve [K Aᵀ; A 0][λ;ν] = [0;b]; independent test oracle
/// (M ≤ 512).
MinNormSolution kkt_oracle(const MinNormProblem& problem);

}  // namespace minsurf
