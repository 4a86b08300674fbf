#include "minsurf/solver.hpp"

namespace minsurf {

namespace {

// Blocks up to this size take the spectral square-root route; larger ones
// (the dense Hermite Gram) use Cholesky with the epsilon ladder.
constexpr int kSpectralBlockLimit = 128;

double rank_threshold(const MatrixXd& m) {
    return std::numeric_limits<double>::epsilon() *
           static_cast<double>(std::max(m.rows(), m.cols()));
}

void check_dimensions(const MinNormProblem& p) {
    if (p.A.rows() != p.b.size())
        throw std::invalid_argument("solver: A row count must match b length");
    if (!p.k_blocks.empty()) {
        Eigen::Index total = 0;
        for (const auto& blk : p.k_blocks) {
            if (blk.rows() != blk.cols()) throw std::invalid_argument("solver: K block not square");
            total += blk.rows();
        }
        if (total != p.A.cols())
            throw std::invalid_argument("solver: K dimension must match A column count");
    }
}

double gram_trace_over_m(const std::vector<MatrixXd>& blocks, int m) {
    double tr = 0.0;
    for (const auto& blk : blocks) tr += blk.trace();
    return tr / static_cast<double>(m);
}

double quadratic_form(const std::vector<MatrixXd>& blocks, const VectorXd& lambda) {
    if (blocks.empty()) return lambda.squaredNorm();
    double value = 0.0;
    Eigen::Index offset = 0;
    for (const auto& blk : blocks) {
        const auto seg = lambda.segment(offset, blk.rows());
        value += seg.dot(blk * seg);
        offset += blk.rows();
    }
    return value;
}

VectorXd refine_if_better(const MatrixXd& B, const VectorXd& b, VectorXd y,
                          const std::function<VectorXd(const VectorXd&)>& solve) {
    const double before = (B * y - b).norm();
    VectorXd improved = y + solve(b - B * y);
    if ((B * improved - b).norm() < before) return improved;
    return y;
}

// Minimum-norm least squares. The pivoted orthogonal decomposition is fast
// but sits on a rank cliff: a pivot kept marginally above the threshold can
// blow the solution up. When its residual misses the tolerance, redo with a
// truncated SVD pseudoinverse.
VectorXd min_norm_least_squares(const MatrixXd& B, const VectorXd& b, double tol) {
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(B);
    cod.setThreshold(rank_threshold(B));
    VectorXd y = refine_if_better(B, b, cod.solve(b),
                                  [&](const VectorXd& r) { return cod.solve(r).eval(); });
    if ((B * y - b).norm() <= tol) return y;

    Eigen::BDCSVD<MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double cutoff = rank_threshold(B) * sv(0);
    auto pinv_apply = [&](const VectorXd& rhs) {
        VectorXd scaled = svd.matrixU().transpose() * rhs;
        for (int k = 0; k < sv.size(); ++k) scaled(k) = sv(k) > cutoff ? scaled(k) / sv(k) : 0.0;
        return VectorXd(svd.matrixV() * scaled);
    };
    VectorXd alt = refine_if_better(B, b, pinv_apply(b), pinv_apply);
    if ((B * alt - b).norm() < (B * y - b).norm()) return alt;
    return y;
}

// Per-block spectral square root: K_b = V Λ Vᵀ restricted to eigenvalues
// above a relative floor. Columns map the transformed unknowns back to
// coefficients, and the native seminorm of the represented function is the
// plain 2-norm of the transformed unknowns.
struct SpectralBasis {
    std::vector<MatrixXd> block_basis;
    int reduced_size = 0;
};

SpectralBasis spectral_sqrt(const std::vector<MatrixXd>& blocks) {
    constexpr double kEigenvalueFloor = 1e-14;
    SpectralBasis out;
    out.block_basis.reserve(blocks.size());
    for (const auto& blk : blocks) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(blk);
        if (eig.info() != Eigen::Success)
            throw NumericalError("solve_native: eigendecomposition failed");
        const VectorXd& ev = eig.eigenvalues();
        const double floor = kEigenvalueFloor * std::max(ev(ev.size() - 1), 0.0);
        int first = 0;
        while (first < ev.size() && ev(first) <= floor) ++first;
        MatrixXd basis(blk.rows(), ev.size() - first);
        for (int k = first; k < ev.size(); ++k)
            basis.col(k - first) = eig.eigenvectors().col(k) / std::sqrt(ev(k));
        out.reduced_size += static_cast<int>(basis.cols());
        out.block_basis.push_back(std::move(basis));
    }
    return out;
}

MinNormSolution native_via_spectral_sqrt(const MinNormProblem& problem) {
    const SpectralBasis sqrt_basis = spectral_sqrt(problem.k_blocks);
    if (sqrt_basis.reduced_size == 0)
        throw NumericalError("solve_native: norm Gram has no positive spectrum");

    MatrixXd transformed(problem.A.rows(), sqrt_basis.reduced_size);
    Eigen::Index in = 0, out = 0;
    for (std::size_t bi = 0; bi < problem.k_blocks.size(); ++bi) {
        const auto& basis = sqrt_basis.block_basis[bi];
        transformed.middleCols(out, basis.cols()) = problem.A.middleCols(in, basis.rows()) * basis;
        in += basis.rows();
        out += basis.cols();
    }

    const VectorXd y = min_norm_least_squares(transformed, problem.b, problem.feasibility_tol());

    MinNormSolution sol;
    sol.method = "native-sqrt";
    sol.lambda.resize(problem.cols());
    in = 0;
    out = 0;
    for (std::size_t bi = 0; bi < problem.k_blocks.size(); ++bi) {
        const auto& basis = sqrt_basis.block_basis[bi];
        sol.lambda.segment(in, basis.rows()) = basis * y.segment(out, basis.cols());
        in += basis.rows();
        out += basis.cols();
    }
    sol.residual = (problem.A * sol.lambda - problem.b).norm();
    if (sol.residual > problem.feasibility_tol())
        throw NumericalError("solve_native: constraints not satisfiable within the spectral range");
    sol.objective_value = quadratic_form(problem.k_blocks, sol.lambda);
    return sol;
}

MinNormSolution native_via_cholesky_ladder(const MinNormProblem& problem) {
    const int m = problem.cols();
    const double scale = gram_trace_over_m(problem.k_blocks, m);
    const double eps_max = problem.epsilon_policy.max_factor * scale;

    double epsilon = 0.0;
    std::vector<Eigen::LLT<MatrixXd>> factors(problem.k_blocks.size());
    for (;;) {
        bool ok = true;
        for (std::size_t bi = 0; bi < problem.k_blocks.size(); ++bi) {
            MatrixXd shifted = problem.k_blocks[bi];
            if (epsilon > 0.0) shifted.diagonal().array() += epsilon;
            factors[bi].compute(shifted);
            if (factors[bi].info() != Eigen::Success) {
                ok = false;
                break;
            }
        }
        if (ok) break;
        if (epsilon == 0.0)
            epsilon = problem.epsilon_policy.start_factor * scale;
        else
            epsilon *= problem.epsilon_policy.growth;
        if (epsilon > eps_max)
            throw NumericalError("solve_native: Cholesky failed for every epsilon in the policy");
    }

    // B = A L^{-T}, assembled per diagonal block of K
    MatrixXd transformed(problem.A.rows(), m);
    Eigen::Index offset = 0;
    for (std::size_t bi = 0; bi < problem.k_blocks.size(); ++bi) {
        const Eigen::Index w = problem.k_blocks[bi].rows();
        transformed.middleCols(offset, w) =
            factors[bi].matrixL().solve(problem.A.middleCols(offset, w).transpose()).transpose();
        offset += w;
    }

    const VectorXd y = min_norm_least_squares(transformed, problem.b, problem.feasibility_tol());

    MinNormSolution sol;
    sol.method = "native-chol";
    sol.epsilon_used = epsilon;
    sol.lambda.resize(m);
    offset = 0;
    for (std::size_t bi = 0; bi < problem.k_blocks.size(); ++bi) {
        const Eigen::Index w = problem.k_blocks[bi].rows();
        sol.lambda.segment(offset, w) = factors[bi].matrixU().solve(y.segment(offset, w));
        offset += w;
    }
    sol.residual = (problem.A * sol.lambda - problem.b).norm();
    if (sol.residual > problem.feasibility_tol())
        throw NumericalError("solve_native: constraints not satisfiable to tolerance");
    sol.objective_value = quadratic_form(problem.k_blocks, sol.lambda);
    return sol;
}

}  // namespace

MinNormSolution solve_l2(const MinNormProblem& problem) {
    check_dimensions(problem);
    MinNormSolution sol;
    sol.method = "l2-cod";
    sol.lambda = min_norm_least_squares(problem.A, problem.b, problem.feasibility_tol());
    sol.residual = (problem.A * sol.lambda - problem.b).norm();
    if (sol.residual > problem.feasibility_tol())
        throw NumericalError("solve_l2: constraints not satisfiable to tolerance");
    sol.objective_value = sol.lambda.squaredNorm();
    return sol;
}

MinNormSolution solve_native(const MinNormProblem& problem) {
    check_dimensions(problem);
    if (problem.k_blocks.empty()) {
        // identity marker: the native norm is the coefficient norm
        MinNormSolution sol = solve_l2(problem);
        sol.method = "native-sqrt";
        return sol;
    }
    bool small_blocks = true;
    for (const auto& blk : problem.k_blocks)
        if (blk.rows() > kSpectralBlockLimit) small_blocks = false;
    if (small_blocks) {
        // square-root route: exact on the visible spectrum, no shift bias.
        // Constraints needing the discarded null directions fall back to the
        // regularized factorization.
        try {
            return native_via_spectral_sqrt(problem);
        } catch (const NumericalError&) {
        }
    }
    return native_via_cholesky_ladder(problem);
}

MinNormSolution solve_tikhonov(const MinNormProblem& problem, double mu) {
    check_dimensions(problem);
    if (!(mu > 0.0)) throw std::domain_error("solve_tikhonov: mu must be positive");
    const int m = problem.cols();
    MatrixXd normal = problem.A.transpose() * problem.A;
    if (problem.k_blocks.empty()) {
        normal.diagonal().array() += mu;
    } else {
        Eigen::Index offset = 0;
        for (const auto& blk : problem.k_blocks) {
            normal.block(offset, offset, blk.rows(), blk.cols()) += mu * blk;
            offset += blk.rows();
        }
    }
    Eigen::LDLT<MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("solve_tikhonov: singular regularized normal matrix");
    const VectorXd rhs = problem.A.transpose() * problem.b;
    MinNormSolution sol;
    sol.method = "tikhonov";
    sol.lambda = ldlt.solve(rhs);
    if ((normal * sol.lambda - rhs).norm() > 1e-6 * (1.0 + rhs.norm()))
        throw NumericalError("solve_tikhonov: normal equations solve failed");
    sol.residual = (problem.A * sol.lambda - problem.b).norm();
    sol.objective_value = quadratic_form(problem.k_blocks, sol.lambda);
    return sol;
}

MinNormSolution kkt_oracle(const MinNormProblem& problem) {
    check_dimensions(problem);
    const int m = problem.cols();
    if (m > 512) throw std::invalid_argument("kkt_oracle: dense oracle capped at M <= 512");
    const int rows = static_cast<int>(problem.A.rows());
    const int dim = m + rows;

    MatrixXd k_eff = MatrixXd::Identity(m, m);
    if (!problem.k_blocks.empty()) {
        k_eff.setZero();
        Eigen::Index offset = 0;
        for (const auto& blk : problem.k_blocks) {
            k_eff.block(offset, offset, blk.rows(), blk.cols()) = blk;
            offset += blk.rows();
        }
    }
    const double scale = k_eff.trace() / static_cast<double>(m);
    const double eps_max = problem.epsilon_policy.max_factor * scale;

    VectorXd rhs = VectorXd::Zero(dim);
    rhs.tail(rows) = problem.b;

    double epsilon = 0.0;
    for (;;) {
        MatrixXd kkt = MatrixXd::Zero(dim, dim);
        kkt.topLeftCorner(m, m) = k_eff;
        if (epsilon > 0.0) kkt.topLeftCorner(m, m).diagonal().array() += epsilon;
        kkt.topRightCorner(m, rows) = problem.A.transpose();
        kkt.bottomLeftCorner(rows, m) = problem.A;

        Eigen::FullPivLU<MatrixXd> lu(kkt);
        const VectorXd sol_vec = lu.solve(rhs);
        const double err = (kkt * sol_vec - rhs).norm();
        if (err <= 1e-8 * (1.0 + rhs.norm())) {
            MinNormSolution sol;
            sol.method = "kkt";
            sol.epsilon_used = epsilon;
            sol.lambda = sol_vec.head(m);
            sol.residual = (problem.A * sol.lambda - problem.b).norm();
            sol.objective_value = quadratic_form(problem.k_blocks, sol.lambda);
            return sol;
        }
        if (epsilon == 0.0)
            epsilon = std::max(problem.epsilon_policy.start_factor * scale, 1e-300);
        else
            epsilon *= problem.epsilon_policy.growth;
        if (epsilon > eps_max) throw NumericalError("kkt_oracle: singular KKT system");
    }
}

}  // namespace minsurf
