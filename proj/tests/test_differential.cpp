#include "minsurf/differential.hpp"

#include "minsurf/solver.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace minsurf;
using namespace minsurf::testing;

namespace {

Stencil sphere_stencil(std::size_t n_cloud, std::size_t k, Vec3* exact_normal_out = nullptr) {
    const PointCloud cloud = ImplicitSurface::sphube(0.0, 1.0).sample_halton(n_cloud);
    Stencil st = knn_stencil(cloud, 0, k);
    const Vec3 n = orient_normal(pca_normal(st), cloud.exact_normals[0]);
    attach_ghosts(st, n, default_ghost_offset(st), 1.0);
    if (exact_normal_out) *exact_normal_out = cloud.exact_normals[0];
    return st;
}

FittedImplicit fit_stencil(const Stencil& st, TrialSpaceKind kind, int tau,
                           NormObjective norm = NormObjective::Native) {
    const MaternKernel k3(tau, 3);
    TrialSpaceAssembly as = [&] {
        switch (kind) {
            case TrialSpaceKind::RBF: return assemble_rbf(st, k3);
            case TrialSpaceKind::HRBF: return assemble_hrbf(st, k3);
            default:
                return assemble_krbf(st, MaternKernel(tau + 1, 3), MaternKernel(tau, 1),
                                     {CenterMode::StretchRegrid, 0.0});
        }
    }();
    MinNormProblem problem;
    problem.A = as.constraint_matrix();
    problem.b = st.constraint_values();
    MinNormSolution sol;
    if (kind == TrialSpaceKind::RBF || norm == NormObjective::L2) {
        sol = solve_l2(problem);
    } else {
        problem.k_blocks = as.norm_gram_blocks();
        sol = solve_native(problem);
    }
    return FittedImplicit(std::move(as), std::move(sol.lambda));
}

}  // namespace

TEST_CASE("interpolation conditions hold at every constraint point") {
    const Stencil st = sphere_stencil(500, 30);
    const VectorXd b = st.constraint_values();
    for (TrialSpaceKind kind :
         {TrialSpaceKind::RBF, TrialSpaceKind::HRBF, TrialSpaceKind::KRBF}) {
        const FittedImplicit fit = fit_stencil(st, kind, 4);
        const auto xi = st.constraint_points();
        const double tol = 1e-8 * (1.0 + b.norm());
        for (std::size_t i = 0; i < xi.size(); ++i)
            CHECK(std::abs(fit.value(xi[i]) - b(static_cast<int>(i))) <= tol);
    }
}

TEST_CASE("zero coefficients evaluate to zero everywhere") {
    const Stencil st = sphere_stencil(200, 12);
    const TrialSpaceAssembly as = assemble_rbf(st, MaternKernel(4, 3));
    const FittedImplicit fit(as, VectorXd::Zero(as.basis_count()));
    TestRng rng(3);
    for (int i = 0; i < 10; ++i) {
        const Vec3 x = rng.vec3(-1, 1);
        CHECK(fit.value(x) == 0.0);
        CHECK(fit.gradient(x).norm() == 0.0);
    }
}

TEST_CASE("single-term fit reproduces the kernel") {
    const MaternKernel kernel(5, 3);
    const Stencil st = sphere_stencil(200, 12);
    const TrialSpaceAssembly as = assemble_rbf(st, kernel);
    VectorXd lambda = VectorXd::Zero(as.basis_count());
    lambda(0) = 1.0;
    const FittedImplicit fit(as, lambda);
    const Vec3 center = st.center();
    CHECK(fit.value(center) == doctest::Approx(kernel.eval(0.0)).epsilon(1e-14));
    // radially symmetric term: zero gradient at its own center
    CHECK(fit.gradient(center).norm() == 0.0);
}

namespace {

// bounded random coefficients: keeps evaluation noise far below the finite
// difference resolution, so the check isolates the derivative formulas
FittedImplicit random_fit(const Stencil& st, TrialSpaceKind kind, int tau, TestRng& rng) {
    const MaternKernel k3(kind == TrialSpaceKind::KRBF ? tau + 1 : tau, 3);
    TrialSpaceAssembly as = [&] {
        switch (kind) {
            case TrialSpaceKind::RBF: return assemble_rbf(st, k3);
            case TrialSpaceKind::HRBF: return assemble_hrbf(st, k3);
            default:
                return assemble_krbf(st, k3, MaternKernel(tau, 1),
                                     {CenterMode::StretchRegrid, 0.0});
        }
    }();
    VectorXd lambda(as.basis_count());
    for (int j = 0; j < lambda.size(); ++j) lambda(j) = rng.uniform(-1.0, 1.0);
    return FittedImplicit(std::move(as), std::move(lambda));
}

}  // namespace

TEST_CASE("gradient matches finite differences of the value") {
    TestRng rng(11);
    const Stencil st = sphere_stencil(500, 25);
    for (TrialSpaceKind kind :
         {TrialSpaceKind::RBF, TrialSpaceKind::HRBF, TrialSpaceKind::KRBF}) {
        const FittedImplicit fit = random_fit(st, kind, 4, rng);
        for (int trial = 0; trial < 20; ++trial) {
            const Vec3 x = st.center() + 0.2 * rng.vec3(-1, 1);
            const Vec3 grad = fit.gradient(x);
            const double h = 1e-6;
            for (int a = 0; a < 3; ++a) {
                Vec3 hi = x, lo = x;
                hi[a] += h;
                lo[a] -= h;
                const double fd = (fit.value(hi) - fit.value(lo)) / (2 * h);
                CAPTURE(static_cast<int>(kind));
                CHECK(std::abs(grad[a] - fd) <= 1e-6 * (1.0 + std::abs(fd)));
            }
        }
    }
}

TEST_CASE("hessian matches finite differences of the gradient") {
    TestRng rng(13);
    const Stencil st = sphere_stencil(500, 25);
    for (TrialSpaceKind kind :
         {TrialSpaceKind::RBF, TrialSpaceKind::HRBF, TrialSpaceKind::KRBF}) {
        const int tau = kind == TrialSpaceKind::HRBF ? 5 : 4;
        const FittedImplicit fit = random_fit(st, kind, tau, rng);
        for (int trial = 0; trial < 10; ++trial) {
            const Vec3 x = st.center() + 0.2 * rng.vec3(-1, 1);
            const Mat3 hess = fit.hessian(x);
            CHECK((hess - hess.transpose()).cwiseAbs().maxCoeff() == 0.0);  // symmetric by construction
            const double h = 1e-5;
            for (int a = 0; a < 3; ++a) {
                Vec3 hi = x, lo = x;
                hi[a] += h;
                lo[a] -= h;
                const Vec3 fd = (fit.gradient(hi) - fit.gradient(lo)) / (2 * h);
                for (int bb = 0; bb < 3; ++bb) {
                    CAPTURE(static_cast<int>(kind));
                    CHECK(std::abs(hess(a, bb) - fd[bb]) <= 1e-5 * (1.0 + std::abs(fd[bb])));
                }
            }
        }
    }
}

TEST_CASE("axis-aligned 1-D terms act on one coordinate only") {
    const MaternKernel k3(5, 3), k1(4, 1);
    const Stencil st = sphere_stencil(200, 12);
    const TrialSpaceAssembly as = assemble_krbf(st, k3, k1, {CenterMode::StretchRegrid, 0.0});
    const int n = as.num_constraints();
    const int nx = static_cast<int>(as.centers1()[0].size());
    const int ny = static_cast<int>(as.centers1()[1].size());

    // a single y-axis 1-D term
    VectorXd lambda = VectorXd::Zero(as.basis_count());
    lambda(n + nx + ny / 2) = 1.0;
    const FittedImplicit fit(as, lambda);
    TestRng rng(17);
    for (int i = 0; i < 10; ++i) {
        const Vec3 x = rng.vec3(-0.5, 0.5);
        const Vec3 grad = fit.gradient(x);
        CHECK(grad.x() == 0.0);
        CHECK(grad.z() == 0.0);
        const Mat3 hess = fit.hessian(x);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (!(a == 1 && b == 1)) CHECK(hess(a, b) == 0.0);
    }
    // the 1-D kernel gradient vanishes exactly at its own center
    const double c = as.centers1()[1][ny / 2];
    CHECK(fit.gradient(Vec3(0.3, c, -0.2)).y() == 0.0);
}

TEST_CASE("surface frame on a locally fitted sphere") {
    Vec3 exact_normal;
    const Stencil st = sphere_stencil(2000, 40, &exact_normal);
    const FittedImplicit fit = fit_stencil(st, TrialSpaceKind::KRBF, 5);
    const SurfaceFrame frame = fit.frame(st.center(), st.pca_normal);
    CHECK(normal_error(frame.normal, exact_normal) < 1e-3);
    CHECK(std::abs(frame.kappa1) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(frame.kappa2) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(frame.dir1.dot(frame.normal)) < 1e-8);
    CHECK(std::abs(frame.dir2.dot(frame.normal)) < 1e-8);
    CHECK(std::abs(frame.dir1.dot(frame.dir2)) < 1e-8);
    CHECK(frame.gaussian == frame.kappa1 * frame.kappa2);
    CHECK(frame.mean == 0.5 * (frame.kappa1 + frame.kappa2));
    CHECK_FALSE(frame.dubious);
}

TEST_CASE("frame is invariant under stencil relabeling") {
    Vec3 exact_normal;
    Stencil st = sphere_stencil(800, 24, &exact_normal);
    const FittedImplicit fit = fit_stencil(st, TrialSpaceKind::KRBF, 4);
    const SurfaceFrame base = fit.frame(st.center(), st.pca_normal);

    // permute everything except the leading center
    Stencil shuffled = st;
    std::reverse(shuffled.points.begin() + 1, shuffled.points.end());
    const FittedImplicit fit2 = fit_stencil(shuffled, TrialSpaceKind::KRBF, 4);
    const SurfaceFrame perm = fit2.frame(shuffled.center(), shuffled.pca_normal);

    CHECK((base.normal - perm.normal).norm() < 1e-9);
    CHECK(base.kappa1 == doctest::Approx(perm.kappa1).epsilon(1e-7));
    CHECK(base.kappa2 == doctest::Approx(perm.kappa2).epsilon(1e-7));
}

TEST_CASE("normal error metric") {
    const Vec3 a(1, 0, 0), b(0, 1, 0);
    CHECK(normal_error(a, a) == 0.0);
    CHECK(normal_error(a, -a) == doctest::Approx(2.0));
    CHECK(normal_error(a, b) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("degenerate level sets are reported") {
    CHECK_THROWS_AS(frame_from_derivatives(Vec3::Zero(), Mat3::Identity(), Vec3::UnitZ()),
                    GeometryError);
    const Stencil st = sphere_stencil(200, 12);
    const TrialSpaceAssembly as = assemble_rbf(st, MaternKernel(4, 3));
    const FittedImplicit flat(as, VectorXd::Zero(as.basis_count()));
    CHECK_THROWS_AS(flat.frame(st.center(), Vec3::UnitZ()), GeometryError);
    // tau = 2 kernels cannot provide curvature
    const FittedImplicit rough = fit_stencil(st, TrialSpaceKind::RBF, 2);
    CHECK_FALSE(rough.curvature_supported());
    CHECK_THROWS_AS(rough.hessian(st.center()), std::domain_error);
    CHECK(rough.normal_frame(st.center(), st.pca_normal).normal.norm() ==
          doctest::Approx(1.0).epsilon(1e-12));
}
