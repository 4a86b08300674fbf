#include "minsurf/stencil.hpp"

#include "test_util.hpp"

#include <doctest.h>

using namespace minsurf;
using namespace minsurf::testing;

namespace {

PointCloud random_cloud(std::size_t n, TestRng& rng) {
    PointCloud cloud;
    for (std::size_t i = 0; i < n; ++i) cloud.points.push_back(rng.vec3(-1.0, 1.0));
    return cloud;
}

// exhaustive kNN with the same (distance, index) tie-break
std::vector<std::size_t> brute_knn(const PointCloud& cloud, std::size_t center, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < cloud.size(); ++i)
        all.emplace_back((cloud.points[i] - cloud.points[center]).squaredNorm(), i);
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(all[i].second);
    return out;
}

}  // namespace

TEST_CASE("knn stencils match the exhaustive oracle") {
    TestRng rng(2024);
    for (std::size_t n : {10, 60, 100, 200}) {
        const PointCloud cloud = random_cloud(n, rng);
        const SpatialIndex index(cloud.points);
        for (std::size_t trial = 0; trial < 10; ++trial) {
            const std::size_t center = rng.engine() % n;
            const std::size_t k = 1 + rng.engine() % n;
            const Stencil st = knn_stencil(cloud, index, center, k);
            REQUIRE(st.neighbor_indices.size() == k);
            CHECK(st.neighbor_indices.front() == center);
            auto want = brute_knn(cloud, center, k);
            auto got = st.neighbor_indices;
            std::sort(want.begin(), want.end());
            std::sort(got.begin(), got.end());
            CHECK(want == got);
        }
    }
}

TEST_CASE("knn corner cases") {
    TestRng rng(5);
    const PointCloud cloud = random_cloud(25, rng);
    const Stencil whole = knn_stencil(cloud, 3, cloud.size());
    CHECK(whole.points.size() == cloud.size());
    const Stencil self = knn_stencil(cloud, 3, 1);
    CHECK(self.points.size() == 1);
    CHECK(self.center() == cloud.points[3]);
    CHECK_THROWS_AS(knn_stencil(cloud, 3, cloud.size() + 1), std::domain_error);
}

TEST_CASE("kd-tree agrees with brute force on a large cloud") {
    // above the brute-force fallback threshold
    TestRng rng(77);
    const PointCloud cloud = random_cloud(2000, rng);
    const SpatialIndex index(cloud.points);
    for (std::size_t trial = 0; trial < 20; ++trial) {
        const std::size_t center = rng.engine() % cloud.size();
        const Stencil st = knn_stencil(cloud, index, center, 40);
        CHECK(st.neighbor_indices == brute_knn(cloud, center, 40));
    }
}

TEST_CASE("pca normal") {
    SUBCASE("coplanar stencil gives the plane normal") {
        Stencil st;
        TestRng rng(9);
        for (int i = 0; i < 20; ++i) st.points.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), 0.0});
        const Vec3 n = pca_normal(st);
        CHECK(std::abs(std::abs(n.z()) - 1.0) < 1e-12);
    }
    SUBCASE("sphere cap normal within 15 degrees") {
        const ImplicitSurface sphere = ImplicitSurface::sphube(0.0, 1.0);
        const PointCloud cloud = sphere.sample_halton(1000);
        // nearest point to the north pole
        std::size_t best = 0;
        for (std::size_t i = 1; i < cloud.size(); ++i)
            if ((cloud.points[i] - Vec3(0, 0, 1)).norm() < (cloud.points[best] - Vec3(0, 0, 1)).norm())
                best = i;
        const Stencil st = knn_stencil(cloud, best, 40);
        const Vec3 n = orient_normal(pca_normal(st), cloud.exact_normals[best]);
        const double angle = std::acos(std::clamp(n.dot(cloud.exact_normals[best]), -1.0, 1.0));
        CHECK(angle < 15.0 * M_PI / 180.0);
    }
    SUBCASE("collinear points are rejected") {
        Stencil st;
        for (int i = 0; i < 8; ++i) st.points.push_back({0.1 * i, 0.2 * i, -0.3 * i});
        CHECK_THROWS_AS(pca_normal(st), GeometryError);
    }
}

TEST_CASE("orientation") {
    const Vec3 n(0, 0, 1);
    CHECK(orient_normal(n, n) == n);
    CHECK(orient_normal(-n, n) == n);
    CHECK(orient_normal(Vec3(1, 0, 0), n) == Vec3(1, 0, 0));  // tie stays put
}

TEST_CASE("pca orientation against the exact normal succeeds everywhere") {
    const ImplicitSurface shape = ImplicitSurface::ellipsoid(0.85, 0.35, 0.5);
    const PointCloud cloud = shape.sample_halton(500);
    const SpatialIndex index(cloud.points);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Stencil st = knn_stencil(cloud, index, i, 40);
        const Vec3 n = orient_normal(pca_normal(st), cloud.exact_normals[i]);
        CHECK(n.dot(cloud.exact_normals[i]) >= 0.0);
    }
}

TEST_CASE("ghost construction") {
    Stencil st;
    st.points = {Vec3(1, 0, 0), Vec3(0.9, 0.1, 0), Vec3(0.9, -0.1, 0), Vec3(1.1, 0.05, 0)};
    SUBCASE("arithmetic") {
        attach_ghosts(st, Vec3(1, 0, 0), 0.1, 1.0);
        CHECK((st.ghost_plus - Vec3(1.1, 0, 0)).norm() < 1e-15);
        CHECK((st.ghost_minus - Vec3(0.9, 0, 0)).norm() < 1e-15);
        const VectorXd b = st.constraint_values();
        REQUIRE(b.size() == 6);
        for (int i = 0; i < 4; ++i) CHECK(b(i) == 1.0);
        CHECK(b(4) == doctest::Approx(1.1));
        CHECK(b(5) == doctest::Approx(0.9));
    }
    SUBCASE("midpoint reversibility to machine precision") {
        TestRng rng(31);
        for (int trial = 0; trial < 50; ++trial) {
            Stencil s;
            s.points = {rng.vec3(-1, 1), rng.vec3(-1, 1), rng.vec3(-1, 1)};
            Vec3 n = rng.vec3(-1, 1).normalized();
            const double h = rng.uniform(0.01, 0.5);
            attach_ghosts(s, n, h, 1.0);
            const Vec3 mid = 0.5 * (s.ghost_plus + s.ghost_minus);
            CHECK((mid - s.center()).norm() < 1e-15);
        }
    }
    SUBCASE("zero offset rejected") {
        CHECK_THROWS_AS(attach_ghosts(st, Vec3(1, 0, 0), 0.0, 1.0), std::domain_error);
    }
    SUBCASE("ghost collision rejected") {
        // ghost_plus would land on the fourth point for h = 0.1 along +x
        Stencil s;
        s.points = {Vec3(1, 0, 0), Vec3(1.1, 0, 0)};
        CHECK_THROWS_AS(attach_ghosts(s, Vec3(1, 0, 0), 0.1, 1.0), GeometryError);
    }
    SUBCASE("default offset is the mean of the 5 nearest") {
        Stencil s;
        s.points.push_back(Vec3::Zero());
        for (int i = 1; i <= 7; ++i) s.points.push_back(Vec3(0.1 * i, 0, 0));
        const double want = (0.1 + 0.2 + 0.3 + 0.4 + 0.5) / 5.0;
        CHECK(default_ghost_offset(s) == doctest::Approx(want));
    }
}

TEST_CASE("full ghost-pair expansion") {
    const PointCloud cloud = ImplicitSurface::sphube(0.0, 1.0).sample_halton(32);
    const PointCloud expanded = expand_with_ghost_pairs(cloud, cloud.exact_normals, 0.05);
    REQUIRE(expanded.size() == 3 * cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        CHECK((expanded.points[cloud.size() + 2 * i] -
               (cloud.points[i] + 0.05 * cloud.exact_normals[i]))
                  .norm() < 1e-15);
        CHECK((expanded.points[cloud.size() + 2 * i + 1] -
               (cloud.points[i] - 0.05 * cloud.exact_normals[i]))
                  .norm() < 1e-15);
    }
}
