#include "minsurf/stencil.hpp"

namespace minsurf {

std::vector<Vec3> Stencil::constraint_points() const {
    if (!has_ghosts) throw GeometryError("Stencil: ghosts not attached");
    std::vector<Vec3> xi = points;
    xi.push_back(ghost_plus);
    xi.push_back(ghost_minus);
    return xi;
}

VectorXd Stencil::constraint_values() const {
    if (!has_ghosts) throw GeometryError("Stencil: ghosts not attached");
    const std::size_t n = points.size();
    VectorXd b = VectorXd::Constant(n + 2, level_constant);
    b(n) = level_constant + offset_h;
    b(n + 1) = level_constant - offset_h;
    return b;
}

Stencil knn_stencil(const PointCloud& cloud, const SpatialIndex& index, std::size_t center_index,
                    std::size_t k) {
    if (k > cloud.size()) throw std::domain_error("knn_stencil: k exceeds cloud size");
    if (k == 0) throw std::domain_error("knn_stencil: k must be >= 1");
    Stencil st;
    st.center_index = center_index;
    st.neighbor_indices = index.knn(cloud.points[center_index], k);
    // the center is its own nearest neighbor; keep it in front
    auto self = std::find(st.neighbor_indices.begin(), st.neighbor_indices.end(), center_index);
    if (self != st.neighbor_indices.begin() && self != st.neighbor_indices.end())
        std::rotate(st.neighbor_indices.begin(), self, self + 1);
    st.points.reserve(k);
    for (std::size_t idx : st.neighbor_indices) st.points.push_back(cloud.points[idx]);
    return st;
}

Stencil knn_stencil(const PointCloud& cloud, std::size_t center_index, std::size_t k) {
    const SpatialIndex index(cloud.points);
    return knn_stencil(cloud, index, center_index, k);
}

Vec3 pca_normal(const Stencil& stencil) {
    const std::size_t n = stencil.points.size();
    if (n < 3) throw GeometryError("pca_normal: need at least 3 stencil points");
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : stencil.points) mean += p;
    mean /= static_cast<double>(n);
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : stencil.points) {
        const Vec3 d = p - mean;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    const Vec3 evals = eig.eigenvalues();  // ascending
    if (evals(2) <= 0.0 || evals(1) <= 1e-12 * evals(2))
        throw GeometryError("pca_normal: degenerate (collinear) stencil");
    return eig.eigenvectors().col(0);
}

Vec3 orient_normal(const Vec3& raw, const Vec3& reference) {
    return raw.dot(reference) < 0.0 ? Vec3(-raw) : raw;
}

double default_ghost_offset(const Stencil& stencil, std::size_t count) {
    const Vec3& p0 = stencil.center();
    std::vector<double> dists;
    dists.reserve(stencil.points.size());
    for (std::size_t i = 1; i < stencil.points.size(); ++i)
        dists.push_back((stencil.points[i] - p0).norm());
    if (dists.empty()) throw GeometryError("default_ghost_offset: stencil has no neighbors");
    std::sort(dists.begin(), dists.end());
    const std::size_t m = std::min(count, dists.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += dists[i];
    return sum / static_cast<double>(m);
}

void attach_ghosts(Stencil& stencil, const Vec3& normal, double h, double level_constant) {
    if (!(h > 0.0)) throw std::domain_error("attach_ghosts: offset must be positive");
    const Vec3& p0 = stencil.center();
    const Vec3 plus = p0 + h * normal;
    const Vec3 minus = p0 - h * normal;
    for (const Vec3& p : stencil.points) {
        if ((p - plus).squaredNorm() == 0.0 || (p - minus).squaredNorm() == 0.0)
            throw GeometryError("attach_ghosts: ghost coincides with a surface point");
    }
    stencil.pca_normal = normal;
    stencil.ghost_plus = plus;
    stencil.ghost_minus = minus;
    stencil.offset_h = h;
    stencil.level_constant = level_constant;
    stencil.has_ghosts = true;
}

PointCloud expand_with_ghost_pairs(const PointCloud& cloud, const std::vector<Vec3>& normals,
                                   double h) {
    if (!(h > 0.0)) throw std::domain_error("expand_with_ghost_pairs: offset must be positive");
    if (normals.size() != cloud.size())
        throw std::invalid_argument("expand_with_ghost_pairs: one normal per point required");
    PointCloud out = cloud;
    out.exact_normals.clear();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        out.points.push_back(cloud.points[i] + h * normals[i]);
        out.points.push_back(cloud.points[i] - h * normals[i]);
    }
    out.source = cloud.source + " +ghosts";
    return out;
}

}  // namespace minsurf
