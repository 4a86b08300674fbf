#include "minsurf/trial_space.hpp"

#include <algorithm>
#include <numeric>

namespace minsurf {

CenterConfig CenterConfig::from_index(int config) {
    switch (config) {
        case 1: return {CenterMode::Original, 0.0};
        case 2: return {CenterMode::Regrid, 0.0};
        case 3: return {CenterMode::Stretch, 0.0};
        case 4: return {CenterMode::StretchRegrid, 0.0};
    }
    throw std::invalid_argument("CenterConfig: config index must be 1..4");
}

int CenterConfig::index() const {
    switch (mode) {
        case CenterMode::Original: return 1;
        case CenterMode::Regrid: return 2;
        case CenterMode::Stretch: return 3;
        case CenterMode::StretchRegrid: return 4;
    }
    return 0;
}

namespace {

double max_pairwise_distance(const std::vector<Vec3>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, (pts[i] - pts[j]).squaredNorm());
    return std::sqrt(best);
}

std::vector<double> drop_exact_duplicates(const std::vector<double>& values) {
    std::vector<double> kept;
    kept.reserve(values.size());
    for (double v : values) {
        if (std::find(kept.begin(), kept.end(), v) == kept.end()) kept.push_back(v);
    }
    return kept;
}

void check_distinct_sites(const std::vector<Vec3>& sites) {
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t j = i + 1; j < sites.size(); ++j)
            if ((sites[i] - sites[j]).squaredNorm() == 0.0)
                throw NumericalError("trial space: duplicate constraint points");
}

}  // namespace

std::vector<double> project_centers(const std::vector<Vec3>& constraint_points, int axis,
                                    const CenterConfig& config) {
    if (constraint_points.empty()) throw std::domain_error("project_centers: empty stencil");
    if (axis < 0 || axis > 2) throw std::invalid_argument("project_centers: axis must be 0..2");

    std::vector<double> proj(constraint_points.size());
    for (std::size_t i = 0; i < proj.size(); ++i) proj[i] = constraint_points[i][axis];

    if (config.mode == CenterMode::Original) return drop_exact_duplicates(proj);

    const auto [lo_it, hi_it] = std::minmax_element(proj.begin(), proj.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) throw GeometryError("project_centers: zero-width projection interval");

    double ref_length = config.reference_length;
    if (ref_length <= 0.0) ref_length = 2.0 * max_pairwise_distance(constraint_points);

    const double mean =
        std::accumulate(proj.begin(), proj.end(), 0.0) / static_cast<double>(proj.size());
    const std::size_t n = proj.size();

    switch (config.mode) {
        case CenterMode::Regrid: {
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
            return out;
        }
        case CenterMode::Stretch: {
            // affine map of [lo,hi] onto [mean - L/2, mean + L/2]
            const double scale = ref_length / (hi - lo);
            const double base = mean - 0.5 * ref_length;
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i) out[i] = base + scale * (proj[i] - lo);
            return drop_exact_duplicates(out);
        }
        case CenterMode::StretchRegrid: {
            const double base = mean - 0.5 * ref_length;
            std::vector<double> out(n);
            for (std::size_t i = 0; i < n; ++i)
                out[i] = base + ref_length * static_cast<double>(i) / static_cast<double>(n - 1);
            return out;
        }
        case CenterMode::Original: break;  // handled above
    }
    return proj;
}

void TrialSpaceAssembly::eval_basis_row(const Vec3& x, RowRef row) const {
    const int n = num_constraints();
    for (int j = 0; j < n; ++j) row(j) = kernel3_.eval((x - sites_[j]).norm());

    if (kind_ == TrialSpaceKind::KRBF) {
        int col = n;
        for (int axis = 0; axis < 3; ++axis) {
            for (double c : centers1_[axis]) row(col++) = kernel1_->eval(std::abs(x[axis] - c));
        }
    } else if (kind_ == TrialSpaceKind::HRBF) {
        for (int j = 0; j < n; ++j) {
            const Vec3 u = x - sites_[j];
            const double r = u.norm();
            const double g = kernel3_.phi1_over_r(r);
            for (int k = 0; k < 3; ++k) row(n * (1 + k) + j) = -u[k] * g;
        }
    }
}

MatrixXd TrialSpaceAssembly::norm_gram_dense() const {
    MatrixXd k = MatrixXd::Zero(m_, m_);
    int offset = 0;
    for (const MatrixXd& block : k_blocks_) {
        k.block(offset, offset, block.rows(), block.cols()) = block;
        offset += static_cast<int>(block.rows());
    }
    return k;
}

double TrialSpaceAssembly::value(const Vec3& x, const VectorXd& lambda) const {
    Eigen::RowVectorXd row(m_);
    eval_basis_row(x, row);
    return row.dot(lambda);
}

Vec3 TrialSpaceAssembly::gradient(const Vec3& x, const VectorXd& lambda) const {
    Vec3 grad = Vec3::Zero();
    const int n = num_constraints();
    for (int j = 0; j < n; ++j) {
        const Vec3 u = x - sites_[j];
        const double r = u.norm();
        if (r == 0.0) continue;  // symmetric limit
        grad += lambda(j) * kernel3_.phi1_over_r(r) * u;
    }
    if (kind_ == TrialSpaceKind::KRBF) {
        int col = n;
        for (int axis = 0; axis < 3; ++axis) {
            for (double c : centers1_[axis]) {
                const double t = x[axis] - c;
                if (t != 0.0) grad[axis] += lambda(col) * kernel1_->phi1_over_r(std::abs(t)) * t;
                ++col;
            }
        }
    } else if (kind_ == TrialSpaceKind::HRBF) {
        for (int j = 0; j < n; ++j) {
            const Vec3 u = x - sites_[j];
            const double r = u.norm();
            const double g = kernel3_.phi1_over_r(r);
            const double h2f = (r == 0.0) ? 0.0 : kernel3_.phi2m1_over_r2(r);
            for (int k = 0; k < 3; ++k) {
                const double lk = lambda(n * (1 + k) + j);
                if (lk == 0.0) continue;
                Vec3 gb = -h2f * u[k] * u;
                gb[k] -= g;
                grad += lk * gb;
            }
        }
    }
    return grad;
}

Mat3 TrialSpaceAssembly::hessian(const Vec3& x, const VectorXd& lambda) const {
    if (!hessian_supported())
        throw std::domain_error("TrialSpaceAssembly: kernel order too low for Hessians");
    Mat3 hess = Mat3::Zero();
    const int n = num_constraints();
    for (int j = 0; j < n; ++j) {
        const Vec3 u = x - sites_[j];
        const double r = u.norm();
        const double g = kernel3_.phi1_over_r(r);
        hess.diagonal().array() += lambda(j) * g;
        if (r > 0.0) {
            // materialized outer product keeps the accumulation bitwise symmetric
            const Mat3 outer = u * u.transpose();
            hess += (lambda(j) * kernel3_.phi2m1_over_r2(r)) * outer;
        }
    }
    if (kind_ == TrialSpaceKind::KRBF) {
        int col = n;
        for (int axis = 0; axis < 3; ++axis) {
            for (double c : centers1_[axis]) {
                hess(axis, axis) += lambda(col) * kernel1_->phi2(std::abs(x[axis] - c));
                ++col;
            }
        }
    } else if (kind_ == TrialSpaceKind::HRBF) {
        for (int j = 0; j < n; ++j) {
            const Vec3 u = x - sites_[j];
            const double r = u.norm();
            if (r == 0.0) continue;  // all terms carry u factors
            const double h2f = kernel3_.phi2m1_over_r2(r);
            const double h3f = -kernel3_.phi3_factor(r);  // +phi_{nu-3}
            const Mat3 outer = u * u.transpose();
            for (int k = 0; k < 3; ++k) {
                const double lk = lambda(n * (1 + k) + j);
                if (lk == 0.0) continue;
                Mat3 hb = (h3f * u[k]) * outer;
                for (int i = 0; i < 3; ++i) {
                    hb(i, k) -= h2f * u[i];
                    hb(k, i) -= h2f * u[i];
                    hb(i, i) -= h2f * u[k];
                }
                hess += lk * hb;
            }
        }
    }
    return hess;
}

bool TrialSpaceAssembly::hessian_supported() const {
    // Hessian entries need phi_{nu-2}; HRBF basis Hessians need phi_{nu-3}
    // finite in the removable-limit sense, i.e. one more order.
    const int tau = kernel3_.tau();
    return kind_ == TrialSpaceKind::HRBF ? tau >= 4 : tau >= 3;
}

TrialSpaceAssembly assemble_rbf(const Stencil& stencil, const MaternKernel& kernel3) {
    if (kernel3.dim() != 3) throw std::invalid_argument("assemble_rbf: kernel must be 3-D");
    TrialSpaceAssembly as(TrialSpaceKind::RBF, kernel3);
    as.sites_ = stencil.constraint_points();
    check_distinct_sites(as.sites_);
    const int n = static_cast<int>(as.sites_.size());
    as.m_ = n;
    as.A_.resize(n, n);
    for (int i = 0; i < n; ++i) as.eval_basis_row(as.sites_[i], as.A_.row(i));
    as.k_blocks_ = {as.A_};
    return as;
}

TrialSpaceAssembly assemble_krbf(const Stencil& stencil, const MaternKernel& kernel3,
                                 const MaternKernel& kernel1, const CenterConfig& config) {
    if (kernel3.dim() != 3 || kernel1.dim() != 1)
        throw std::invalid_argument("assemble_krbf: need a 3-D and a 1-D kernel");
    // the families must live in the same Sobolev class; by the shift identity
    // the 1-D member is the axis degeneration of the 3-D one
    if (kernel3.nu() != kernel1.nu())
        throw std::invalid_argument("assemble_krbf: kernel orders must match in nu = tau - d/2");
    TrialSpaceAssembly as(TrialSpaceKind::KRBF, kernel3);
    as.kernel1_ = kernel1;
    as.sites_ = stencil.constraint_points();
    check_distinct_sites(as.sites_);
    const int n = static_cast<int>(as.sites_.size());

    CenterConfig resolved = config;
    if (resolved.reference_length <= 0.0 && resolved.stretches())
        resolved.reference_length = 2.0 * max_pairwise_distance(as.sites_);
    for (int axis = 0; axis < 3; ++axis)
        as.centers1_[axis] = project_centers(as.sites_, axis, resolved);

    as.m_ = n;
    for (int axis = 0; axis < 3; ++axis) as.m_ += static_cast<int>(as.centers1_[axis].size());

    as.A_.resize(n, as.m_);
    for (int i = 0; i < n; ++i) as.eval_basis_row(as.sites_[i], as.A_.row(i));

    as.k_blocks_.reserve(4);
    as.k_blocks_.push_back(as.A_.leftCols(n));  // 3-D kernel Gram on the sites
    for (int axis = 0; axis < 3; ++axis) {
        const auto& c = as.centers1_[axis];
        const int m = static_cast<int>(c.size());
        MatrixXd block(m, m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) block(i, j) = kernel1.eval(std::abs(c[i] - c[j]));
        as.k_blocks_.push_back(std::move(block));
    }
    return as;
}

TrialSpaceAssembly assemble_hrbf(const Stencil& stencil, const MaternKernel& kernel3) {
    if (kernel3.dim() != 3) throw std::invalid_argument("assemble_hrbf: kernel must be 3-D");
    if (kernel3.tau() < 3)
        throw std::domain_error("assemble_hrbf: tau >= 3 required for derivative blocks");
    TrialSpaceAssembly as(TrialSpaceKind::HRBF, kernel3);
    as.sites_ = stencil.constraint_points();
    check_distinct_sites(as.sites_);
    const int n = static_cast<int>(as.sites_.size());
    as.m_ = 4 * n;

    as.A_.resize(n, as.m_);
    for (int i = 0; i < n; ++i) as.eval_basis_row(as.sites_[i], as.A_.row(i));

    // Dense derivative Gram: value/value and value/derivative blocks coincide
    // with A; the derivative/derivative block is the mixed second derivative.
    MatrixXd gram(as.m_, as.m_);
    gram.topRows(n) = as.A_;
    gram.bottomLeftCorner(3 * n, n) = as.A_.rightCols(3 * n).transpose();
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const Vec3 u = as.sites_[i] - as.sites_[j];
            const double r = u.norm();
            const double g = kernel3.phi1_over_r(r);
            const double h2f = (r == 0.0) ? 0.0 : kernel3.phi2m1_over_r2(r);
            for (int l = 0; l < 3; ++l) {
                for (int k = 0; k < 3; ++k) {
                    const double v = -((l == k ? g : 0.0) + u[l] * u[k] * h2f);
                    gram(n * (1 + l) + i, n * (1 + k) + j) = v;
                    gram(n * (1 + k) + j, n * (1 + l) + i) = v;
                }
            }
        }
    }
    as.k_blocks_ = {std::move(gram)};
    return as;
}

}  // namespace minsurf
