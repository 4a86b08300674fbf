#pragma once

#include "minsurf/kernel.hpp"
#include "minsurf/stencil.hpp"

#include <array>

namespace minsurf {

enum class TrialSpaceKind { RBF, HRBF, KRBF };

enum class CenterMode { Original, Regrid, Stretch, StretchRegrid };

/// Placement of the 1-D trial centers in the mixed-dimensional space.
/// reference_length <= 0 selects the default rule: twice the largest pairwise
/// distance within the constraint set, applied per axis around the projection
/// mean.
struct CenterConfig {
    CenterMode mode = CenterMode::StretchRegrid;
    double reference_length = 0.0;

    static CenterConfig from_index(int config_1_to_4);
    int index() const;  // 1..4
    bool stretches() const {
        return mode == CenterMode::Stretch || mode == CenterMode::StretchRegrid;
    }
};

/// 1-D trial centers for one axis. Evaluation points are never transformed;
/// only the basis centers move. Exact duplicates are dropped keep-first in
/// the non-regrid modes. Throws GeometryError on a zero-width interval when
/// the mode rescales or regrids.
std::vector<double> project_centers(const std::vector<Vec3>& constraint_points, int axis,
                                    const CenterConfig& config);

/// Constraint matrix A, norm Gram K and basis bookkeeping for one stencil.
/// K is kept as diagonal blocks (a single block when dense); rows of A are
/// produced by the same eval_basis_row used for later point evaluation.
class TrialSpaceAssembly {
  public:
    TrialSpaceKind kind() const { return kind_; }
    int num_constraints() const { return static_cast<int>(sites_.size()); }
    int basis_count() const { return m_; }
    const MatrixXd& constraint_matrix() const { return A_; }
    const std::vector<MatrixXd>& norm_gram_blocks() const { return k_blocks_; }
    MatrixXd norm_gram_dense() const;
    const MaternKernel& kernel3() const { return kernel3_; }
    const std::vector<Vec3>& centers3() const { return sites_; }
    const std::array<std::vector<double>, 3>& centers1() const { return centers1_; }

    using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

    /// One row of the trial-basis evaluation at x (length basis_count()).
    void eval_basis_row(const Vec3& x, RowRef row) const;

    double value(const Vec3& x, const VectorXd& lambda) const;
    Vec3 gradient(const Vec3& x, const VectorXd& lambda) const;
    Mat3 hessian(const Vec3& x, const VectorXd& lambda) const;

    /// Hessians need one more derivative order than gradients; HRBF two more.
    bool hessian_supported() const;

    friend TrialSpaceAssembly assemble_rbf(const Stencil&, const MaternKernel&);
    friend TrialSpaceAssembly assemble_krbf(const Stencil&, const MaternKernel&,
                                            const MaternKernel&, const CenterConfig&);
    friend TrialSpaceAssembly assemble_hrbf(const Stencil&, const MaternKernel&);

  private:
    TrialSpaceAssembly(TrialSpaceKind kind, const MaternKernel& k3) : kind_(kind), kernel3_(k3) {}

    TrialSpaceKind kind_;
    MaternKernel kernel3_;
    std::optional<MaternKernel> kernel1_;
    std::vector<Vec3> sites_;                      // constraint points = 3-D centers
    std::array<std::vector<double>, 3> centers1_;  // KRBF only
    MatrixXd A_;
    std::vector<MatrixXd> k_blocks_;
    int m_ = 0;
};

/// A = K = Φ_{τ,3}(Ξ,Ξ), the classical square interpolation system.
TrialSpaceAssembly assemble_rbf(const Stencil& stencil, const MaternKernel& kernel3);

/// Mixed-dimensional space: A = [Φ_{τ,3}(Ξ,Ξ) | Φ_{τ,1} per axis], K block
/// diagonal over the four subspaces.
TrialSpaceAssembly assemble_krbf(const Stencil& stencil, const MaternKernel& kernel3,
                                 const MaternKernel& kernel1, const CenterConfig& config);

/// Hermite space: the kernel plus its first derivatives in the center
/// argument; K is the dense 4N×4N derivative Gram.
TrialSpaceAssembly assemble_hrbf(const Stencil& stencil, const MaternKernel& kernel3);

}  // namespace minsurf
