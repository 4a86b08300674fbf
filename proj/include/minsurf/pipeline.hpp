#pragma once

#include "minsurf/differential.hpp"
#include "minsurf/io.hpp"
#include "minsurf/solver.hpp"

namespace minsurf {

enum class EstimatorMethod { PCA, RBF, HRBF, KRBF };

std::string method_name(EstimatorMethod method);
EstimatorMethod method_from_name(const std::string& name);

/// One per-point estimator configuration. Defaults follow the experiment
/// setup used throughout: tau 5, stencil size 40, native norm, stretched
/// regrid centers, level constant 1. For the mixed-dimensional space `tau`
/// selects the Sobolev class: the radial block uses the (tau+1)-order 3-D
/// kernel whose axis degeneration is the tau-order 1-D kernel.
struct EstimatorSpec {
    EstimatorMethod method = EstimatorMethod::KRBF;
    int tau = 5;
    int stencil_size = 40;
    NormObjective norm = NormObjective::Native;
    CenterConfig center_config = {CenterMode::StretchRegrid, 0.0};
    std::optional<double> tikhonov_mu;
    double level_constant = 1.0;
    unsigned num_threads = 0;  // 0: hardware concurrency
};

/// Per-point outcome. status: 0 ok, 1 ok but the discarded shape-operator
/// mode was not negligible, 2 failed (frame invalid, message set).
struct PointEstimate {
    SurfaceFrame frame;
    double error = std::numeric_limits<double>::quiet_NaN();
    int status = 0;
    std::string message;

    bool ok() const { return status < 2; }
};

struct CloudEstimate {
    std::vector<PointEstimate> per_point;

    std::size_t failures() const;
    /// Max and RMS of per-point errors over non-failed points with ground truth.
    double max_error() const;
    double rms_error() const;
};

/// Runs the full per-point pipeline over the cloud: stencil, PCA normal,
/// orientation, ghost pair, trial-space assembly, min-norm (or Tikhonov)
/// solve, frame extraction at the point of interest. Failures are isolated
/// per point. Ground-truth normals (argument, else the cloud's own) provide
/// the orientation reference and the error metric; without them orientation
/// falls back to "away from the cloud centroid" and errors stay NaN.
CloudEstimate estimate_cloud(const PointCloud& cloud, const EstimatorSpec& spec,
                             const std::vector<Vec3>* ground_truth = nullptr);

struct ReportRow {
    std::string shape;
    std::size_t n = 0;
    double fill = std::numeric_limits<double>::quiet_NaN();
    int tau = 0;
    std::string stencil_sizes;  // single size or "lo-hi" range
    std::string method;
    std::string norm;
    int config = 0;  // 1..4 for KRBF center configs, 0 otherwise
    double max_err = std::numeric_limits<double>::quiet_NaN();
    double rms_err = std::numeric_limits<double>::quiet_NaN();
    double runtime_ms = 0.0;
    std::size_t failures = 0;  // not emitted; per-point rows carry the flags
};

struct SlopeRow {
    std::string method;
    int tau = 0;
    double slope = std::numeric_limits<double>::quiet_NaN();  // NaN: undefined fit
    double reference = 0.0;                                   // tau - 1
};

struct ExperimentReport {
    std::string schema_version = "minsurf-report-1";
    std::vector<ReportRow> rows;
    std::vector<SlopeRow> slopes;  // convergence studies only
};

/// Normal-estimation accuracy of the KRBF space across the four KAN center
/// configurations; per (N, tau, config) the max error over the stencil range.
ExperimentReport run_config_study(const ImplicitSurface& shape,
                                  const std::vector<std::size_t>& n_list,
                                  const std::vector<int>& tau_list,
                                  const std::vector<int>& stencil_sizes,
                                  const std::vector<int>& configs = {1, 2, 3, 4},
                                  unsigned num_threads = 0);

/// {HRBF, KRBF} × {native, l2} under the config-study protocol.
ExperimentReport run_norm_study(const ImplicitSurface& shape,
                                const std::vector<std::size_t>& n_list,
                                const std::vector<int>& tau_list,
                                const std::vector<int>& stencil_sizes,
                                unsigned num_threads = 0);

/// Error vs fill distance per method and tau, with fitted log-log slopes
/// (reference slope tau−1).
ExperimentReport run_convergence(const ImplicitSurface& shape, const std::vector<int>& tau_list,
                                 const std::vector<std::size_t>& n_list,
                                 const std::vector<int>& stencil_sizes,
                                 const std::vector<EstimatorMethod>& methods,
                                 unsigned num_threads = 0);

/// PCA, best-of(RBF,HRBF) and KRBF max errors per squareness value; when
/// per_point_dir is nonempty a heatmap CSV per (s, method) is written there.
ExperimentReport run_flattening_sphube(const std::vector<double>& s_list, std::size_t n,
                                       int tau = 5, int stencil_size = 40,
                                       const std::string& per_point_dir = "",
                                       unsigned num_threads = 0);

/// One Jacobi-style fairing pass per iteration: estimate the largest
/// principal curvature everywhere per `spec`, then move every point to the
/// curvature- and distance-weighted average of its stencil. sigma_kappa
/// defaults to the per-iteration median |kappa1|; points whose estimate
/// failed stay unmoved.
PointCloud fair_cloud(const PointCloud& cloud, std::size_t iterations, const EstimatorSpec& spec,
                      std::optional<double> sigma_kappa = std::nullopt);

/// XYZ ingest (surfaces-module format).
PointCloud ingest_xyz(const std::string& path);

/// Summary CSV: shape,N,fill,tau,Ns,method,norm,config,max_err,rms_err,runtime_ms.
void emit_report(const ExperimentReport& report, const std::string& path);

/// Slope CSV for convergence reports: method,tau,slope,reference.
void emit_slopes(const ExperimentReport& report, const std::string& path);

/// Per-point CSV: index,x,y,z,nx,ny,nz,kappa1,kappa2,gaussian,mean,error,flag.
void emit_per_point_csv(const PointCloud& cloud, const CloudEstimate& estimate,
                        const std::string& path);

}  // namespace minsurf
