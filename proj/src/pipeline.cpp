#include "minsurf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

namespace minsurf {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double nan_max(double acc, double value) {
    if (std::isnan(value)) return acc;
    if (std::isnan(acc)) return value;
    return std::max(acc, value);
}

std::string stencil_label(const std::vector<int>& sizes) {
    if (sizes.size() == 1) return std::to_string(sizes.front());
    return std::to_string(*std::min_element(sizes.begin(), sizes.end())) + "-" +
           std::to_string(*std::max_element(sizes.begin(), sizes.end()));
}

constexpr std::size_t kFillProbeCount = 20000;

}  // namespace

std::string method_name(EstimatorMethod method) {
    switch (method) {
        case EstimatorMethod::PCA: return "pca";
        case EstimatorMethod::RBF: return "rbf";
        case EstimatorMethod::HRBF: return "hrbf";
        case EstimatorMethod::KRBF: return "krbf";
    }
    return "?";
}

EstimatorMethod method_from_name(const std::string& name) {
    if (name == "pca") return EstimatorMethod::PCA;
    if (name == "rbf") return EstimatorMethod::RBF;
    if (name == "hrbf") return EstimatorMethod::HRBF;
    if (name == "krbf") return EstimatorMethod::KRBF;
    throw std::invalid_argument("unknown method: " + name);
}

std::size_t CloudEstimate::failures() const {
    std::size_t count = 0;
    for (const auto& pe : per_point)
        if (!pe.ok()) ++count;
    return count;
}

double CloudEstimate::max_error() const {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& pe : per_point)
        if (pe.ok()) best = nan_max(best, pe.error);
    return best;
}

double CloudEstimate::rms_error() const {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& pe : per_point) {
        if (pe.ok() && !std::isnan(pe.error)) {
            sum += pe.error * pe.error;
            ++count;
        }
    }
    if (count == 0) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(sum / static_cast<double>(count));
}

namespace {

struct EstimateContext {
    const PointCloud& cloud;
    const SpatialIndex& index;
    const EstimatorSpec& spec;
    const std::vector<Vec3>* ground_truth;  // may be null
    Vec3 centroid;
    std::optional<MaternKernel> kernel3;
    std::optional<MaternKernel> kernel1;
};

MaternKernel radial_kernel_for(const EstimatorSpec& spec) {
    // the mixed-dimensional space pairs the (tau+1)-order radial kernel with
    // tau-order 1-D kernels: one Sobolev class, linked by the shift identity
    return MaternKernel(spec.method == EstimatorMethod::KRBF ? spec.tau + 1 : spec.tau, 3);
}

Vec3 orientation_reference(const EstimateContext& ctx, std::size_t i) {
    if (ctx.ground_truth) return (*ctx.ground_truth)[i];
    Vec3 dir = ctx.cloud.points[i] - ctx.centroid;
    const double len = dir.norm();
    if (len < 1e-12) return Vec3::UnitZ();
    return dir / len;
}

TrialSpaceAssembly assemble_for(const EstimateContext& ctx, const Stencil& st) {
    switch (ctx.spec.method) {
        case EstimatorMethod::RBF: return assemble_rbf(st, *ctx.kernel3);
        case EstimatorMethod::HRBF: return assemble_hrbf(st, *ctx.kernel3);
        case EstimatorMethod::KRBF:
            return assemble_krbf(st, *ctx.kernel3, *ctx.kernel1, ctx.spec.center_config);
        case EstimatorMethod::PCA: break;
    }
    throw std::logic_error("assemble_for: PCA has no trial space");
}

PointEstimate estimate_point_on(const EstimateContext& ctx, std::size_t i, Stencil st) {
    PointEstimate pe;
    const Vec3 ref = orientation_reference(ctx, i);

    if (ctx.spec.method == EstimatorMethod::PCA) {
        const Vec3 normal = orient_normal(pca_normal(st), ref);
        pe.frame.normal = normal;
        if (ctx.ground_truth) pe.error = normal_error(normal, (*ctx.ground_truth)[i]);
        return pe;
    }

    // ghost direction: reference normals when the data provides them (the
    // synthetic studies and annotated scans), otherwise the oriented PCA
    // estimate
    const Vec3 normal = ctx.ground_truth ? ref : orient_normal(pca_normal(st), ref);
    attach_ghosts(st, normal, default_ghost_offset(st), ctx.spec.level_constant);
    TrialSpaceAssembly assembly = assemble_for(ctx, st);

    MinNormProblem problem;
    problem.A = assembly.constraint_matrix();
    problem.b = st.constraint_values();
    problem.objective = ctx.spec.norm;
    const bool rbf_square = ctx.spec.method == EstimatorMethod::RBF;
    if (!rbf_square && ctx.spec.norm == NormObjective::Native)
        problem.k_blocks = assembly.norm_gram_blocks();

    MinNormSolution sol;
    if (ctx.spec.tikhonov_mu) {
        sol = solve_tikhonov(problem, *ctx.spec.tikhonov_mu);
    } else if (rbf_square || ctx.spec.norm == NormObjective::L2) {
        // the square RBF system has a unique solution; the rank-revealing
        // path doubles as its solver
        sol = solve_l2(problem);
    } else {
        sol = solve_native(problem);
    }

    const Vec3 p0 = st.center();
    FittedImplicit fit(std::move(assembly), std::move(sol.lambda));
    if (fit.curvature_supported()) {
        pe.frame = fit.frame(p0, normal);
    } else {
        pe.frame = fit.normal_frame(p0, normal);
    }
    if (ctx.ground_truth) pe.error = normal_error(pe.frame.normal, (*ctx.ground_truth)[i]);
    pe.status = pe.frame.dubious ? 1 : 0;
    return pe;
}

PointEstimate estimate_point(const EstimateContext& ctx, std::size_t i) {
    return estimate_point_on(
        ctx, i, knn_stencil(ctx.cloud, ctx.index, i, static_cast<std::size_t>(ctx.spec.stencil_size)));
}

}  // namespace

CloudEstimate estimate_cloud(const PointCloud& cloud, const EstimatorSpec& spec,
                             const std::vector<Vec3>* ground_truth) {
    if (cloud.size() < static_cast<std::size_t>(spec.stencil_size))
        throw std::domain_error("estimate_cloud: cloud smaller than the stencil size");
    if (ground_truth && ground_truth->size() != cloud.size())
        throw std::invalid_argument("estimate_cloud: ground-truth size mismatch");
    if (!ground_truth && cloud.has_normals()) ground_truth = &cloud.exact_normals;

    SpatialIndex index(cloud.points);
    EstimateContext ctx{cloud, index, spec, ground_truth, Vec3::Zero(), std::nullopt, std::nullopt};
    for (const Vec3& p : cloud.points) ctx.centroid += p;
    ctx.centroid /= static_cast<double>(cloud.size());
    if (spec.method != EstimatorMethod::PCA) {
        ctx.kernel3.emplace(radial_kernel_for(spec));
        if (spec.method == EstimatorMethod::KRBF) ctx.kernel1.emplace(spec.tau, 1);
    }

    CloudEstimate result;
    result.per_point.resize(cloud.size());
    parallel_for(
        cloud.size(),
        [&](std::size_t i) {
            try {
                result.per_point[i] = estimate_point(ctx, i);
            } catch (const std::exception& e) {
                result.per_point[i].status = 2;
                result.per_point[i].message = e.what();
            }
        },
        spec.num_threads);
    return result;
}


namespace {

double cached_fill_distance(const ImplicitSurface& shape, const PointCloud& cloud) {
    const PointCloud probe = shape.sample_halton(kFillProbeCount);
    return fill_distance(cloud, probe);
}

}  // namespace

ExperimentReport run_config_study(const ImplicitSurface& shape,
                                  const std::vector<std::size_t>& n_list,
                                  const std::vector<int>& tau_list,
                                  const std::vector<int>& stencil_sizes,
                                  const std::vector<int>& configs, unsigned num_threads) {
    if (n_list.empty() || tau_list.empty() || stencil_sizes.empty() || configs.empty())
        throw std::domain_error("run_config_study: empty parameter list");
    ExperimentReport report;
    for (std::size_t n : n_list) {
        const PointCloud cloud = shape.sample_halton(n);
        const double fill = cached_fill_distance(shape, cloud);
        for (int tau : tau_list) {
            for (int config : configs) {
                const auto start = Clock::now();
                ReportRow row;
                row.shape = shape.name();
                row.n = n;
                row.fill = fill;
                row.tau = tau;
                row.stencil_sizes = stencil_label(stencil_sizes);
                row.method = "krbf";
                row.norm = "native";
                row.config = config;
                for (int ns : stencil_sizes) {
                    EstimatorSpec spec;
                    spec.method = EstimatorMethod::KRBF;
                    spec.tau = tau;
                    spec.stencil_size = ns;
                    spec.center_config = CenterConfig::from_index(config);
                    spec.num_threads = num_threads;
                    const CloudEstimate est = estimate_cloud(cloud, spec);
                    row.max_err = nan_max(row.max_err, est.max_error());
                    row.rms_err = nan_max(row.rms_err, est.rms_error());
                    row.failures += est.failures();
                }
                row.runtime_ms = elapsed_ms(start);
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

ExperimentReport run_norm_study(const ImplicitSurface& shape,
                                const std::vector<std::size_t>& n_list,
                                const std::vector<int>& tau_list,
                                const std::vector<int>& stencil_sizes, unsigned num_threads) {
    if (n_list.empty() || tau_list.empty() || stencil_sizes.empty())
        throw std::domain_error("run_norm_study: empty parameter list");
    ExperimentReport report;
    const std::pair<EstimatorMethod, NormObjective> variants[] = {
        {EstimatorMethod::HRBF, NormObjective::Native},
        {EstimatorMethod::HRBF, NormObjective::L2},
        {EstimatorMethod::KRBF, NormObjective::Native},
        {EstimatorMethod::KRBF, NormObjective::L2},
    };
    for (std::size_t n : n_list) {
        const PointCloud cloud = shape.sample_halton(n);
        const double fill = cached_fill_distance(shape, cloud);
        for (int tau : tau_list) {
            for (const auto& [method, norm] : variants) {
                const auto start = Clock::now();
                ReportRow row;
                row.shape = shape.name();
                row.n = n;
                row.fill = fill;
                row.tau = tau;
                row.stencil_sizes = stencil_label(stencil_sizes);
                row.method = method_name(method);
                row.norm = norm == NormObjective::Native ? "native" : "l2";
                row.config = method == EstimatorMethod::KRBF ? 4 : 0;
                for (int ns : stencil_sizes) {
                    EstimatorSpec spec;
                    spec.method = method;
                    spec.tau = tau;
                    spec.stencil_size = ns;
                    spec.norm = norm;
                    spec.num_threads = num_threads;
                    const CloudEstimate est = estimate_cloud(cloud, spec);
                    row.max_err = nan_max(row.max_err, est.max_error());
                    row.rms_err = nan_max(row.rms_err, est.rms_error());
                    row.failures += est.failures();
                }
                row.runtime_ms = elapsed_ms(start);
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

ExperimentReport run_convergence(const ImplicitSurface& shape, const std::vector<int>& tau_list,
                                 const std::vector<std::size_t>& n_list,
                                 const std::vector<int>& stencil_sizes,
                                 const std::vector<EstimatorMethod>& methods,
                                 unsigned num_threads) {
    if (tau_list.empty() || n_list.size() < 3 || stencil_sizes.empty() || methods.empty())
        throw std::domain_error("run_convergence: need >= 3 resolutions and nonempty lists");
    ExperimentReport report;
    std::vector<PointCloud> clouds;
    std::vector<double> fills;
    for (std::size_t n : n_list) {
        clouds.push_back(shape.sample_halton(n));
        fills.push_back(cached_fill_distance(shape, clouds.back()));
    }
    for (int tau : tau_list) {
        for (EstimatorMethod method : methods) {
            std::vector<double> log_h, log_e;
            for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
                const auto start = Clock::now();
                ReportRow row;
                row.shape = shape.name();
                row.n = n_list[ni];
                row.fill = fills[ni];
                row.tau = tau;
                row.stencil_sizes = stencil_label(stencil_sizes);
                row.method = method_name(method);
                row.norm = method == EstimatorMethod::RBF ? "direct" : "native";
                row.config = method == EstimatorMethod::KRBF ? 4 : 0;
                for (int ns : stencil_sizes) {
                    EstimatorSpec spec;
                    spec.method = method;
                    spec.tau = tau;
                    spec.stencil_size = ns;
                    spec.num_threads = num_threads;
                    const CloudEstimate est = estimate_cloud(clouds[ni], spec);
                    row.max_err = nan_max(row.max_err, est.max_error());
                    row.rms_err = nan_max(row.rms_err, est.rms_error());
                    row.failures += est.failures();
                }
                row.runtime_ms = elapsed_ms(start);
                if (std::isfinite(row.max_err) && row.max_err > 0.0 && row.fill > 0.0) {
                    log_h.push_back(std::log(row.fill));
                    log_e.push_back(std::log(row.max_err));
                }
                report.rows.push_back(std::move(row));
            }
            SlopeRow slope;
            slope.method = method_name(method);
            slope.tau = tau;
            slope.reference = static_cast<double>(tau - 1);
            if (log_h.size() >= 2) {
                const double n = static_cast<double>(log_h.size());
                const double sx = std::accumulate(log_h.begin(), log_h.end(), 0.0);
                const double sy = std::accumulate(log_e.begin(), log_e.end(), 0.0);
                double sxx = 0.0, sxy = 0.0;
                for (std::size_t i = 0; i < log_h.size(); ++i) {
                    sxx += log_h[i] * log_h[i];
                    sxy += log_h[i] * log_e[i];
                }
                const double denom = n * sxx - sx * sx;
                if (std::abs(denom) > 1e-30) slope.slope = (n * sxy - sx * sy) / denom;
            }
            report.slopes.push_back(slope);
        }
    }
    return report;
}

ExperimentReport run_flattening_sphube(const std::vector<double>& s_list, std::size_t n, int tau,
                                       int stencil_size, const std::string& per_point_dir,
                                       unsigned num_threads) {
    if (s_list.empty()) throw std::domain_error("run_flattening_sphube: empty s list");
    for (double s : s_list)
        if (s < 0.0 || s >= 1.0)
            throw std::domain_error("run_flattening_sphube: s values must lie in [0,1)");
    ExperimentReport report;
    for (double s : s_list) {
        const ImplicitSurface shape = ImplicitSurface::sphube(s, 1.0);
        const PointCloud cloud = shape.sample_halton(n);
        const double fill = cached_fill_distance(shape, cloud);

        const EstimatorMethod methods[] = {EstimatorMethod::PCA, EstimatorMethod::RBF,
                                           EstimatorMethod::HRBF, EstimatorMethod::KRBF};
        std::vector<CloudEstimate> estimates(4);
        std::vector<double> runtimes(4);
        for (int mi = 0; mi < 4; ++mi) {
            const auto start = Clock::now();
            EstimatorSpec spec;
            spec.method = methods[mi];
            spec.tau = tau;
            spec.stencil_size = stencil_size;
            spec.num_threads = num_threads;
            estimates[mi] = estimate_cloud(cloud, spec);
            runtimes[mi] = elapsed_ms(start);
        }

        // best-of(RBF, HRBF): per-point minimum error
        CloudEstimate best;
        best.per_point.resize(cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const PointEstimate& r = estimates[1].per_point[i];
            const PointEstimate& h = estimates[2].per_point[i];
            if (!r.ok() || std::isnan(r.error)) {
                best.per_point[i] = h;
            } else if (!h.ok() || std::isnan(h.error)) {
                best.per_point[i] = r;
            } else {
                best.per_point[i] = (r.error <= h.error) ? r : h;
            }
        }

        auto push_row = [&](const std::string& name, const CloudEstimate& est, int config,
                            const std::string& norm, double ms) {
            ReportRow row;
            row.shape = shape.name();
            row.n = n;
            row.fill = fill;
            row.tau = tau;
            row.stencil_sizes = std::to_string(stencil_size);
            row.method = name;
            row.norm = norm;
            row.config = config;
            row.max_err = est.max_error();
            row.rms_err = est.rms_error();
            row.failures = est.failures();
            row.runtime_ms = ms;
            report.rows.push_back(std::move(row));
            if (!per_point_dir.empty()) {
                char fname[128];
                std::snprintf(fname, sizeof fname, "%s/sphube_s%g_%s.csv", per_point_dir.c_str(),
                              s, name.c_str());
                emit_per_point_csv(cloud, est, fname);
            }
        };
        push_row("pca", estimates[0], 0, "-", runtimes[0]);
        push_row("rbf", estimates[1], 0, "direct", runtimes[1]);
        push_row("hrbf", estimates[2], 0, "native", runtimes[2]);
        push_row("best_rbf_hrbf", best, 0, "native", runtimes[1] + runtimes[2]);
        push_row("krbf", estimates[3], 4, "native", runtimes[3]);
    }
    return report;
}

PointCloud fair_cloud(const PointCloud& cloud, std::size_t iterations, const EstimatorSpec& spec,
                      std::optional<double> sigma_kappa) {
    if (spec.method == EstimatorMethod::PCA)
        throw std::invalid_argument("fair_cloud: curvature source requires a trial space");
    PointCloud current = cloud;
    current.exact_normals.clear();
    current.source = cloud.source + " +faired";
    if (cloud.size() < static_cast<std::size_t>(spec.stencil_size))
        throw std::domain_error("fair_cloud: cloud smaller than the stencil size");

    const std::size_t n = cloud.size();
    for (std::size_t iter = 0; iter < iterations; ++iter) {
        SpatialIndex index(current.points);
        EstimateContext ctx{current,      index,        spec, nullptr,
                            Vec3::Zero(), std::nullopt, std::nullopt};
        for (const Vec3& p : current.points) ctx.centroid += p;
        ctx.centroid /= static_cast<double>(n);
        ctx.kernel3.emplace(radial_kernel_for(spec));
        if (spec.method == EstimatorMethod::KRBF) ctx.kernel1.emplace(spec.tau, 1);

        std::vector<double> kappa(n, std::numeric_limits<double>::quiet_NaN());
        std::vector<double> offsets(n, 0.0);
        std::vector<std::vector<std::size_t>> neighborhoods(n);
        parallel_for(
            n,
            [&](std::size_t i) {
                Stencil st = knn_stencil(current, index, i,
                                         static_cast<std::size_t>(spec.stencil_size));
                neighborhoods[i] = st.neighbor_indices;
                offsets[i] = default_ghost_offset(st);
                try {
                    const PointEstimate pe = estimate_point_on(ctx, i, std::move(st));
                    if (pe.ok() && pe.frame.has_curvature()) kappa[i] = pe.frame.kappa1;
                } catch (const std::exception&) {
                    // leave NaN: the point is flagged unmoved below
                }
            },
            spec.num_threads);

        double sk;
        if (sigma_kappa) {
            sk = *sigma_kappa;
        } else {
            std::vector<double> mags;
            mags.reserve(n);
            for (double k : kappa)
                if (std::isfinite(k)) mags.push_back(std::abs(k));
            if (mags.empty()) throw NumericalError("fair_cloud: curvature failed at every point");
            std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
            sk = mags[mags.size() / 2];
        }
        const bool use_curvature_weight = std::isfinite(sk) && sk > 0.0;

        std::vector<Vec3> updated = current.points;
        parallel_for(
            n,
            [&](std::size_t i) {
                if (!std::isfinite(kappa[i])) return;  // flagged: unmoved
                const Vec3& pi = current.points[i];
                const double sigma_s = offsets[i];
                if (!(sigma_s > 0.0)) return;
                Vec3 accum = Vec3::Zero();
                double wsum = 0.0;
                for (std::size_t j : neighborhoods[i]) {
                    if (!std::isfinite(kappa[j])) continue;
                    const Vec3& pj = current.points[j];
                    double w = std::exp(-(pj - pi).squaredNorm() / (sigma_s * sigma_s));
                    if (use_curvature_weight) {
                        const double kr = kappa[j] / sk;
                        w *= std::exp(-kr * kr);
                    }
                    accum += w * pj;
                    wsum += w;
                }
                if (wsum > 0.0) updated[i] = accum / wsum;
            },
            spec.num_threads);
        current.points = std::move(updated);
    }
    return current;
}

PointCloud ingest_xyz(const std::string& path) { return read_xyz(path); }

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "shape,N,fill,tau,Ns,method,norm,config,max_err,rms_err,runtime_ms\n";
    for (const ReportRow& row : report.rows) {
        out << row.shape << ',' << row.n << ',' << format_double(row.fill) << ',' << row.tau
            << ',' << row.stencil_sizes << ',' << row.method << ',' << row.norm << ','
            << row.config << ',' << format_double(row.max_err) << ','
            << format_double(row.rms_err) << ',' << format_double(row.runtime_ms) << '\n';
    }
}

void emit_slopes(const ExperimentReport& report, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "method,tau,slope,reference\n";
    for (const SlopeRow& row : report.slopes) {
        out << row.method << ',' << row.tau << ',' << format_double(row.slope) << ','
            << format_double(row.reference) << '\n';
    }
}

void emit_per_point_csv(const PointCloud& cloud, const CloudEstimate& estimate,
                        const std::string& path) {
    if (cloud.size() != estimate.per_point.size())
        throw std::invalid_argument("emit_per_point_csv: size mismatch");
    std::ofstream out = open_out(path);
    out << "index,x,y,z,nx,ny,nz,kappa1,kappa2,gaussian,mean,error,flag\n";
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        const PointEstimate& pe = estimate.per_point[i];
        const SurfaceFrame& f = pe.frame;
        out << i << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
            << format_double(p.z()) << ',' << format_double(f.normal.x()) << ','
            << format_double(f.normal.y()) << ',' << format_double(f.normal.z()) << ','
            << format_double(f.kappa1) << ',' << format_double(f.kappa2) << ','
            << format_double(f.gaussian) << ',' << format_double(f.mean) << ','
            << format_double(pe.error) << ',' << pe.status << '\n';
    }
}

}  // namespace minsurf
