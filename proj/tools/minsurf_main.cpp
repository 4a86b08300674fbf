#include "minsurf/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace minsurf;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct ShapeOptions {
    std::string shape = "ellipsoid";
    double a = 0.85, b = 0.35, c = 0.5;
    double major = 1.0, minor = 0.2;
    double squareness = 0.9, radius = 1.0;

    void attach(CLI::App* cmd, const std::string& default_shape) {
        shape = default_shape;
        cmd->add_option("shape", shape, "ellipsoid | torus | sphube")
            ->check(CLI::IsMember({"ellipsoid", "torus", "sphube", "cube"}));
        cmd->add_option("--a", a, "ellipsoid semi-axis a");
        cmd->add_option("--b", b, "ellipsoid semi-axis b");
        cmd->add_option("--c", c, "ellipsoid semi-axis c");
        cmd->add_option("--major", major, "torus major radius");
        cmd->add_option("--minor", minor, "torus minor radius");
        cmd->add_option("--squareness", squareness, "sphube squareness s");
        cmd->add_option("--radius", radius, "sphube radius r");
    }

    ImplicitSurface build() const {
        if (shape == "ellipsoid") return ImplicitSurface::ellipsoid(a, b, c);
        if (shape == "torus") return ImplicitSurface::torus(major, minor);
        if (shape == "sphube") return ImplicitSurface::sphube(squareness, radius);
        throw CLI::ValidationError("shape", "no implicit surface for '" + shape + "'");
    }
};

NormObjective parse_norm(const std::string& name) {
    if (name == "native") return NormObjective::Native;
    if (name == "l2") return NormObjective::L2;
    throw CLI::ValidationError("--norm", "must be native or l2");
}

int run(int argc, char** argv) {
    CLI::App app{"Local implicit-surface reconstruction and differential-geometry estimation "
                 "from point clouds"};
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = hardware)")->capture_default_str();

    // ---- gen ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen", "generate a synthetic point cloud (XYZ with normals)");
    ShapeOptions gen_shape;
    gen_shape.attach(gen, "ellipsoid");
    std::size_t gen_n = 1000;
    std::uint64_t gen_seed = 1;
    double gen_noise = 0.0;
    double gen_edge = 1.0;
    std::string gen_out;
    gen->add_option("--n", gen_n, "number of points")->capture_default_str();
    gen->add_option("--seed", gen_seed, "seed (cube faces and noise)")->capture_default_str();
    gen->add_option("--noise", gen_noise, "Gaussian noise sigma")->capture_default_str();
    gen->add_option("--edge", gen_edge, "cube edge length")->capture_default_str();
    gen->add_option("--out", gen_out, "output XYZ path")->required();

    // ---- estimate ------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "per-point frames for a point cloud");
    std::string est_in, est_out, est_gt;
    std::string est_method = "krbf", est_norm = "native";
    int est_tau = 5, est_ns = 40, est_config = 4;
    double est_mu = 0.0;
    est->add_option("--in", est_in, "input XYZ")->required();
    est->add_option("--out", est_out, "per-point CSV output")->required();
    est->add_option("--ground-truth", est_gt, "XYZ with reference normals");
    est->add_option("--method", est_method)->check(CLI::IsMember({"pca", "rbf", "hrbf", "krbf"}));
    est->add_option("--tau", est_tau, "kernel smoothness order")->capture_default_str();
    est->add_option("--stencil-size", est_ns)->capture_default_str();
    est->add_option("--norm", est_norm)->check(CLI::IsMember({"native", "l2"}));
    est->add_option("--config", est_config, "KAN center config 1..4")->capture_default_str();
    est->add_option("--mu", est_mu, "Tikhonov parameter (0 = interpolation)")
        ->capture_default_str();

    // ---- config-study ---------------------------------------------------
    auto* cfg = app.add_subcommand("config-study", "KAN center-configuration accuracy table");
    ShapeOptions cfg_shape;
    cfg_shape.attach(cfg, "ellipsoid");
    std::vector<std::size_t> cfg_n{100, 500, 5000};
    std::vector<int> cfg_tau{3, 5};
    std::vector<int> cfg_ns{40, 50, 60, 70, 80};
    std::vector<int> cfg_configs{1, 2, 3, 4};
    std::string cfg_out;
    cfg->add_option("--n", cfg_n, "cloud sizes")->capture_default_str();
    cfg->add_option("--tau", cfg_tau)->capture_default_str();
    cfg->add_option("--ns", cfg_ns, "stencil sizes")->capture_default_str();
    cfg->add_option("--configs", cfg_configs)->capture_default_str();
    cfg->add_option("--out", cfg_out, "summary CSV")->required();

    // ---- norm-study -----------------------------------------------------
    auto* nrm = app.add_subcommand("norm-study", "HRBF/KRBF × native/l2 comparison");
    ShapeOptions nrm_shape;
    nrm_shape.attach(nrm, "ellipsoid");
    std::vector<std::size_t> nrm_n{5000};
    std::vector<int> nrm_tau{3};
    std::vector<int> nrm_ns{40, 50, 60, 70, 80};
    std::string nrm_out;
    nrm->add_option("--n", nrm_n)->capture_default_str();
    nrm->add_option("--tau", nrm_tau)->capture_default_str();
    nrm->add_option("--ns", nrm_ns)->capture_default_str();
    nrm->add_option("--out", nrm_out, "summary CSV")->required();

    // ---- convergence ----------------------------------------------------
    auto* cnv = app.add_subcommand("convergence", "error vs fill distance with fitted slopes");
    ShapeOptions cnv_shape;
    cnv_shape.attach(cnv, "torus");
    std::vector<std::size_t> cnv_n{150, 300, 600, 1200, 2500, 5000, 10000};
    std::vector<int> cnv_tau{3, 4};
    std::vector<int> cnv_ns{40};
    std::vector<std::string> cnv_methods{"rbf", "hrbf", "krbf"};
    std::string cnv_out, cnv_slopes;
    cnv->add_option("--n", cnv_n)->capture_default_str();
    cnv->add_option("--tau", cnv_tau)->capture_default_str();
    cnv->add_option("--ns", cnv_ns)->capture_default_str();
    cnv->add_option("--methods", cnv_methods)->capture_default_str();
    cnv->add_option("--out", cnv_out, "summary CSV")->required();
    cnv->add_option("--slopes-out", cnv_slopes, "slope CSV (default: <out>.slopes.csv)");

    // ---- sphube-sweep ----------------------------------------------------
    auto* swp = app.add_subcommand("sphube-sweep", "flattening-sphube error sweep");
    std::vector<double> swp_s{0.1, 0.3, 0.5, 0.7, 0.9};
    std::size_t swp_n = 5000;
    int swp_tau = 5, swp_ns = 40;
    std::string swp_out, swp_dir;
    swp->add_option("--s", swp_s, "squareness values")->capture_default_str();
    swp->add_option("--n", swp_n)->capture_default_str();
    swp->add_option("--tau", swp_tau)->capture_default_str();
    swp->add_option("--stencil-size", swp_ns)->capture_default_str();
    swp->add_option("--out", swp_out, "summary CSV")->required();
    swp->add_option("--per-point-dir", swp_dir, "directory for heatmap CSVs");

    // ---- fair -------------------------------------------------------------
    auto* fair = app.add_subcommand("fair", "curvature-weighted fairing of a noisy cloud");
    std::string fair_in, fair_out;
    std::size_t fair_iter = 1;
    int fair_tau = 3, fair_ns = 100;
    std::string fair_method = "krbf", fair_norm = "native";
    double fair_sigma_kappa = 0.0, fair_mu = 0.0;
    fair->add_option("--in", fair_in)->required();
    fair->add_option("--out", fair_out, "faired XYZ")->required();
    fair->add_option("--iterations", fair_iter)->capture_default_str();
    fair->add_option("--tau", fair_tau)->capture_default_str();
    fair->add_option("--stencil-size", fair_ns)->capture_default_str();
    fair->add_option("--method", fair_method)->check(CLI::IsMember({"rbf", "hrbf", "krbf"}));
    fair->add_option("--norm", fair_norm)->check(CLI::IsMember({"native", "l2"}));
    fair->add_option("--sigma-kappa", fair_sigma_kappa,
                     "curvature weight scale (0 = per-iteration median)")
        ->capture_default_str();
    fair->add_option("--mu", fair_mu, "Tikhonov parameter (0 = min-norm interpolation)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        PointCloud cloud;
        if (gen_shape.shape == "cube") {
            cloud = cube_cloud(gen_n, gen_edge, gen_seed);
        } else {
            cloud = gen_shape.build().sample_halton(gen_n);
        }
        if (gen_noise > 0.0) cloud = add_noise(cloud, gen_noise, gen_seed);
        write_xyz(cloud, gen_out);
        std::printf("wrote %zu points to %s\n", cloud.size(), gen_out.c_str());
        return 0;
    }

    if (est->parsed()) {
        const PointCloud cloud = ingest_xyz(est_in);
        EstimatorSpec spec;
        spec.method = method_from_name(est_method);
        spec.tau = est_tau;
        spec.stencil_size = est_ns;
        spec.norm = parse_norm(est_norm);
        spec.center_config = CenterConfig::from_index(est_config);
        if (est_mu > 0.0) spec.tikhonov_mu = est_mu;
        spec.num_threads = threads;

        std::vector<Vec3> gt_storage;
        const std::vector<Vec3>* gt = nullptr;
        if (!est_gt.empty()) {
            const PointCloud gt_cloud = ingest_xyz(est_gt);
            if (!gt_cloud.has_normals() || gt_cloud.size() != cloud.size())
                throw ParseError("ground-truth cloud must carry one normal per input point", 0);
            gt_storage = gt_cloud.exact_normals;
            gt = &gt_storage;
        }
        const CloudEstimate result = estimate_cloud(cloud, spec, gt);
        emit_per_point_csv(cloud, result, est_out);
        std::printf("estimated %zu points (%zu failures), wrote %s\n", cloud.size(),
                    result.failures(), est_out.c_str());
        if (result.failures() == cloud.size()) return kExitNumerical;
        return 0;
    }

    if (cfg->parsed()) {
        const auto report =
            run_config_study(cfg_shape.build(), cfg_n, cfg_tau, cfg_ns, cfg_configs, threads);
        emit_report(report, cfg_out);
        std::printf("wrote %zu rows to %s\n", report.rows.size(), cfg_out.c_str());
        return 0;
    }

    if (nrm->parsed()) {
        const auto report = run_norm_study(nrm_shape.build(), nrm_n, nrm_tau, nrm_ns, threads);
        emit_report(report, nrm_out);
        std::printf("wrote %zu rows to %s\n", report.rows.size(), nrm_out.c_str());
        return 0;
    }

    if (cnv->parsed()) {
        std::vector<EstimatorMethod> methods;
        for (const auto& m : cnv_methods) methods.push_back(method_from_name(m));
        const auto report =
            run_convergence(cnv_shape.build(), cnv_tau, cnv_n, cnv_ns, methods, threads);
        emit_report(report, cnv_out);
        const std::string slope_path = cnv_slopes.empty() ? cnv_out + ".slopes.csv" : cnv_slopes;
        emit_slopes(report, slope_path);
        std::printf("wrote %zu rows to %s and %zu slopes to %s\n", report.rows.size(),
                    cnv_out.c_str(), report.slopes.size(), slope_path.c_str());
        return 0;
    }

    if (swp->parsed()) {
        const auto report = run_flattening_sphube(swp_s, swp_n, swp_tau, swp_ns, swp_dir, threads);
        emit_report(report, swp_out);
        std::printf("wrote %zu rows to %s\n", report.rows.size(), swp_out.c_str());
        return 0;
    }

    if (fair->parsed()) {
        const PointCloud cloud = ingest_xyz(fair_in);
        EstimatorSpec spec;
        spec.method = method_from_name(fair_method);
        spec.tau = fair_tau;
        spec.stencil_size = fair_ns;
        spec.norm = parse_norm(fair_norm);
        if (fair_mu > 0.0) spec.tikhonov_mu = fair_mu;
        spec.num_threads = threads;
        std::optional<double> sigma_kappa;
        if (fair_sigma_kappa > 0.0) sigma_kappa = fair_sigma_kappa;
        const PointCloud faired = fair_cloud(cloud, fair_iter, spec, sigma_kappa);
        write_xyz(faired, fair_out);
        std::printf("faired %zu points over %zu iterations, wrote %s\n", cloud.size(), fair_iter,
                    fair_out.c_str());
        return 0;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const minsurf::ParseError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const minsurf::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
}
