// Command-line front end: contour evolution over PGM images, pure MCF runs,
// conditioning sweeps, and wall-time benchmarks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amcf/boundary.hpp"
#include "amcf/flow.hpp"
#include "amcf/geometry.hpp"
#include "amcf/image.hpp"
#include "amcf/output.hpp"
#include "amcf/stability.hpp"

namespace fs = std::filesystem;
using namespace amcf;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_max_iterations = 2;
constexpr int exit_error = 3;

struct CircleArgs {
    double cx = 0.0, cy = 0.0, r = 0.0;
};

CircleArgs parse_circle(const std::string& text) {
    CircleArgs circle;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf%c", &circle.cx, &circle.cy, &circle.r, &tail) != 3 ||
        circle.r <= 0.0)
        throw std::runtime_error("bad --circle value '" + text + "', expected cx,cy,r with r > 0");
    return circle;
}

PointCharge parse_charge(const std::string& text) {
    PointCharge charge;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf@%lf,%lf%c", &charge.strength, &charge.position.x,
                    &charge.position.y, &tail) != 3)
        throw std::runtime_error("bad --charge value '" + text + "', expected c@x,y");
    return charge;
}

// Shared run setup for evolve/mcf.
struct RunOptions {
    std::string image_path;
    std::string curve_path;
    std::string circle_text;
    int n = 64;
    double dt = 0.0;
    double mu = 0.15;
    double threshold = 0.90;
    long max_iters = 50000;
    long trace_every = 100;
    int cutoff = 0;
    double scale = 0.001;
    std::vector<std::string> charge_texts;
    std::string clamp_mode;
    bool stability = false;
    bool dump_matrices = false;
    std::string out_dir;
    bool overwrite = false;
};

void add_run_options(CLI::App* cmd, RunOptions& opt, bool with_image, bool with_clamp) {
    if (with_image) {
        cmd->add_option("--image", opt.image_path, "Input PGM picture (P2 or P5)")->required();
        cmd->add_option("--scale", opt.scale, "World units per pixel")->capture_default_str();
        cmd->add_option("--charge", opt.charge_texts, "Point charge c@x,y (repeatable)");
        cmd->add_option("--threshold", opt.threshold, "Matched-fraction stopping threshold")
            ->capture_default_str();
        cmd->add_option("--cutoff", opt.cutoff, "Pixel intensity counted as matched")
            ->capture_default_str();
    }
    cmd->add_option("--curve", opt.curve_path, "Initial curve CSV (x,y per line)");
    cmd->add_option("--circle", opt.circle_text, "Initial circle cx,cy,r");
    cmd->add_option("--n", opt.n, "Number of curve points")->capture_default_str();
    cmd->add_option("--dt", opt.dt, "Time step (default 1/N^2)");
    cmd->add_option("--mu", opt.mu, "Curvature blend in [0,1]")->capture_default_str();
    cmd->add_option("--max-iters", opt.max_iters, "Iteration budget")->capture_default_str();
    cmd->add_option("--trace-every", opt.trace_every, "Snapshot cadence")->capture_default_str();
    if (with_clamp)
        cmd->add_option("--clamp", opt.clamp_mode, "Clamp normal speed: min0 or max0")
            ->check(CLI::IsMember({"min0", "max0"}));
    cmd->add_flag("--stability", opt.stability, "Append stability_bound column to summary.csv");
    cmd->add_flag("--dump-matrices", opt.dump_matrices,
                  "Dump the initial stage matrices and right-hand sides as CSV");
    cmd->add_option("--out", opt.out_dir, "Output directory")->required();
    cmd->add_flag("--overwrite", opt.overwrite, "Allow writing into a non-empty directory");
}

void prepare_out_dir(const std::string& dir, bool overwrite) {
    fs::path p(dir);
    if (fs::exists(p)) {
        if (!fs::is_directory(p)) throw std::runtime_error(dir + " exists and is not a directory");
        if (!fs::is_empty(p) && !overwrite)
            throw std::runtime_error(dir + " is not empty; pass --overwrite to reuse it");
    } else {
        fs::create_directories(p);
    }
}

DiscreteCurve initial_curve(const RunOptions& opt, const CLI::App* cmd) {
    bool have_curve = !opt.curve_path.empty();
    bool have_circle = !opt.circle_text.empty();
    if (have_curve == have_circle)
        throw std::runtime_error("exactly one of --curve or --circle is required");
    if (have_circle) {
        CircleArgs c = parse_circle(opt.circle_text);
        return DiscreteCurve::circle({c.cx, c.cy}, c.r, opt.n);
    }
    DiscreteCurve curve = read_curve_csv(opt.curve_path);
    if (cmd->count("--n") > 0) curve = resample_uniform(curve, opt.n);
    return curve;
}

FlowConfig make_config(const RunOptions& opt, int n_points) {
    FlowConfig config;
    config.point_count = n_points;
    config.dt = opt.dt;
    config.mu = opt.mu;
    config.match_threshold = opt.threshold;
    config.max_iterations = opt.max_iters;
    config.trace_every = opt.trace_every;
    config.pixel_black_cutoff = opt.cutoff;
    config.record_stability = opt.stability;
    if (opt.clamp_mode == "min0") config.clamp = VelocityClamp::min0;
    if (opt.clamp_mode == "max0") config.clamp = VelocityClamp::max0;
    return config;
}

void write_manifest(const std::string& subcommand, const RunOptions& opt,
                    const FlowConfig& config, int n_points, const ChargeSet& charges) {
    std::ostringstream m;
    m << "subcommand=" << subcommand << "\n";
    if (!opt.image_path.empty()) {
        m << "image=" << fs::absolute(opt.image_path).string() << "\n";
        m << "scale=" << fmt_full(opt.scale) << "\n";
    }
    if (!opt.curve_path.empty()) m << "curve=" << fs::absolute(opt.curve_path).string() << "\n";
    if (!opt.circle_text.empty()) m << "circle=" << opt.circle_text << "\n";
    m << "n=" << n_points << "\n";
    m << "dt=" << fmt_full(config.resolved_dt()) << "\n";
    m << "mu=" << fmt_full(config.mu) << "\n";
    m << "threshold=" << fmt_full(config.match_threshold) << "\n";
    m << "cutoff=" << config.pixel_black_cutoff << "\n";
    m << "max_iters=" << config.max_iterations << "\n";
    m << "trace_every=" << config.trace_every << "\n";
    for (const PointCharge& c : charges)
        m << "charge=" << fmt_full(c.strength) << "@" << fmt_full(c.position.x) << ","
          << fmt_full(c.position.y) << "\n";
    if (!opt.clamp_mode.empty()) m << "clamp=" << opt.clamp_mode << "\n";
    m << "stability=" << (config.record_stability ? 1 : 0) << "\n";
    m << "out=" << fs::absolute(opt.out_dir).string() << "\n";
    std::ofstream file(fs::path(opt.out_dir) / "manifest.txt");
    file << m.str();
    std::cout << m.str();
}

void dump_initial_system(const std::string& out_dir, const DiscreteCurve& curve, double mu,
                         const ChargeSet& charges, const PixelField* field) {
    LocalFrames frames = local_frames(curve, mu);
    BoundarySystem sys = assemble_boundary_system(curve, frames);
    std::vector<double> mask(static_cast<size_t>(curve.size()), 1.0);
    if (field != nullptr)
        for (int j = 0; j < curve.size(); ++j)
            mask[static_cast<size_t>(j)] = mask_factor(*field, curve[j]);
    std::vector<double> kappa_masked(static_cast<size_t>(curve.size()));
    for (int j = 0; j < curve.size(); ++j)
        kappa_masked[static_cast<size_t>(j)] = frames[j].curvature * mask[static_cast<size_t>(j)];

    fs::path dir = fs::path(out_dir) / "matrices";
    fs::create_directories(dir);
    dump_matrix_csv((dir / "stage1_matrix.csv").string(), sys.double_layer_half);
    std::vector<double> rhs1 = sys.single_layer.apply(kappa_masked);
    for (double& v : rhs1) v = -v;
    dump_vector_csv((dir / "stage1_rhs.csv").string(), rhs1);

    dump_matrix_csv((dir / "stage2_matrix.csv").string(), sys.single_layer);
    std::vector<double> u = solve_stage1_boundary_potential(sys, kappa_masked);
    std::vector<double> rhs2 = sys.double_layer_half.apply(u);
    std::vector<double> g = charge_column(curve, charges, mask);
    for (int i = 0; i < curve.size(); ++i)
        rhs2[static_cast<size_t>(i)] = -g[static_cast<size_t>(i)] - rhs2[static_cast<size_t>(i)];
    dump_vector_csv((dir / "stage2_rhs.csv").string(), rhs2);
}

void write_run_outputs(const RunOptions& opt, const FlowTrace& trace, const FlowConfig& config,
                       const PixelField* field) {
    fs::path out(opt.out_dir);
    fs::create_directories(out / "snapshots");
    for (const FlowSnapshot& snap : trace.snapshots) {
        char name[32];
        std::snprintf(name, sizeof(name), "iter_%06ld.csv", snap.iteration);
        write_snapshot_csv((out / "snapshots" / name).string(), snap);
    }
    write_summary_csv((out / "summary.csv").string(), trace, config.record_stability);
    write_trace_svg((out / "final.svg").string(), trace);
    if (field != nullptr)
        save_pgm((out / "overlay.pgm").string(), overlay_curve(*field, trace.final_curve));
}

int finish_run(const FlowTrace& trace) {
    std::cout << "stopped: " << to_string(trace.reason) << " after " << trace.iterations
              << " iterations";
    if (!trace.detail.empty()) std::cout << " (" << trace.detail << ")";
    std::cout << "\n";
    switch (trace.reason) {
        case StopReason::matched: return exit_ok;
        case StopReason::max_iterations: return exit_max_iterations;
        default: return exit_error;
    }
}

int cmd_evolve(const RunOptions& opt, const CLI::App* cmd) {
    prepare_out_dir(opt.out_dir, opt.overwrite);
    PixelField field = load_pgm(opt.image_path, opt.scale);
    DiscreteCurve curve = initial_curve(opt, cmd);
    ChargeSet charges;
    for (const std::string& text : opt.charge_texts) charges.push_back(parse_charge(text));
    FlowConfig config = make_config(opt, curve.size());
    config.validate();
    write_manifest("evolve", opt, config, curve.size(), charges);
    if (opt.dump_matrices) dump_initial_system(opt.out_dir, curve, config.mu, charges, &field);
    FlowTrace trace = run(curve, charges, &field, config);
    write_run_outputs(opt, trace, config, &field);
    return finish_run(trace);
}

int cmd_mcf(const RunOptions& opt, const CLI::App* cmd) {
    prepare_out_dir(opt.out_dir, opt.overwrite);
    DiscreteCurve curve = initial_curve(opt, cmd);
    FlowConfig config = make_config(opt, curve.size());
    config.validate();
    write_manifest("mcf", opt, config, curve.size(), {});
    if (opt.dump_matrices) dump_initial_system(opt.out_dir, curve, config.mu, {}, nullptr);
    FlowTrace trace = run(curve, {}, nullptr, config);
    write_run_outputs(opt, trace, config, nullptr);
    return finish_run(trace);
}

struct DiagnoseOptions {
    std::string curve_path;
    std::string circle_text;
    int n = 64;
    double mu = 0.15;
    std::vector<std::string> charge_texts;
    std::string out_dir;
    bool overwrite = false;
};

int cmd_diagnose(const DiagnoseOptions& opt, const CLI::App* cmd) {
    prepare_out_dir(opt.out_dir, opt.overwrite);
    RunOptions shim;
    shim.curve_path = opt.curve_path;
    shim.circle_text = opt.circle_text;
    shim.n = opt.n;
    DiscreteCurve curve = initial_curve(shim, cmd);
    if (opt.charge_texts.empty())
        throw std::runtime_error("diagnose needs at least one --charge position");

    LocalFrames frames = local_frames(curve, opt.mu);
    BoundarySystem sys = assemble_boundary_system(curve, frames);
    std::vector<double> mask(static_cast<size_t>(curve.size()), 1.0);
    double cond1 = stage1_condition(sys).condition;

    std::ofstream out(fs::path(opt.out_dir) / "condition.csv");
    if (!out) throw std::runtime_error("cannot write condition.csv");
    out << "index,strength,px,py,cond_stage1,cond_stage2,ratio,status\n";
    double reference = 0.0;
    for (size_t i = 0; i < opt.charge_texts.size(); ++i) {
        PointCharge charge = parse_charge(opt.charge_texts[i]);
        out << i << "," << fmt_full(charge.strength) << "," << fmt_full(charge.position.x) << ","
            << fmt_full(charge.position.y) << ",";
        try {
            double cond2 = stage2_condition(sys, curve, {charge}, mask).condition;
            if (i == 0) reference = cond2;
            out << fmt_full(cond1) << "," << fmt_full(cond2) << ","
                << fmt_full(reference > 0.0 ? cond2 / reference : 0.0) << ",ok\n";
        } catch (const SingularSystem& e) {
            out << fmt_full(cond1) << ",nan,nan,singular_system\n";
        }
    }
    std::cout << "condition sweep over " << opt.charge_texts.size() << " positions written to "
              << (fs::path(opt.out_dir) / "condition.csv").string() << "\n";
    return exit_ok;
}

struct BenchOptions {
    std::vector<int> n_list;
    int reps = 10;
    std::string out_dir;
    bool overwrite = false;
};

int cmd_bench(const BenchOptions& opt) {
    prepare_out_dir(opt.out_dir, opt.overwrite);
    // Circle-onto-disk scenario: 256x256 raster, black disk of 40 px,
    // initial circle of 100 px, one attracting charge at the center,
    // dt = 1/N^2, stop at 90% matched.
    const double scale = 0.008;
    PixelField field = make_disk_field(256, 256, 40.0, scale);
    ChargeSet charges{{-1.0, {0.0, 0.0}}};

    std::ofstream out(fs::path(opt.out_dir) / "bench.csv");
    if (!out) throw std::runtime_error("cannot write bench.csv");
    out << "n,reps,iterations,mean_seconds,stddev_seconds,status\n";
    for (int n : opt.n_list) {
        std::vector<double> times;
        long iterations = 0;
        std::string status = "ok";
        try {
            for (int rep = 0; rep < opt.reps; ++rep) {
                DiscreteCurve curve = DiscreteCurve::circle({0.0, 0.0}, 100.0 * scale, n);
                FlowConfig config;
                config.point_count = n;
                config.trace_every = 1000000;  // timing run, keep the trace slim
                auto t0 = std::chrono::steady_clock::now();
                FlowTrace trace = run(curve, charges, &field, config);
                auto t1 = std::chrono::steady_clock::now();
                times.push_back(std::chrono::duration<double>(t1 - t0).count());
                iterations = trace.iterations;
            }
        } catch (const std::exception& e) {
            status = e.what();
        }
        double mean = 0.0, sd = 0.0;
        if (!times.empty()) {
            for (double t : times) mean += t;
            mean /= static_cast<double>(times.size());
            for (double t : times) sd += (t - mean) * (t - mean);
            sd = times.size() > 1 ? std::sqrt(sd / (static_cast<double>(times.size()) - 1)) : 0.0;
        }
        out << n << "," << opt.reps << "," << iterations << "," << fmt_full(mean) << ","
            << fmt_full(sd) << "," << (status == "ok" ? "ok" : "error") << "\n";
        std::cout << "n=" << n << " mean=" << mean << "s sd=" << sd << " iterations=" << iterations
                  << " status=" << status << "\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagrangian curve evolution coupled to a boundary-integral Poisson solver,"
                 " for contour parametrization of high-contrast raster images"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Optional config file; keys live under a [subcommand] section and "
                   "command-line flags win");

    RunOptions evolve_opt;
    CLI::App* evolve = app.add_subcommand("evolve", "Match a curve onto the object in an image");
    add_run_options(evolve, evolve_opt, /*with_image=*/true, /*with_clamp=*/false);

    RunOptions mcf_opt;
    CLI::App* mcf = app.add_subcommand("mcf", "Pure isotropic mean curvature flow");
    add_run_options(mcf, mcf_opt, /*with_image=*/false, /*with_clamp=*/true);

    DiagnoseOptions diag_opt;
    CLI::App* diagnose = app.add_subcommand(
        "diagnose", "Condition numbers of the stage matrices for a sweep of charge positions");
    diagnose->add_option("--curve", diag_opt.curve_path, "Curve CSV");
    diagnose->add_option("--circle", diag_opt.circle_text, "Circle cx,cy,r");
    diagnose->add_option("--n", diag_opt.n, "Number of curve points")->capture_default_str();
    diagnose->add_option("--mu", diag_opt.mu, "Curvature blend")->capture_default_str();
    diagnose->add_option("--charge", diag_opt.charge_texts,
                         "Charge position c@x,y (repeatable; first is the reference)");
    diagnose->add_option("--out", diag_opt.out_dir, "Output directory")->required();
    diagnose->add_flag("--overwrite", diag_opt.overwrite, "Allow non-empty output directory");

    BenchOptions bench_opt;
    CLI::App* bench = app.add_subcommand("bench", "Wall-time of the circle-onto-disk scenario");
    bench->add_option("--n-list", bench_opt.n_list, "Point counts to benchmark")->required();
    bench->add_option("--reps", bench_opt.reps, "Repetitions per point count")
        ->capture_default_str();
    bench->add_option("--out", bench_opt.out_dir, "Output directory")->required();
    bench->add_flag("--overwrite", bench_opt.overwrite, "Allow non-empty output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_error;
    }

    try {
        if (evolve->parsed()) return cmd_evolve(evolve_opt, evolve);
        if (mcf->parsed()) return cmd_mcf(mcf_opt, mcf);
        if (diagnose->parsed()) return cmd_diagnose(diag_opt, diagnose);
        if (bench->parsed()) return cmd_bench(bench_opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
