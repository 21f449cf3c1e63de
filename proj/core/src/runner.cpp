#include "incrcert/runner.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

namespace incrcert {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path.string());
    os << content;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file " + path.string());
    os << j.dump(2) << "\n";
}

Vector vector_from_json(const nlohmann::json& j) {
    const auto data = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(data.data(), static_cast<Index>(data.size()));
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<Vector> DisturbanceSpec::realize(Index n_w, std::size_t horizon) const {
    std::vector<Vector> w(horizon, Vector::Zero(n_w));
    for (std::size_t k = 0; k < horizon; ++k) {
        double v = 0.0;
        switch (kind) {
            case DisturbanceKind::Zero: v = 0.0; break;
            case DisturbanceKind::Constant: v = value; break;
            case DisturbanceKind::RampSaturating:
                v = slope * static_cast<double>(std::min(k, saturation_step));
                break;
        }
        w[k].setConstant(v);
    }
    return w;
}

AnalysisConfig AnalysisConfig::from_json(const nlohmann::json& j) {
    AnalysisConfig cfg;
    try {
        cfg.system = j.at("system").get<std::string>();
        cfg.analysis = j.at("analysis").get<std::string>();
        if (j.contains("grid")) cfg.grid = j.at("grid").get<std::vector<int>>();
        if (j.contains("region")) cfg.region = j.at("region").get<BoxRegion>();
        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            cfg.tolerances.bisect_tol = t.value("bisect_tol", cfg.tolerances.bisect_tol);
            cfg.tolerances.feas_tol = t.value("feas_tol", cfg.tolerances.feas_tol);
        }
        cfg.tolerances.gamma_cap = j.value("gamma_cap", cfg.tolerances.gamma_cap);
        if (j.contains("supply")) cfg.supply = j.at("supply").get<SupplyQSR>();
        if (j.contains("simulation")) {
            const auto& s = j.at("simulation");
            SimulationSpec spec;
            spec.horizon = s.value("horizon", spec.horizon);
            if (s.contains("x0")) spec.x0 = vector_from_json(s.at("x0"));
            spec.settle_k = s.value("settle_k", spec.settle_k);
            spec.tol = s.value("tol", spec.tol);
            if (s.contains("disturbance")) {
                const auto& d = s.at("disturbance");
                const auto type = d.at("type").get<std::string>();
                if (type == "zero") {
                    spec.disturbance.kind = DisturbanceKind::Zero;
                } else if (type == "constant") {
                    spec.disturbance.kind = DisturbanceKind::Constant;
                    spec.disturbance.value = d.at("value").get<double>();
                } else if (type == "ramp_sat") {
                    spec.disturbance.kind = DisturbanceKind::RampSaturating;
                    spec.disturbance.slope = d.at("slope").get<double>();
                    spec.disturbance.saturation_step = d.at("saturation_step").get<std::size_t>();
                } else {
                    throw ConfigError("config field 'simulation.disturbance.type': unknown type '" +
                                      type + "' (zero | constant | ramp_sat)");
                }
            }
            cfg.simulation = std::move(spec);
        }
        if (j.contains("validation")) {
            const auto& v = j.at("validation");
            ValidationSpec spec;
            spec.certificate_path = v.at("certificate").get<std::string>();
            spec.pairs = v.value("pairs", spec.pairs);
            cfg.validation = std::move(spec);
        }
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("output")) {
            const auto& o = j.at("output");
            cfg.out_certificate = o.value("certificate", cfg.out_certificate);
            cfg.out_trajectory = o.value("trajectory", cfg.out_trajectory);
            cfg.out_summary = o.value("summary", cfg.out_summary);
            cfg.out_report = o.value("report", cfg.out_report);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config error: ") + e.what());
    }

    static const std::vector<std::string> analyses = {"li2", "qsr", "passivity", "simulate",
                                                      "validate"};
    if (std::find(analyses.begin(), analyses.end(), cfg.analysis) == analyses.end()) {
        throw ConfigError("config field 'analysis': unknown analysis '" + cfg.analysis +
                          "' (li2 | qsr | passivity | simulate | validate)");
    }
    if (cfg.analysis == "qsr" && !cfg.supply) {
        throw ConfigError("config field 'supply': required for the qsr analysis");
    }
    if (cfg.analysis == "validate" && !cfg.validation) {
        throw ConfigError("config field 'validation': required for the validate analysis");
    }
    if (cfg.grid) {
        for (int c : *cfg.grid) {
            if (c < 1) throw ConfigError("config field 'grid': counts must be >= 1");
        }
    }
    if (cfg.tolerances.bisect_tol <= 0 || cfg.tolerances.feas_tol <= 0 ||
        cfg.tolerances.gamma_cap <= 0) {
        throw ConfigError("config field 'tolerances': tolerances must be positive");
    }
    return cfg;
}

AnalysisConfig AnalysisConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    return AnalysisConfig::from_json(j);
}

namespace {

struct RunContext {
    const AnalysisConfig& config;
    BuiltinSystem builtin;
    std::filesystem::path out_dir;
    std::ostream& log;
    bool quiet;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void summary(const std::string& text) {
        write_text_file(out_dir / config.out_summary, text);
        if (!quiet) log << text;
    }
};

GriddedEmbedding build_embedding(RunContext& ctx) {
    const BoxRegion region = ctx.config.region.value_or(ctx.builtin.region);
    const std::vector<int> grid = ctx.config.grid.value_or(ctx.builtin.default_grid);
    if (static_cast<Index>(grid.size()) != region.dim()) {
        throw ConfigError("config: grid dimension " + std::to_string(grid.size()) +
                          " does not match region dimension " + std::to_string(region.dim()));
    }
    return make_embedding(ctx.builtin.system, ctx.builtin.scheduling, region, grid);
}

std::string grid_to_string(const std::vector<int>& grid) {
    std::string s;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(grid[i]);
    }
    return s;
}

RunOutcome run_li2(RunContext& ctx) {
    GriddedEmbedding emb = build_embedding(ctx);
    GainResult result = compute_li2_gain(emb, ctx.config.tolerances);
    const double wall = elapsed_s(ctx.start);

    std::ostringstream os;
    os << "analysis: li2\nsystem: " << ctx.config.system << "\ngrid: "
       << grid_to_string(emb.points_per_dim) << " (" << emb.size() << " points)\n";
    if (result.outcome == GainResult::Outcome::Certified) {
        StorageCertificate cert = result.certificate;
        cert.seed = ctx.config.seed;
        cert.system = ctx.config.system;
        write_json_file(ctx.out_dir / ctx.config.out_certificate, nlohmann::json(cert));
        os << "verdict: certified\ngamma_upper: " << fmt17(result.gamma_upper)
           << "\nmin_eigen_margin: " << fmt17(cert.min_eigen_margin)
           << "\nfeasibility_solves: " << result.feasibility_solves << "\nwall_time_s: " << wall
           << "\nseed: " << ctx.config.seed << "\ncertificate: " << ctx.config.out_certificate
           << "\n";
        ctx.summary(os.str());
        return RunOutcome::Completed;
    }
    if (result.outcome == GainResult::Outcome::Unbounded) {
        os << "verdict: no certificate up to gamma_cap=" << fmt17(ctx.config.tolerances.gamma_cap)
           << "\nnote: the gridded LMI family admits no shared storage matrix at the cap; this "
              "is not a proof that the gain is unbounded\nfeasibility_solves: "
           << result.feasibility_solves << "\nwall_time_s: " << wall << "\n";
        ctx.summary(os.str());
        return RunOutcome::NoCertificate;
    }
    os << "verdict: unsolved\nmessage: " << result.message << "\nwall_time_s: " << wall << "\n";
    ctx.summary(os.str());
    return RunOutcome::Unsolved;
}

RunOutcome run_check(RunContext& ctx, bool passivity) {
    GriddedEmbedding emb = build_embedding(ctx);
    CheckResult result = passivity ? check_passivity(emb, ctx.config.tolerances)
                                   : check_incremental_qsr(emb, *ctx.config.supply,
                                                           ctx.config.tolerances);
    const double wall = elapsed_s(ctx.start);

    std::ostringstream os;
    os << "analysis: " << ctx.config.analysis << "\nsystem: " << ctx.config.system << "\ngrid: "
       << grid_to_string(emb.points_per_dim) << " (" << emb.size() << " points)\n";
    if (result.status == SolveStatus::Feasible) {
        StorageCertificate cert = result.certificate;
        cert.seed = ctx.config.seed;
        cert.system = ctx.config.system;
        if (!passivity) cert.supply = *ctx.config.supply;
        write_json_file(ctx.out_dir / ctx.config.out_certificate, nlohmann::json(cert));
        os << "verdict: certified\nmin_eigen_margin: " << fmt17(cert.min_eigen_margin)
           << "\nwall_time_s: " << wall << "\nseed: " << ctx.config.seed
           << "\ncertificate: " << ctx.config.out_certificate << "\n";
        ctx.summary(os.str());
        return RunOutcome::Completed;
    }
    if (result.status == SolveStatus::Infeasible) {
        os << "verdict: no certificate found at tolerance\nnote: the sufficient condition "
              "failed; this does not prove the property is absent\nmessage: "
           << result.message << "\nwall_time_s: " << wall << "\n";
        ctx.summary(os.str());
        return RunOutcome::NoCertificate;
    }
    os << "verdict: unsolved\nmessage: " << result.message << "\nwall_time_s: " << wall << "\n";
    ctx.summary(os.str());
    return RunOutcome::Unsolved;
}

RunOutcome run_simulate(RunContext& ctx) {
    SimulationSpec spec = ctx.config.simulation.value_or(SimulationSpec{});
    if (spec.x0.size() == 0) spec.x0 = Vector::Zero(ctx.builtin.system.n_x);
    if (spec.x0.size() != ctx.builtin.system.n_x) {
        throw ConfigError("config field 'simulation.x0': dimension mismatch");
    }
    if (spec.horizon <= spec.settle_k) {
        throw ConfigError("config field 'simulation': horizon must exceed settle_k");
    }

    const auto w_seq = spec.disturbance.realize(ctx.builtin.system.n_w, spec.horizon);
    const Trajectory traj = simulate(ctx.builtin.system, spec.x0, w_seq);
    {
        std::ofstream os(ctx.out_dir / ctx.config.out_trajectory);
        if (!os) throw ConfigError("cannot open trajectory output");
        write_trajectory_csv(os, traj);
    }

    std::ostringstream os;
    os << "analysis: simulate\nsystem: " << ctx.config.system << "\nhorizon: " << spec.horizon
       << "\n";
    nlohmann::json report;
    report["system"] = ctx.config.system;
    report["horizon"] = spec.horizon;
    report["seed"] = ctx.config.seed;
    if (traj.truncated_at) {
        os << "verdict: diverged (non-finite state at step " << *traj.truncated_at << ")\n";
        report["classification"] = "diverged";
        report["truncated_at"] = *traj.truncated_at;
        write_json_file(ctx.out_dir / ctx.config.out_report, report);
        ctx.summary(os.str());
        return RunOutcome::Completed;
    }
    const LongRunReport lr = classify_longrun(traj, spec.settle_k, spec.tol);
    const double final_angle = std::abs(traj.states.back()(0));
    os << "classification: " << to_string(lr.classification)
       << "\npeak_to_peak_after_settle: " << fmt17(lr.peak_to_peak) << "\nfinal_|x1|: "
       << fmt17(final_angle) << "\nsettle_k: " << spec.settle_k << "\ntol: " << fmt17(spec.tol)
       << "\nwall_time_s: " << elapsed_s(ctx.start) << "\ntrajectory: "
       << ctx.config.out_trajectory << "\n";
    report["classification"] = to_string(lr.classification);
    report["peak_to_peak_after_settle"] = lr.peak_to_peak;
    std::vector<double> ptp(lr.peak_to_peak_per_state.data(),
                            lr.peak_to_peak_per_state.data() + lr.peak_to_peak_per_state.size());
    report["peak_to_peak_per_state"] = ptp;
    report["final_abs_x1"] = final_angle;
    report["settle_k"] = spec.settle_k;
    report["tol"] = spec.tol;
    write_json_file(ctx.out_dir / ctx.config.out_report, report);
    ctx.summary(os.str());
    return RunOutcome::Completed;
}

}  // namespace

RunOutcome run_analysis(const AnalysisConfig& config, const std::filesystem::path& out_dir,
                        std::ostream& log, bool quiet) {
    std::filesystem::create_directories(out_dir);
    RunContext ctx{config, make_builtin(config.system), out_dir, log, quiet};
    if (config.analysis == "li2") return run_li2(ctx);
    if (config.analysis == "qsr") return run_check(ctx, /*passivity=*/false);
    if (config.analysis == "passivity") return run_check(ctx, /*passivity=*/true);
    if (config.analysis == "simulate") return run_simulate(ctx);
    if (config.analysis == "validate") {
        return validate_certificate(config.validation->certificate_path, config.system,
                                    config.validation->pairs, config.seed, out_dir, log, quiet);
    }
    throw ConfigError("unknown analysis '" + config.analysis + "'");
}

RunOutcome validate_certificate(const std::filesystem::path& certificate_path,
                                const std::string& system_name, int n_pairs, std::uint64_t seed,
                                const std::filesystem::path& out_dir, std::ostream& log,
                                bool quiet) {
    if (n_pairs <= 0) throw ConfigError("validate: number of pairs must be positive");
    std::filesystem::create_directories(out_dir);

    std::ifstream is(certificate_path);
    if (!is) throw ConfigError("cannot open certificate " + certificate_path.string());
    StorageCertificate cert;
    try {
        cert = nlohmann::json::parse(is).get<StorageCertificate>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("certificate parse error in " + certificate_path.string() + ": " +
                          e.what());
    }

    BuiltinSystem builtin = make_builtin(system_name);
    if (cert.P.rows() != builtin.system.n_x) {
        throw ConfigError("certificate P is " + std::to_string(cert.P.rows()) + "x" +
                          std::to_string(cert.P.cols()) + " but system '" + system_name +
                          "' has n_x=" + std::to_string(builtin.system.n_x));
    }

    SupplyQSR supply;
    if (cert.supply) {
        supply = *cert.supply;
    } else if (cert.gamma) {
        supply = SupplyQSR::l2_gain(*cert.gamma, builtin.system.n_w, builtin.system.n_z);
    } else if (cert.analysis == "passivity") {
        supply = SupplyQSR::passivity(builtin.system.n_w);
    } else {
        throw ConfigError("certificate carries neither gamma nor a supply; cannot validate");
    }

    // The certificate is regional: pairs are sampled so that the scheduling
    // image stays inside the certified region.
    const BoxRegion& region = cert.region.intervals.empty() ? builtin.region : cert.region;
    std::mt19937_64 rng(seed);
    PairSamplingOptions dissipation_opts = builtin.sampling;
    const auto pairs =
        sample_trajectory_pairs(builtin.system, builtin.scheduling, region, n_pairs,
                                dissipation_opts, rng);
    double max_violation = -std::numeric_limits<double>::infinity();
    for (const auto& pair : pairs) {
        max_violation = std::max(max_violation, validate_dissipation(pair, cert.P, supply));
    }

    GainLowerBound bound;
    if (cert.gamma) {
        PairSamplingOptions gain_opts = builtin.sampling;
        gain_opts.share_initial_state = true;
        const auto gain_pairs = sample_trajectory_pairs(builtin.system, builtin.scheduling,
                                                        region, n_pairs, gain_opts, rng);
        bound = empirical_gain_lower_bound(builtin.system, gain_pairs);
    }

    const bool violation_ok = max_violation <= 1e-6;
    const bool gain_ok = !cert.gamma || bound.value <= *cert.gamma + 1e-6;

    nlohmann::json report;
    report["system"] = system_name;
    report["certificate"] = certificate_path.string();
    report["pairs"] = n_pairs;
    report["seed"] = seed;
    report["max_dissipation_violation"] = max_violation;
    report["violation_threshold"] = 1e-6;
    if (cert.gamma) {
        report["gamma"] = *cert.gamma;
        report["empirical_gain_lower_bound"] = bound.value;
        report["gain_pairs_used"] = bound.pairs_used;
        report["gain_pairs_skipped"] = bound.pairs_skipped;
    }
    report["passed"] = violation_ok && gain_ok;
    write_json_file(out_dir / "report.json", report);

    std::ostringstream os;
    os << "validate: " << certificate_path.string() << "\nsystem: " << system_name
       << "\npairs: " << n_pairs << "\nseed: " << seed << "\nmax_dissipation_violation: "
       << fmt17(max_violation) << " (threshold 1e-06)\n";
    if (cert.gamma) {
        os << "empirical_gain_lower_bound: " << fmt17(bound.value) << " (certified gamma "
           << fmt17(*cert.gamma) << ")\n";
    }
    os << "result: " << ((violation_ok && gain_ok) ? "PASS" : "FAIL") << "\n";
    write_text_file(out_dir / "summary.txt", os.str());
    if (!quiet) log << os.str();
    return (violation_ok && gain_ok) ? RunOutcome::Completed : RunOutcome::NoCertificate;
}

}  // namespace incrcert
