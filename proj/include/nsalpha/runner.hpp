#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "nsalpha/diagnostics.hpp"
#include "nsalpha/dynamics.hpp"
#include "nsalpha/presets.hpp"
#include "nsalpha/random_field.hpp"
#include "nsalpha/run_config.hpp"
#include "nsalpha/singularity.hpp"
#include "nsalpha/version.hpp"

namespace nsalpha {

enum class ExitStatus : int { ok = 0, config_error = 2, blowup_detected = 3, io_error = 4 };

namespace detail {

// 17 significant digits round-trip doubles exactly; the CSV is bit-faithful
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace detail

inline const char* records_csv_header() {
    return "t,e0,e_theta,d1,d1_theta,work,n1theta,v_l2,v_h1";
}

inline void append_record_csv(std::ostream& out, const EnergyRecord& r) {
    using detail::format_double;
    out << format_double(r.t) << ',' << format_double(r.e0) << ',' << format_double(r.e_theta) << ','
        << format_double(r.d1) << ',' << format_double(r.d1_theta) << ',' << format_double(r.work)
        << ',' << format_double(r.n1theta) << ',' << format_double(r.v_l2) << ','
        << format_double(r.v_h1) << '\n';
}

inline std::vector<EnergyRecord> read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open records file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("records file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != records_csv_header())
        throw IoError("records file has an unexpected header: " + path);
    std::vector<EnergyRecord> recs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        EnergyRecord r;
        if (!(row >> r.t >> r.e0 >> r.e_theta >> r.d1 >> r.d1_theta >> r.work >> r.n1theta >>
              r.v_l2 >> r.v_h1))
            throw IoError(path + ": malformed record on line " + std::to_string(lineno));
        recs.push_back(r);
    }
    return recs;
}

// ---- field snapshots (also the init = file format) ----

inline void write_field_snapshot(const std::string& path, const SpectralField& f) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open snapshot file for writing: " + path);
    const Grid& g = f.grid();
    out << "nsalpha-field 1\n";
    out << "N " << g.trunc << "\n";
    out << "L " << detail::format_double(g.period) << "\n";
    out << "kind " << (f.kind() == FieldKind::vector ? "vector" : "scalar") << "\n";
    const int N = g.trunc;
    for (int nz = 0; nz <= N; ++nz)
        for (int ny = -N; ny <= N; ++ny)
            for (int nx = -N; nx <= N; ++nx) {
                const bool positive = nz > 0 || (nz == 0 && (ny > 0 || (ny == 0 && nx > 0)));
                if (!positive) continue;
                out << nx << ' ' << ny << ' ' << nz;
                for (int c = 0; c < f.components(); ++c) {
                    const cplx z = f.at(c, nx, ny, nz);
                    out << ' ' << detail::format_double(z.real()) << ' '
                        << detail::format_double(z.imag());
                }
                out << '\n';
            }
    if (!out) throw IoError("failed while writing snapshot: " + path);
}

inline SpectralField load_field_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open snapshot file: " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "nsalpha-field" || version != 1)
        throw IoError("not a field snapshot: " + path);
    std::string key, kind;
    int N = 0;
    double L = 0.0;
    if (!(in >> key >> N) || key != "N") throw IoError("snapshot missing N: " + path);
    if (!(in >> key >> L) || key != "L") throw IoError("snapshot missing L: " + path);
    if (!(in >> key >> kind) || key != "kind") throw IoError("snapshot missing kind: " + path);
    SpectralField f(Grid(N, L), kind == "vector" ? FieldKind::vector : FieldKind::scalar);
    int nx, ny, nz;
    while (in >> nx >> ny >> nz) {
        for (int c = 0; c < f.components(); ++c) {
            double re, im;
            if (!(in >> re >> im)) throw IoError("snapshot truncated: " + path);
            f.at(c, nx, ny, nz) = cplx(re, im);
            f.at(c, -nx, -ny, -nz) = cplx(re, -im);
        }
    }
    f.pin_zero_mode();
    return f;
}

// ---- initial data ----

/// amplitude * e * cos(k.x) with e the normalized Leray projection of a
/// reference direction: the canonical single-mode divergence-free field.
inline SpectralField make_single_mode_field(const Grid& g, const std::array<int, 3>& n,
                                            double amplitude) {
    double ref[3] = {0.0, 0.0, 1.0};
    if (n[0] == 0 && n[1] == 0) ref[0] = 1.0, ref[2] = 0.0;
    const double n2 = double(n[0]) * n[0] + double(n[1]) * n[1] + double(n[2]) * n[2];
    const double ndot = n[0] * ref[0] + n[1] * ref[1] + n[2] * ref[2];
    double e[3], norm = 0.0;
    for (int c = 0; c < 3; ++c) {
        e[c] = ref[c] - n[c] * ndot / n2;
        norm += e[c] * e[c];
    }
    norm = std::sqrt(norm);
    SpectralField f(g, FieldKind::vector);
    for (int c = 0; c < 3; ++c) {
        const cplx half(0.5 * amplitude * e[c] / norm, 0.0);
        f.at(c, n[0], n[1], n[2]) = half;
        f.at(c, -n[0], -n[1], -n[2]) = std::conj(half);
    }
    return f;
}

// ---- run orchestration ----

struct ResolvedModel {
    ModelParams params;
    std::string preset_name;  // "custom" when explicit thetas are used
};

inline ResolvedModel resolve_model(const RunConfig& c) {
    double t1 = c.theta1, t2 = c.theta2;
    if (c.model != "custom") {
        const ModelPreset p = preset(c.model);
        t1 = p.theta1.value();
        t2 = p.theta2.value();
    }
    ForcingSpec forcing;
    forcing.scale = c.forcing_scale;
    for (const ForcingModeSpec& m : c.forcing_modes) {
        if (std::abs(m.n[0]) > c.N || std::abs(m.n[1]) > c.N || std::abs(m.n[2]) > c.N)
            throw ConfigError("config: forcing mode outside the truncation");
        forcing.add_mode(m.n[0], m.n[1], m.n[2], m.amp[0], m.amp[1], m.amp[2]);
    }
    ResolvedModel rm{ModelParams(t1, t2, c.alpha, c.nu, Grid(c.N, c.L), std::move(forcing)), c.model};
    return rm;
}

inline SpectralField make_initial_field(const RunConfig& c, const Grid& g) {
    switch (c.init) {
        case InitKind::single_mode: return make_single_mode_field(g, c.init_mode_k, c.init_amplitude);
        case InitKind::random: return random_divfree(g, c.seed, c.init_decay);
        case InitKind::file: {
            SpectralField f = load_field_snapshot(c.init_file);
            if (f.grid() != g || f.kind() != FieldKind::vector)
                throw ConfigError("init_file grid does not match the configured grid");
            return leray_project(f);
        }
    }
    throw ConfigError("config: unhandled init kind");
}

struct RunResult {
    ExitStatus status = ExitStatus::ok;
    double blowup_time = 0.0;
    long steps_taken = 0;
    std::string records_path, manifest_path;
    std::vector<EnergyRecord> records;
};

inline RunResult run_simulation(const RunConfig& cfg) {
    validate_config(cfg);
    const ResolvedModel rm = resolve_model(cfg);
    const ModelParams& mp = rm.params;

    if (cfg.fftw_planner == "measure") fft_rigor() = FftRigor::measure;
    else if (cfg.fftw_planner == "patient") fft_rigor() = FftRigor::patient;
    else fft_rigor() = FftRigor::estimate;

    SimulationState state0{0.0, make_initial_field(cfg, mp.grid), 0};

    const Classification cls = classify_regularization(mp.theta1, mp.theta2);
    const double gamma = gamma_exponent(mp.theta1, mp.theta2);
    const std::vector<double>& bar = detail::cached_multiplier_cube(mp.grid, mp.advected_filter());
    const double y0 = 1.0 + detail::weighted_norm2(state0.v, 1.0 + mp.theta2, bar.data());

    const std::string manifest_path =
        cfg.manifest_json.empty() ? default_manifest_path(cfg.records_csv) : cfg.manifest_json;

    std::ofstream csv(cfg.records_csv, std::ios::binary);  // binary: LF endings everywhere
    if (!csv) throw IoError("cannot open records file for writing: " + cfg.records_csv);
    csv << records_csv_header() << '\n';

    RunResult out;
    out.records_path = cfg.records_csv;
    out.manifest_path = manifest_path;

    // running trapezoid defect of the energy identity, stored per record
    double diss_int = 0.0, work_int = 0.0, e_init = 0.0;
    const auto t_start = std::chrono::steady_clock::now();

    auto observe = [&](const SimulationState& s) {
        EnergyRecord r = make_energy_record(s, mp);
        if (out.records.empty()) {
            e_init = r.e0 + r.e_theta;
        } else {
            const EnergyRecord& prev = out.records.back();
            const double h = r.t - prev.t;
            diss_int += 0.5 * h * ((prev.d1 + prev.d1_theta) + (r.d1 + r.d1_theta));
            work_int += 0.5 * h * (prev.work + r.work);
            const double denom = e_init > 0.0 ? e_init : 1.0;
            r.residual =
                std::abs((r.e0 + r.e_theta) + 2.0 * mp.nu * diss_int - 2.0 * work_int - e_init) / denom;
        }
        out.records.push_back(r);
        append_record_csv(csv, r);
    };

    IntegrationOptions opt;
    opt.dt = cfg.dt;
    opt.observer_interval = cfg.diag_interval;
    opt.blowup_guard = cfg.blowup_guard;
    opt.cfl_visc = cfg.cfl_visc;
    opt.cfl_adv = cfg.cfl_adv;

    IntegrationResult ir = integrate(state0, mp, cfg.t_end, opt, observe);
    csv.flush();
    if (!csv) throw IoError("failed while writing records: " + cfg.records_csv);
    csv.close();

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    if (!cfg.snapshot_path.empty()) write_field_snapshot(cfg.snapshot_path, ir.state.v);

    out.status = ir.status == RunStatus::blowup_detected ? ExitStatus::blowup_detected : ExitStatus::ok;
    out.blowup_time = ir.blowup_time;
    out.steps_taken = ir.steps_taken;

    nlohmann::ordered_json m;
    m["code_version"] = version_string();
    m["model_preset"] = rm.preset_name;
    m["theta1"] = mp.theta1;
    m["theta2"] = mp.theta2;
    m["alpha_length"] = mp.alpha;
    m["nu_viscosity"] = mp.nu;
    m["domain_period"] = mp.grid.period;
    m["truncation_modes"] = mp.grid.trunc;
    m["dt_time_step"] = cfg.dt;
    m["t_end_time"] = cfg.t_end;
    m["seed"] = cfg.seed;
    m["init_kind"] = cfg.init == InitKind::single_mode   ? "single_mode"
                     : cfg.init == InitKind::random ? "random"
                                                    : "file";
    m["init_decay"] = cfg.init_decay;
    m["init_mode_k"] = cfg.init_mode_k;
    m["init_amplitude"] = cfg.init_amplitude;
    m["init_file"] = cfg.init_file;
    m["forcing_mode_count"] = cfg.forcing_modes.size();
    m["forcing_scale"] = cfg.forcing_scale;
    m["diag_interval_steps"] = cfg.diag_interval;
    m["blowup_guard"] = cfg.blowup_guard;
    m["c_const"] = cfg.c_const;
    m["cfl_visc"] = cfg.cfl_visc;
    m["cfl_adv"] = cfg.cfl_adv;
    m["fftw_planner"] = cfg.fftw_planner;
    m["records_csv"] = cfg.records_csv;
    m["snapshot_path"] = cfg.snapshot_path;
    m["sing_threshold"] = cfg.sing_threshold;
    m["sing_exponent"] = cfg.sing_exponent;
    m["classification"] = regime_name(cls.regime);
    m["classification_exact"] = cls.exact;
    m["classification_admissible"] = cls.admissible;
    m["classification_boundary"] = cls.boundary;
    m["classification_message"] = cls.message;
    m["gamma_exponent"] = gamma;
    m["initial_y0"] = y0;
    if (cls.regime != Regime::supercritical) {
        m["predicted_t_star"] = predict_blowup_time(y0, cfg.c_const, gamma).t_star;
    }
    if (cls.regime == Regime::subcritical) {
        m["hausdorff_exponent"] = hausdorff_exponent(mp.theta1, mp.theta2);
    }
    m["status"] = out.status == ExitStatus::ok ? "ok" : "blowup_detected";
    if (out.status == ExitStatus::blowup_detected) m["blowup_last_finite_time"] = out.blowup_time;
    m["steps_taken"] = out.steps_taken;
    m["final_time"] = ir.state.t;
    m["final_energy_identity_residual"] = out.records.empty() ? 0.0 : out.records.back().residual;
    m["wall_time_seconds"] = wall;

    std::ofstream mj(manifest_path, std::ios::binary);
    if (!mj) throw IoError("cannot open manifest for writing: " + manifest_path);
    mj << m.dump(2) << '\n';
    if (!mj) throw IoError("failed while writing manifest: " + manifest_path);

    return out;
}

// ---- post-run singularity analysis ----

struct AnalyzeOptions {
    std::string manifest_path;  // empty = derived from records path
    double threshold = 0.0;     // 0 = manifest sing_threshold, else blowup_guard
    double exponent = 0.0;      // 0 = derive from the manifest thetas
};

inline nlohmann::ordered_json analyze_records(const std::string& records_path,
                                              const AnalyzeOptions& opt = {}) {
    const std::vector<EnergyRecord> recs = read_records_csv(records_path);
    if (recs.size() < 2) throw IoError("records file has fewer than 2 rows: " + records_path);

    const std::string manifest_path =
        opt.manifest_path.empty() ? default_manifest_path(records_path) : opt.manifest_path;
    std::ifstream mf(manifest_path);
    if (!mf) throw IoError("cannot open manifest: " + manifest_path);
    nlohmann::json manifest;
    try {
        mf >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("malformed manifest " + manifest_path + ": " + e.what());
    }
    const double theta1 = manifest.at("theta1").get<double>();
    const double theta2 = manifest.at("theta2").get<double>();

    double threshold = opt.threshold;
    if (threshold <= 0.0) threshold = manifest.value("sing_threshold", 0.0);
    if (threshold <= 0.0) threshold = manifest.value("blowup_guard", 0.0);
    if (threshold <= 0.0) throw ConfigError("analyze: no usable threshold (pass --threshold)");

    const Classification cls = classify_regularization(theta1, theta2);
    double a = opt.exponent;
    if (a <= 0.0) a = manifest.value("sing_exponent", 0.0);  // the run's configured override
    if (a <= 0.0) {
        if (cls.regime != Regime::subcritical)
            throw ConfigError(std::string("analyze: ") + regime_name(cls.regime) +
                              " regularization: the singular-set exponent (1-2*theta2-4*theta1)/2 "
                              "is 0 or negative; pass --exponent explicitly");
        a = hausdorff_exponent(theta1, theta2);
    }

    std::vector<double> ts, ys;
    ts.reserve(recs.size());
    ys.reserve(recs.size());
    for (const EnergyRecord& r : recs) {
        ts.push_back(r.t);
        ys.push_back(std::sqrt(std::max(r.n1theta, 0.0)));  // || v- ||_{1+theta2,2}
    }
    const double T = ts.back();
    const IntervalSet regular = detect_regular_set(ts, ys, threshold, T);
    const auto singular = complement_intervals(regular);

    nlohmann::ordered_json rep;
    rep["records"] = records_path;
    rep["manifest"] = manifest_path;
    rep["horizon_T"] = T;
    rep["threshold"] = threshold;
    rep["exponent_a"] = a;
    rep["classification"] = regime_name(cls.regime);
    rep["classification_message"] = cls.message;
    rep["singular_set_semantics"] =
        "threshold-exceedance set of || v_bar ||_{1+theta2,2}: a finite Galerkin solution never "
        "truly blows up, so exceedances stand in for loss of H^{1+theta2} regularity";
    rep["regular_components"] = regular.components;
    rep["singular_intervals"] = singular;
    rep["regular_total_length"] = regular.total_length();
    rep["singular_sum"] = singular_sum(regular, a);
    rep["premeasure_eps_inf"] =
        hausdorff_premeasure(singular, HausdorffQuery(a, std::numeric_limits<double>::infinity()));
    nlohmann::ordered_json recov = nlohmann::ordered_json::array();
    for (const double eps : {1e-1, 1e-2, 1e-3}) {
        const RecoveringReport r = recovering_bound(regular, a, eps);
        nlohmann::ordered_json j;
        j["eps"] = eps;
        j["bound"] = r.bound;
        j["tail_sum"] = r.tail_sum;
        j["tail_length"] = r.tail_length;
        j["chain_holds"] = r.chain_holds;
        j["vacuous"] = r.vacuous;
        j["kept_components"] = r.kept;
        j["premeasure"] = hausdorff_premeasure(singular, HausdorffQuery(a, eps));
        recov.push_back(j);
    }
    rep["recovering"] = recov;
    return rep;
}

}  // namespace nsalpha
