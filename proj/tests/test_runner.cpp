#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsalpha/nsalpha.hpp"

using namespace nsalpha;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nsalpha_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out);
    out << text;
}

RunConfig decay_config(const TempDir& dir, const std::string& stem) {
    RunConfig c;
    c.model = "custom";
    c.theta1 = 0.25;
    c.theta2 = 0.0;
    c.alpha = 0.1;
    c.nu = 1.0;
    c.N = 8;
    c.dt = 1e-3;
    c.t_end = 1.0;
    c.init = InitKind::single_mode;
    c.init_mode_k = {1, 0, 0};
    c.init_amplitude = 1.0;
    c.diag_interval = 10;
    c.records_csv = dir.file(stem + ".csv");
    return c;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(NSALPHA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("presets") {
    const ModelPreset b = preset("bardina");
    REQUIRE(b.theta1 == Rational{1, 6});
    REQUIRE(b.theta2 == Rational{1, 6});
    const ModelPreset l = preset("leray_alpha");
    REQUIRE(l.theta1 == Rational{1, 4});
    REQUIRE(l.theta2 == Rational{0, 1});
    const ModelPreset m = preset("modified_leray_alpha");
    REQUIRE(m.theta1 == Rational{0, 1});
    REQUIRE(m.theta2 == Rational{1, 2});
    REQUIRE_THROWS_AS(preset("smagorinsky"), std::invalid_argument);
}

TEST_CASE("classify_regularization") {
    SECTION("table presets sit on the critical line") {
        for (const ModelPreset& p : builtin_presets()) {
            const Classification c = classify_regularization(p.theta1.value(), p.theta2.value());
            REQUIRE(c.regime == Regime::critical);
            REQUIRE(c.exact);
        }
    }
    SECTION("side conditions and the boundary corner") {
        REQUIRE(classify_regularization(1.0 / 6.0, 1.0 / 6.0).admissible);
        REQUIRE(classify_regularization(0.0, 0.5).admissible);
        const Classification corner = classify_regularization(0.25, 0.0);
        REQUIRE(corner.regime == Regime::critical);
        REQUIRE_FALSE(corner.admissible);
        REQUIRE(corner.boundary);
    }
    SECTION("off-line classifications") {
        const Classification sub = classify_regularization(0.0, 0.0);
        REQUIRE(sub.regime == Regime::subcritical);
        REQUIRE(hausdorff_exponent(0.0, 0.0) == 0.5);
        REQUIRE(classify_regularization(0.25, 0.25).regime == Regime::supercritical);
    }
    SECTION("range errors") {
        REQUIRE_THROWS_AS(classify_regularization(-0.1, 0.0), std::invalid_argument);
        REQUIRE_THROWS_AS(classify_regularization(0.0, 1.5), std::invalid_argument);
    }
}

TEST_CASE("config parsing") {
    SECTION("full key set round trip") {
        std::istringstream in(
            "# comment\n"
            "model = bardina\n"
            "alpha = 0.2\n"
            "nu = 0.05\n"
            "L = 3.14\n"
            "N = 4\n"
            "dt = 0.001\n"
            "t_end = 0.5\n"
            "seed = 42\n"
            "init = random\n"
            "init_decay = 3\n"
            "forcing = modes\n"
            "forcing_modes = 1 0 0  0 0  0.1 0  0 0 ; 0 1 1  0.2 0  0 0  0 0\n"
            "forcing_scale = 2\n"
            "diag_interval = 5\n"
            "blowup_guard = 1e6\n"
            "c_const = 0.5\n"
            "records_csv = out.csv\n"
            "fftw_planner = measure\n");
        const RunConfig c = parse_config(in);
        REQUIRE(c.model == "bardina");
        REQUIRE(c.alpha == 0.2);
        REQUIRE(c.N == 4);
        REQUIRE(c.seed == 42);
        REQUIRE(c.forcing_modes.size() == 2);
        REQUIRE(c.forcing_modes[0].amp[1] == cplx(0.1, 0.0));
        REQUIRE(c.forcing_scale == 2.0);
        REQUIRE(default_manifest_path(c.records_csv) == "out.manifest.json");
    }
    SECTION("rejections") {
        auto reject = [](const std::string& text) {
            std::istringstream in(text);
            REQUIRE_THROWS_AS(parse_config(in), ConfigError);
        };
        reject("model = smagorinsky\n");
        reject("nu = -1\n");
        reject("N = 1\n");
        reject("dt = -0.1\n");
        reject("mystery_key = 3\n");
        reject("t_end = 0\n");
        reject("init = single_mode\ninit_mode_k = 0 0 0\n");
        reject("fftw_planner = psychic\n");
    }
}

TEST_CASE("run: single-mode decay end to end") {
    TempDir dir;
    RunConfig cfg = decay_config(dir, "decay");
    cfg.diag_interval = 1;  // per-step records keep the trapezoid defect at dt^2
    const RunResult r = run_simulation(cfg);
    REQUIRE(r.status == ExitStatus::ok);
    REQUIRE(r.steps_taken == 1000);

    const auto recs = read_records_csv(cfg.records_csv);
    REQUIRE(recs.size() == 1001);
    REQUIRE(recs.front().t == 0.0);
    REQUIRE(recs.back().t == 1.0);
    // final L2 energy of the advected field matches the closed-form decay
    const double ratio = recs.back().e0 / recs.front().e0;
    REQUIRE(std::abs(ratio - std::exp(-2.0)) <= 1e-9 * std::exp(-2.0));
    // identity residual stays at quadrature accuracy
    REQUIRE(energy_identity_residual(recs, cfg.nu) <= 1e-6);

    SECTION("manifest carries classification and prediction") {
        nlohmann::json m;
        std::ifstream in(r.manifest_path);
        REQUIRE(in);
        in >> m;
        REQUIRE(m.at("classification") == "critical");
        REQUIRE(m.at("classification_boundary") == true);  // (1/4, 0) corner
        REQUIRE(m.at("gamma_exponent").get<double>() == Approx(4.0));
        REQUIRE(m.at("status") == "ok");
        REQUIRE(m.contains("predicted_t_star"));
    }
}

TEST_CASE("run: zero initial data and zero forcing give all-zero columns") {
    TempDir dir;
    RunConfig cfg = decay_config(dir, "zero");
    cfg.init_amplitude = 0.0;
    cfg.t_end = 0.05;
    const RunResult r = run_simulation(cfg);
    REQUIRE(r.status == ExitStatus::ok);
    for (const EnergyRecord& rec : read_records_csv(cfg.records_csv)) {
        REQUIRE(rec.e0 == 0.0);
        REQUIRE(rec.d1 == 0.0);
        REQUIRE(rec.work == 0.0);
        REQUIRE(rec.v_l2 == 0.0);
    }
}

TEST_CASE("run: identical configs produce byte-identical records") {
    TempDir dir;
    RunConfig a = decay_config(dir, "détaillé_a");
    a.init = InitKind::random;
    a.init_decay = 2.0;
    a.seed = 7;
    a.t_end = 0.05;
    RunConfig b = a;
    b.records_csv = dir.file("b.csv");
    run_simulation(a);
    run_simulation(b);
    REQUIRE(slurp(a.records_csv) == slurp(b.records_csv));
}

TEST_CASE("run: blow-up guard surfaces as a status, not an error") {
    TempDir dir;
    RunConfig cfg = decay_config(dir, "guarded");
    cfg.init = InitKind::random;
    cfg.init_decay = 2.0;
    cfg.blowup_guard = 1e-12;
    cfg.t_end = 0.05;
    const RunResult r = run_simulation(cfg);
    REQUIRE(r.status == ExitStatus::blowup_detected);
    nlohmann::json m;
    std::ifstream in(r.manifest_path);
    in >> m;
    REQUIRE(m.at("status") == "blowup_detected");
    REQUIRE(m.contains("blowup_last_finite_time"));
}

TEST_CASE("field snapshots round trip and feed init = file") {
    TempDir dir;
    Grid g(6);
    const SpectralField u = random_divfree(g, 99, 2.0);
    const std::string snap = dir.file("field.dat");
    write_field_snapshot(snap, u);
    const SpectralField back = load_field_snapshot(snap);
    REQUIRE(back.grid() == g);
    REQUIRE(back.raw() == u.raw());  // %.17g round trip is exact

    RunConfig cfg = decay_config(dir, "fromfile");
    cfg.N = 6;
    cfg.init = InitKind::file;
    cfg.init_file = snap;
    cfg.t_end = 0.01;
    cfg.dt = 1e-3;
    REQUIRE(run_simulation(cfg).status == ExitStatus::ok);

    SECTION("grid mismatch is a config error") {
        RunConfig bad = decay_config(dir, "badgrid");
        bad.N = 8;
        bad.init = InitKind::file;
        bad.init_file = snap;
        REQUIRE_THROWS_AS(run_simulation(bad), ConfigError);
    }
}

TEST_CASE("analyze") {
    TempDir dir;
    RunConfig cfg = decay_config(dir, "an");
    cfg.t_end = 0.2;
    run_simulation(cfg);

    SECTION("a run's own outputs analyze cleanly with an explicit exponent") {
        AnalyzeOptions opt;
        opt.exponent = 0.5;  // the (1/4, 0) corner is critical: override required
        const auto rep = analyze_records(cfg.records_csv, opt);
        REQUIRE(rep.at("singular_intervals").empty());
        REQUIRE(rep.at("singular_sum").get<double>() >= 0.0);
        REQUIRE(rep.at("regular_components").size() == 1);
    }
    SECTION("critical-line runs are rejected without an exponent override") {
        try {
            analyze_records(cfg.records_csv, {});
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            REQUIRE(msg.find("critical") != std::string::npos);
            REQUIRE(msg.find("exponent") != std::string::npos);
        }
    }
    SECTION("a sing_exponent configured on the run serves as the default override") {
        RunConfig withexp = decay_config(dir, "withexp");
        withexp.t_end = 0.05;
        withexp.sing_exponent = 0.4;
        run_simulation(withexp);
        const auto rep = analyze_records(withexp.records_csv, {});
        REQUIRE(rep.at("exponent_a").get<double>() == 0.4);
    }
    SECTION("subcritical runs derive the exponent from the manifest") {
        RunConfig sub = decay_config(dir, "sub");
        sub.model = "custom";
        sub.theta1 = 0.05;
        sub.theta2 = 0.1;
        sub.t_end = 0.05;
        run_simulation(sub);
        const auto rep = analyze_records(sub.records_csv, {});
        REQUIRE(rep.at("exponent_a").get<double>() ==
                Approx(hausdorff_exponent(0.05, 0.1)).margin(1e-15));
    }
    SECTION("missing records file is an io error") {
        REQUIRE_THROWS_AS(analyze_records(dir.file("nope.csv"), {}), IoError);
    }
    SECTION("synthetic excursion of width 0.04 is covered at cost 0.2") {
        // hand-written records: || v- ||_{1+theta2,2} = sqrt(n1theta) crosses
        // the threshold 2 exactly on [0.50, 0.54]
        std::ostringstream csv;
        csv << records_csv_header() << "\n";
        auto row = [&](double t, double norm) {
            csv << t << ",1,0,1,0,0," << norm * norm << ",1,1\n";
        };
        row(0.0, 1.0);
        row(0.50, 2.0);
        row(0.52, 3.0);
        row(0.54, 2.0);
        row(1.0, 1.0);
        write_text(dir.file("synth.csv"), csv.str());
        write_text(dir.file("synth.manifest.json"),
                   "{\"theta1\": 0.05, \"theta2\": 0.1, \"blowup_guard\": 1e8}\n");
        AnalyzeOptions opt;
        opt.threshold = 2.0;
        opt.exponent = 0.5;
        const auto rep = analyze_records(dir.file("synth.csv"), opt);
        const auto sing = rep.at("singular_intervals");
        REQUIRE(sing.size() == 1);
        REQUIRE(sing[0][0].get<double>() == Approx(0.50));
        REQUIRE(sing[0][1].get<double>() == Approx(0.54));
        REQUIRE(rep.at("premeasure_eps_inf").get<double>() == Approx(0.2).epsilon(1e-12));
    }
}

TEST_CASE("cli subcommands") {
    TempDir dir;
    SECTION("preset listing and lookup") {
        REQUIRE(run_cli("preset --list") == 0);
        REQUIRE(run_cli("preset --name bardina") == 0);
        REQUIRE(run_cli("preset --name smagorinsky") == 2);
        REQUIRE(run_cli("preset") == 2);
    }
    SECTION("classify exit codes") {
        REQUIRE(run_cli("classify --theta1 0.1666666666666667 --theta2 0.1666666666666667") == 0);
        REQUIRE(run_cli("classify --theta1 2 --theta2 0") == 2);
        REQUIRE(run_cli("classify") == 2);
    }
    SECTION("run and analyze round trip through the binary") {
        const std::string cfg_path = dir.file("run.cfg");
        write_text(cfg_path,
                   "model = custom\n"
                   "theta1 = 0.05\n"
                   "theta2 = 0.1\n"
                   "nu = 1\n"
                   "N = 4\n"
                   "dt = 0.001\n"
                   "t_end = 0.02\n"
                   "init = single_mode\n"
                   "init_mode_k = 1 0 0\n"
                   "records_csv = " + dir.file("cli.csv") + "\n");
        REQUIRE(run_cli("run --config " + cfg_path) == 0);
        REQUIRE(fs::exists(dir.file("cli.csv")));
        REQUIRE(fs::exists(dir.file("cli.manifest.json")));
        REQUIRE(run_cli("analyze --records " + dir.file("cli.csv") + " --out " +
                        dir.file("report.json")) == 0);
        REQUIRE(fs::exists(dir.file("report.json")));
    }
    SECTION("bad config content exits 2 and writes nothing") {
        const std::string cfg_path = dir.file("bad.cfg");
        write_text(cfg_path, "model = smagorinsky\nrecords_csv = " + dir.file("bad.csv") + "\n");
        REQUIRE(run_cli("run --config " + cfg_path) == 2);
        REQUIRE_FALSE(fs::exists(dir.file("bad.csv")));
    }
    SECTION("missing config file exits 4") {
        REQUIRE(run_cli("run --config " + dir.file("missing.cfg")) == 4);
    }
}
