// Command-line front end: run simulations from config files, classify
// regularizations, analyze record files for singular-set statistics, and
// list the built-in model presets.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsalpha/nsalpha.hpp"

namespace {

int exit_code(nsalpha::ExitStatus s) { return static_cast<int>(s); }

int cmd_run(const std::string& config_path) {
    using namespace nsalpha;
    RunConfig cfg;
    try {
        cfg = parse_config_file(config_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code(ExitStatus::config_error);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_code(ExitStatus::io_error);
    }
    try {
        const RunResult r = run_simulation(cfg);
        if (r.status == ExitStatus::blowup_detected) {
            std::cout << "blowup detected: last finite time " << r.blowup_time << "; wrote "
                      << r.records_path << " and " << r.manifest_path << "\n";
        } else {
            std::cout << "run complete: " << r.steps_taken << " steps; wrote " << r.records_path
                      << " and " << r.manifest_path << "\n";
        }
        return exit_code(r.status);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code(ExitStatus::config_error);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_code(ExitStatus::io_error);
    }
}

int cmd_classify(double theta1, double theta2) {
    using namespace nsalpha;
    try {
        const Classification c = classify_regularization(theta1, theta2);
        nlohmann::ordered_json j;
        j["theta1"] = theta1;
        j["theta2"] = theta2;
        j["regime"] = regime_name(c.regime);
        j["exact_arithmetic"] = c.exact;
        j["admissible"] = c.admissible;
        j["boundary_case"] = c.boundary;
        j["message"] = c.message;
        j["gamma_exponent"] = gamma_exponent(theta1, theta2);
        if (c.regime == Regime::subcritical)
            j["hausdorff_exponent"] = hausdorff_exponent(theta1, theta2);
        std::cout << j.dump(2) << "\n";
        return exit_code(ExitStatus::ok);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code(ExitStatus::config_error);
    }
}

int cmd_analyze(const std::string& records, const std::string& manifest, double threshold,
                double exponent, const std::string& out_path) {
    using namespace nsalpha;
    try {
        AnalyzeOptions opt;
        opt.manifest_path = manifest;
        opt.threshold = threshold;
        opt.exponent = exponent;
        const nlohmann::ordered_json rep = analyze_records(records, opt);
        if (out_path.empty()) {
            std::cout << rep.dump(2) << "\n";
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) throw IoError("cannot open report file for writing: " + out_path);
            out << rep.dump(2) << '\n';
            std::cout << "wrote " << out_path << "\n";
        }
        return exit_code(ExitStatus::ok);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code(ExitStatus::config_error);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_code(ExitStatus::io_error);
    }
}

int cmd_preset(bool list, const std::string& name) {
    using namespace nsalpha;
    auto show = [](const ModelPreset& p) {
        const Classification c = classify_regularization(p.theta1.value(), p.theta2.value());
        std::printf("%-22s theta1 = %s  theta2 = %s  exponent formula %s  [%s%s]\n", p.name.c_str(),
                    (std::to_string(p.theta1.num) + "/" + std::to_string(p.theta1.den)).c_str(),
                    (std::to_string(p.theta2.num) + "/" + std::to_string(p.theta2.den)).c_str(),
                    p.exponent_formula.c_str(), regime_name(c.regime),
                    c.boundary ? ", outside well-posedness side conditions" : "");
    };
    if (list) {
        for (const ModelPreset& p : builtin_presets()) show(p);
        return exit_code(ExitStatus::ok);
    }
    try {
        show(preset(name));
        return exit_code(ExitStatus::ok);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_code(ExitStatus::config_error);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral alpha-model simulator and singular-set analyzer"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "integrate a configured simulation");
    run->add_option("--config", config_path, "flat key = value config file")->required();

    double theta1 = 0.0, theta2 = 0.0;
    CLI::App* classify = app.add_subcommand("classify", "classify a regularization pair");
    classify->add_option("--theta1", theta1, "advecting filter exponent")->required();
    classify->add_option("--theta2", theta2, "advected filter exponent")->required();

    std::string records, manifest, out_path;
    double threshold = 0.0, exponent = 0.0;
    CLI::App* analyze = app.add_subcommand("analyze", "singularity report from a records CSV");
    analyze->add_option("--records", records, "records CSV produced by run")->required();
    analyze->add_option("--threshold", threshold, "exceedance threshold for || v- ||_{1+theta2,2}");
    analyze->add_option("--exponent", exponent, "override the covering-sum exponent a");
    analyze->add_option("--manifest", manifest, "manifest path (default: derived from records)");
    analyze->add_option("--out", out_path, "write the JSON report here instead of stdout");

    bool list = false;
    std::string preset_name;
    CLI::App* preset_cmd = app.add_subcommand("preset", "show built-in model presets");
    preset_cmd->add_flag("--list", list, "list all presets");
    preset_cmd->add_option("--name", preset_name, "show one preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : static_cast<int>(nsalpha::ExitStatus::config_error);
    }

    if (run->parsed()) return cmd_run(config_path);
    if (classify->parsed()) return cmd_classify(theta1, theta2);
    if (analyze->parsed()) return cmd_analyze(records, manifest, threshold, exponent, out_path);
    if (preset_cmd->parsed()) {
        if (!list && preset_name.empty()) {
            std::cerr << "config error: preset needs --list or --name\n";
            return static_cast<int>(nsalpha::ExitStatus::config_error);
        }
        return cmd_preset(list, preset_name);
    }
    return 0;
}
