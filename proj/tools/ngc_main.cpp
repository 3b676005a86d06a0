#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ngc/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Graph-based label cleaning, clean-sample selection and "
                 "prototype out-of-distribution detection over embedding datasets"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    double zeta_override = std::numeric_limits<double>::quiet_NaN();
    bool sweep_zeta = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "Run configuration JSON")->required();
        cmd->add_option("--out", out_override, "Override the default output path");
    };

    CLI::App* generate = app.add_subcommand("generate", "Write synthetic train/test CSVs");
    add_common(generate);

    CLI::App* train = app.add_subcommand("train", "Warmup + cleaning epochs; persist artifacts");
    add_common(train);

    CLI::App* detect = app.add_subcommand("detect", "Score a test CSV against stored prototypes");
    add_common(detect);
    detect->add_option("--zeta", zeta_override, "Rejection threshold in [-1,1]");

    CLI::App* eval = app.add_subcommand("eval", "Metrics report from detections plus ground truth");
    add_common(eval);
    eval->add_option("--zeta", zeta_override, "Rejection threshold in [-1,1]");
    eval->add_flag("--sweep-zeta", sweep_zeta, "Also sweep the threshold and report the best F");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        const bool out_is_dir = generate->parsed() || train->parsed();
        ngc::RunConfig cfg =
            ngc::RunConfig::from_file(config_path, out_is_dir ? out_override : "");
        const std::optional<double> zeta =
            std::isnan(zeta_override) ? std::nullopt : std::optional<double>(zeta_override);
        const std::optional<std::string> out =
            out_override.empty() ? std::nullopt : std::optional<std::string>(out_override);

        if (generate->parsed()) {
            ngc::run_generate(cfg);
        } else if (train->parsed()) {
            ngc::run_train(cfg);
        } else if (detect->parsed()) {
            ngc::run_detect(cfg, zeta, out);
        } else if (eval->parsed()) {
            std::cout << ngc::run_eval(cfg, sweep_zeta, zeta, out).dump(2) << std::endl;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
