#include "ngc/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "ngc/metrics.hpp"
#include "ngc/model_io.hpp"
#include "ngc/ood.hpp"
#include "ngc/trainer.hpp"

namespace ngc {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + cfg.out_dir + "'");
}

int count_data_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument(path + ": missing header");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty() && line != "\r") ++rows;
    return rows;
}

}  // namespace

void run_generate(const RunConfig& cfg) {
    if (!cfg.synthetic)
        throw std::invalid_argument("config: missing section 'synthetic' (required by generate)");
    ensure_out_dir(cfg);

    Dataset train = generate_synthetic(*cfg.synthetic);
    train.split = Split::Train;
    save_dataset(train, cfg.train_csv);

    if (cfg.test_split.samples_per_class > 0 || cfg.test_split.num_ood > 0) {
        SyntheticConfig test_cfg = *cfg.synthetic;
        test_cfg.samples_per_class = cfg.test_split.samples_per_class;
        test_cfg.num_ood = cfg.test_split.num_ood;
        test_cfg.sym_noise_level = 0.0;
        test_cfg.asym_noise_level = 0.0;
        test_cfg.rng_seed = cfg.seed + 1;  // independent draw from the train split
        Dataset test = generate_synthetic(test_cfg);
        test.split = Split::Test;
        save_dataset(test, cfg.test_csv);
    }
}

void run_train(const RunConfig& cfg) {
    ensure_out_dir(cfg);
    Dataset train = load_dataset(cfg.train_csv, cfg.num_classes);
    Trainer trainer(std::move(train), cfg.trainer);
    trainer.warmup();

    std::ofstream log(cfg.out_dir + "/epochs.jsonl");
    if (!log) throw std::runtime_error("cannot open epoch log for writing");
    EpochReport last;
    for (int e = 0; e < cfg.trainer.epochs; ++e) {
        last = trainer.train_epoch();
        log << last.to_json_line() << "\n";
    }
    log.close();
    if (!log) throw std::runtime_error("write failed for epoch log");

    ModelArtifacts artifacts;
    artifacts.model = trainer.model();
    if (trainer.selection().selected_count() > 0) {
        const ForwardResult full = forward(trainer.model(), trainer.dataset().embeddings);
        artifacts.prototypes =
            compute_prototypes(full.z, trainer.selection().pseudo_labels,
                               trainer.selection().g, cfg.num_classes);
    }
    save_model(artifacts, cfg.out_dir + "/model.bin");

    std::ofstream sel(cfg.out_dir + "/selection.csv");
    dump_selection(trainer.selection(), sel);
    if (!sel) throw std::runtime_error("write failed for selection dump");

    nlohmann::ordered_json summary;
    summary["warmup_epochs"] = cfg.trainer.warmup_epochs;
    summary["epochs"] = cfg.trainer.epochs;
    summary["selected_count"] = trainer.selection().selected_count();
    if (trainer.dataset().has_truth() && cfg.trainer.epochs > 0) {
        const SelectionReport sr = selection_report(trainer.selection(), trainer.dataset());
        summary["selected_noise_rate"] = sr.noise_rate;
        summary["selected_ind_noise"] = sr.ind_noise_selected;
        summary["selected_ood_noise"] = sr.ood_noise_selected;
        if (last.corrected_error_rate) summary["corrected_error_rate"] = *last.corrected_error_rate;
    }
    std::ofstream sum(cfg.out_dir + "/train_summary.json");
    sum << summary.dump(2) << "\n";
    if (!sum) throw std::runtime_error("write failed for train summary");
}

void run_detect(const RunConfig& cfg, std::optional<double> zeta_override,
                std::optional<std::string> out_override) {
    const double zeta = zeta_override.value_or(cfg.zeta);
    const std::string out_path = out_override.value_or(cfg.out_dir + "/detections.csv");

    const ModelArtifacts artifacts = load_model(cfg.out_dir + "/model.bin");
    if (!artifacts.prototypes)
        throw std::invalid_argument(
            "model has no prototypes (trained with zero selected samples); cannot detect");
    if (artifacts.model.num_classes() != cfg.num_classes)
        throw std::invalid_argument("config num_classes does not match the stored model");

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
    out << "id,score,verdict,predicted_class\n";

    if (count_data_rows(cfg.test_csv) == 0) {
        std::cerr << "warning: test file '" << cfg.test_csv << "' has no samples\n";
        return;
    }
    const Dataset test = load_dataset(cfg.test_csv, cfg.num_classes);
    for (Eigen::Index i = 0; i < test.size(); ++i) {
        const DetectionDecision d =
            classify_or_reject(test.embeddings.row(i), artifacts.model, *artifacts.prototypes,
                               zeta);
        out << i << ',' << fmt(d.score) << ',' << (d.is_ood ? "OOD" : "IND") << ','
            << d.predicted_class << '\n';
    }
    if (!out) throw std::runtime_error("write failed for '" + out_path + "'");
}

namespace {

struct DetectionRow {
    double score;
    int predicted_class;
};

std::map<long, DetectionRow> load_detections(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("id,score,verdict,predicted_class", 0) != 0)
        throw std::invalid_argument(path + ": missing detection header");
    std::map<long, DetectionRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        long id = 0;
        DetectionRow row{};
        char verdict[8];
        if (std::sscanf(line.c_str(), "%ld,%lf,%3[A-Z],%d", &id, &row.score, verdict,
                        &row.predicted_class) != 4)
            throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                        ": malformed detection row");
        if (!rows.emplace(id, row).second)
            throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                        ": duplicate id");
    }
    return rows;
}

}  // namespace

nlohmann::ordered_json run_eval(const RunConfig& cfg, bool sweep_zeta,
                                std::optional<double> zeta_override,
                                std::optional<std::string> out_override) {
    const double zeta = zeta_override.value_or(cfg.zeta);
    const std::string report_path = out_override.value_or(cfg.out_dir + "/report.json");
    const std::map<long, DetectionRow> detections =
        load_detections(cfg.out_dir + "/detections.csv");

    const Dataset test = load_dataset(cfg.test_csv, cfg.num_classes);
    if (!test.has_truth())
        throw std::invalid_argument(cfg.test_csv + ": ground truth required for eval");
    if (static_cast<Eigen::Index>(detections.size()) != test.size())
        throw std::invalid_argument("detections and test set differ in sample count");
    for (const auto& [id, row] : detections)
        if (id < 0 || id >= test.size())
            throw std::invalid_argument("detections contain id " + std::to_string(id) +
                                        " absent from the test set");

    std::vector<int> predictions(test.size());
    std::vector<double> scores(test.size());
    std::vector<double> scores_ind, scores_ood;
    for (const auto& [id, row] : detections) {
        predictions[id] = row.predicted_class;
        scores[id] = row.score;
        (test.truth[id] == kOodLabel ? scores_ood : scores_ind).push_back(row.score);
    }

    auto f_at = [&](double threshold) {
        std::vector<Verdict> verdicts(test.size());
        for (Eigen::Index i = 0; i < test.size(); ++i)
            verdicts[i] = {scores[i] < threshold, predictions[i]};
        return f_measure(verdicts, test.truth, cfg.num_classes);
    };

    nlohmann::ordered_json report;
    report["accuracy"] = accuracy(predictions, test.truth);
    if (!scores_ind.empty() && !scores_ood.empty())
        report["auroc"] = auroc(scores_ind, scores_ood);
    else
        report["auroc"] = nullptr;
    report["f_measure"] = f_at(zeta);
    report["zeta"] = zeta;
    report["num_test"] = static_cast<int>(test.size());
    report["num_ind"] = static_cast<int>(scores_ind.size());
    report["num_ood"] = static_cast<int>(scores_ood.size());

    if (sweep_zeta) {
        std::ofstream sweep(cfg.out_dir + "/zeta_sweep.csv");
        if (!sweep) throw std::runtime_error("cannot open zeta sweep output");
        sweep << "zeta,f_measure\n";
        double best_f = -1.0, best_zeta = -1.0;
        for (int step = -100; step <= 100; ++step) {
            const double z = step / 100.0;
            const double f = f_at(z);
            char zeta_buf[16];
            std::snprintf(zeta_buf, sizeof(zeta_buf), "%.2f", z);
            sweep << zeta_buf << ',' << fmt(f) << '\n';
            if (f > best_f) {
                best_f = f;
                best_zeta = z;
            }
        }
        if (!sweep) throw std::runtime_error("write failed for zeta sweep");
        report["best_zeta"] = best_zeta;
        report["best_f_measure"] = best_f;
    }

    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot open report output");
    out << report.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for report");
    return report;
}

}  // namespace ngc
