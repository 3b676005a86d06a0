#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "ngc/dataset.hpp"
#include "ngc/trainer.hpp"

namespace ngc {

/// Test-split sizes for the generate command; the split reuses the train
/// cluster layout but carries no injected label noise.
struct TestSplitConfig {
    int samples_per_class = 0;
    int num_ood = 0;
};

/// Whole-run configuration. Parsed from a single JSON document; unknown keys
/// anywhere are hard errors and every message names the offending field.
struct RunConfig {
    std::uint64_t seed = 0;
    int num_classes = 0;
    std::string out_dir;
    std::string train_csv;  // defaults to <out_dir>/train.csv
    std::string test_csv;   // defaults to <out_dir>/test.csv

    std::optional<SyntheticConfig> synthetic;
    TestSplitConfig test_split;

    TrainerConfig trainer;
    double zeta = 0.5;

    static RunConfig from_json(const nlohmann::json& doc,
                               const std::string& out_dir_override = "");
    static RunConfig from_file(const std::string& path,
                               const std::string& out_dir_override = "");
};

}  // namespace ngc
