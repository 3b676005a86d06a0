#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "ngc/config.hpp"

namespace ngc {

/// Writes the synthetic train/test CSVs described by the config.
void run_generate(const RunConfig& cfg);

/// Warmup plus the configured number of cleaning epochs; persists the model
/// checkpoint, the final selection dump, and a JSON-lines epoch log under
/// out_dir.
void run_train(const RunConfig& cfg);

/// Scores the test CSV against the stored prototypes and writes
/// `id,score,verdict,predicted_class` rows.
void run_detect(const RunConfig& cfg, std::optional<double> zeta_override = {},
                std::optional<std::string> out_override = {});

/// Joins detections with ground truth by id and reports accuracy, AUROC and
/// macro F at the configured threshold; optionally sweeps the threshold.
nlohmann::ordered_json run_eval(const RunConfig& cfg, bool sweep_zeta = false,
                                std::optional<double> zeta_override = {},
                                std::optional<std::string> out_override = {});

}  // namespace ngc
