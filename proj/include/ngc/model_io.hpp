#pragma once

#include <optional>
#include <string>

#include "ngc/model.hpp"
#include "ngc/ood.hpp"

namespace ngc {

/// Model checkpoint: the three weight matrices plus, when training selected
/// at least one clean sample, the class prototypes.
struct ModelArtifacts {
    ToyModel model;
    std::optional<Prototypes> prototypes;
};

/// Plain little binary: magic "NGCM", version, dimensions, then the dense
/// matrices row-major in native doubles.
void save_model(const ModelArtifacts& artifacts, const std::string& path);
ModelArtifacts load_model(const std::string& path);

}  // namespace ngc
