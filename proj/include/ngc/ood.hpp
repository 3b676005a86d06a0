#pragma once

#include <vector>

#include "ngc/dataset.hpp"
#include "ngc/model.hpp"

namespace ngc {

/// One unit-norm mean embedding per class, over that class's selected clean
/// samples. Classes with no selected support are flagged invalid and never
/// participate in scoring.
struct Prototypes {
    Matrix vectors;  // K x P
    std::vector<int> support;
    std::vector<char> valid;

    int num_classes() const { return static_cast<int>(vectors.rows()); }
};

Prototypes compute_prototypes(const Matrix& z, const std::vector<int>& pseudo_labels,
                              const std::vector<char>& g, int num_classes);

/// Maximum cosine similarity between z and any valid prototype.
double ood_score(const Eigen::RowVectorXd& z, const Prototypes& prototypes);

struct DetectionDecision {
    double score = 0.0;
    bool is_ood = false;  // score < zeta, strictly
    int predicted_class = 0;
    double zeta = 0.0;
};

DetectionDecision classify_or_reject(const Eigen::RowVectorXd& x, const ToyModel& model,
                                     const Prototypes& prototypes, double zeta);

}  // namespace ngc
