#pragma once

#include <string>
#include <vector>

#include "ngc/dataset.hpp"
#include "ngc/selection.hpp"

namespace ngc {

/// Fraction of samples with a known true class whose prediction matches it.
/// Samples with OOD truth are excluded; throws when none remain.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth);

/// Probability that a random in-distribution score beats a random
/// out-of-distribution one, ties counting one half. Computed from average
/// ranks, which equals the area under the ROC curve.
double auroc(const std::vector<double>& scores_ind, const std::vector<double>& scores_ood);

struct Verdict {
    bool rejected = false;
    int predicted_class = 0;
};

/// Macro-averaged per-class F score. Rejected samples count as false
/// negatives of their true class; accepted out-of-distribution samples count
/// as false positives of the predicted class. Classes without any true
/// sample or prediction are left out of the average.
double f_measure(const std::vector<Verdict>& verdicts, const std::vector<int>& truth,
                 int num_classes);

struct SelectionReport {
    double noise_rate = 0.0;  // given != true among selected
    int size = 0;
    int ind_noise_selected = 0;
    int ood_noise_selected = 0;
};

SelectionReport selection_report(const SelectionState& state, const Dataset& dataset);

}  // namespace ngc
