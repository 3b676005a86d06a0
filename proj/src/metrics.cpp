#include "ngc/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace ngc {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("accuracy: length mismatch");
    int total = 0, correct = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == kOodLabel) continue;
        ++total;
        if (predictions[i] == truth[i]) ++correct;
    }
    if (total == 0) throw std::invalid_argument("accuracy: no in-distribution samples");
    return static_cast<double>(correct) / total;
}

double auroc(const std::vector<double>& scores_ind, const std::vector<double>& scores_ood) {
    if (scores_ind.empty() || scores_ood.empty())
        throw std::invalid_argument("auroc: both score sets must be nonempty");

    struct Entry {
        double score;
        bool ind;
    };
    std::vector<Entry> all;
    all.reserve(scores_ind.size() + scores_ood.size());
    for (double s : scores_ind) all.push_back({s, true});
    for (double s : scores_ood) all.push_back({s, false});
    std::sort(all.begin(), all.end(),
              [](const Entry& a, const Entry& b) { return a.score < b.score; });

    // Rank sum with average ranks over tied blocks; U = R_ind - n(n+1)/2.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t)
            if (all[t].ind) rank_sum += avg_rank;
        i = j;
    }
    const double n1 = static_cast<double>(scores_ind.size());
    const double n2 = static_cast<double>(scores_ood.size());
    const double u = rank_sum - n1 * (n1 + 1.0) / 2.0;
    return u / (n1 * n2);
}

double f_measure(const std::vector<Verdict>& verdicts, const std::vector<int>& truth,
                 int num_classes) {
    if (verdicts.size() != truth.size())
        throw std::invalid_argument("f_measure: length mismatch");
    std::vector<int> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const Verdict& v = verdicts[i];
        if (truth[i] != kOodLabel) {
            if (!v.rejected && v.predicted_class == truth[i])
                ++tp[truth[i]];
            else
                ++fn[truth[i]];
        }
        if (!v.rejected && v.predicted_class != truth[i]) ++fp[v.predicted_class];
    }
    double sum = 0.0;
    int counted = 0;
    for (int k = 0; k < num_classes; ++k) {
        if (tp[k] + fp[k] + fn[k] == 0) continue;
        ++counted;
        const double p = tp[k] + fp[k] > 0 ? static_cast<double>(tp[k]) / (tp[k] + fp[k]) : 0.0;
        const double r = tp[k] + fn[k] > 0 ? static_cast<double>(tp[k]) / (tp[k] + fn[k]) : 0.0;
        if (p + r > 0) sum += 2.0 * p * r / (p + r);
    }
    return counted > 0 ? sum / counted : 0.0;
}

SelectionReport selection_report(const SelectionState& state, const Dataset& dataset) {
    if (!dataset.has_truth())
        throw std::invalid_argument("selection_report: dataset has no ground truth");
    SelectionReport report;
    report.size = static_cast<int>(state.clean_set.size());
    for (int v : state.clean_set) {
        if (!dataset.is_mislabeled(v)) continue;
        dataset.is_ood(v) ? ++report.ood_noise_selected : ++report.ind_noise_selected;
    }
    if (report.size > 0)
        report.noise_rate =
            static_cast<double>(report.ind_noise_selected + report.ood_noise_selected) /
            report.size;
    return report;
}

}  // namespace ngc
