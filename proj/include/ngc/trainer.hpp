#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ngc/dataset.hpp"
#include "ngc/knn_graph.hpp"
#include "ngc/losses.hpp"
#include "ngc/model.hpp"
#include "ngc/propagation.hpp"
#include "ngc/selection.hpp"

namespace ngc {

struct TrainerConfig {
    GraphParams graph;
    PropagationParams propagation;
    bool row_normalize = true;  // rescale propagated rows before thresholding
    double eta = 0.8;
    LossParams loss;
    int hidden_dim = 32;
    int proj_dim = 16;
    double ema_momentum = 0.6;
    int warmup_epochs = 5;
    int epochs = 50;
    int batch_size = 64;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;

    void validate(Eigen::Index num_samples) const;
};

struct EpochReport {
    int epoch = 0;
    double loss_ce = 0.0;
    double loss_inst = 0.0;
    double loss_subgraph = 0.0;
    int selected_count = 0;
    // Present when the dataset carries ground truth.
    std::optional<double> selected_noise_rate;   // given != true among selected
    std::optional<double> corrected_error_rate;  // pseudo != true among IND samples
    std::optional<int> selected_ind_noise;
    std::optional<int> selected_ood_noise;

    std::string to_json_line() const;
};

/// Owns the model, the prediction ensemble, and the selection state carried
/// across epochs. One call to train_epoch runs the whole per-epoch cleaning
/// pass (graph build, propagation, subgraph selection) followed by minibatch
/// gradient descent on the combined objective.
class Trainer {
public:
    Trainer(Dataset dataset, TrainerConfig config);

    /// Cross-entropy-only passes on the given labels.
    void warmup();
    void warmup(int epochs);

    EpochReport train_epoch();

    const Dataset& dataset() const { return dataset_; }
    const ToyModel& model() const { return model_; }
    ToyModel& model() { return model_; }
    const SelectionState& selection() const { return selection_; }
    const SoftLabelMatrix& soft_labels() const { return soft_; }
    const TemporalEnsemble& ensemble() const { return ensemble_; }
    int epoch() const { return epoch_; }

private:
    void sgd_pass(const std::vector<int>& order, EpochReport& report);

    Dataset dataset_;
    TrainerConfig config_;
    std::mt19937_64 rng_;
    ToyModel model_;
    TemporalEnsemble ensemble_;
    SelectionState selection_;
    SoftLabelMatrix soft_;
    int epoch_ = 0;
};

}  // namespace ngc
