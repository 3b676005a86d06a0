#include "ngc/trainer.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace ngc {

void TrainerConfig::validate(Eigen::Index num_samples) const {
    if (graph.k < 1 || graph.k >= num_samples)
        throw std::invalid_argument("config: graph.k must satisfy 1 <= k < N");
    if (graph.gamma < 0) throw std::invalid_argument("config: graph.gamma must be >= 0");
    if (!(propagation.alpha > 0.0 && propagation.alpha < 1.0))
        throw std::invalid_argument("config: propagation.alpha must be in (0,1)");
    if (!(propagation.cg_tolerance > 0.0) || propagation.cg_max_iters < 1)
        throw std::invalid_argument("config: bad conjugate gradient settings");
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("config: selection.eta must be in [0,1]");
    loss.validate();
    if (hidden_dim < 1 || proj_dim < 1)
        throw std::invalid_argument("config: model dimensions must be >= 1");
    if (ema_momentum < 0.0 || ema_momentum >= 1.0)
        throw std::invalid_argument("config: ema_momentum must be in [0,1)");
    if (warmup_epochs < 0 || epochs < 0)
        throw std::invalid_argument("config: epoch counts must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("config: batch_size must be >= 1");
    if (learning_rate < 0.0)
        throw std::invalid_argument("config: learning_rate must be >= 0");
}

std::string EpochReport::to_json_line() const {
    nlohmann::ordered_json j;
    j["epoch"] = epoch;
    j["loss_ce"] = loss_ce;
    j["loss_inst"] = loss_inst;
    j["loss_subgraph"] = loss_subgraph;
    j["selected_count"] = selected_count;
    if (selected_noise_rate) j["selected_noise_rate"] = *selected_noise_rate;
    if (corrected_error_rate) j["corrected_error_rate"] = *corrected_error_rate;
    if (selected_ind_noise) j["selected_ind_noise"] = *selected_ind_noise;
    if (selected_ood_noise) j["selected_ood_noise"] = *selected_ood_noise;
    return j.dump();
}

Trainer::Trainer(Dataset dataset, TrainerConfig config)
    : dataset_(std::move(dataset)),
      config_(std::move(config)),
      rng_(config_.seed),
      model_(ToyModel::random_init(static_cast<int>(dataset_.dim()), config_.hidden_dim,
                                   dataset_.num_classes, config_.proj_dim, rng_)),
      ensemble_(dataset_.size(), dataset_.num_classes, config_.ema_momentum),
      selection_(SelectionState::none(dataset_.size(), dataset_.num_classes)) {
    dataset_.validate();
    config_.validate(dataset_.size());
}

namespace {

std::vector<int> shuffled_indices(Eigen::Index n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

Matrix gather_rows(const Matrix& m, const std::vector<int>& ids, int begin, int end) {
    Matrix out(end - begin, m.cols());
    for (int r = begin; r < end; ++r) out.row(r - begin) = m.row(ids[r]);
    return out;
}

}  // namespace

void Trainer::warmup() { warmup(config_.warmup_epochs); }

void Trainer::warmup(int epochs) {
    const double lr = config_.learning_rate;
    for (int e = 0; e < epochs; ++e) {
        const std::vector<int> order = shuffled_indices(dataset_.size(), rng_);
        for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
            const int end = static_cast<int>(
                std::min(start + config_.batch_size, order.size()));
            const Matrix x = gather_rows(dataset_.embeddings, order, static_cast<int>(start), end);
            std::vector<int> labels(end - start);
            for (int r = static_cast<int>(start); r < end; ++r)
                labels[r - start] = dataset_.given_labels[order[r]];
            const ForwardResult fwd = forward(model_, x);
            const LogitLoss ce =
                cross_entropy_loss(fwd.logits, labels, std::vector<char>(labels.size(), 1));
            const Matrix grad_hidden = ce.grad_logits * model_.classifier.transpose();
            model_.classifier -= lr * (fwd.hidden.transpose() * ce.grad_logits);
            model_.encoder -= lr * (x.transpose() * grad_hidden);
        }
    }
}

EpochReport Trainer::train_epoch() {
    ++epoch_;
    EpochReport report;
    report.epoch = epoch_;

    const ForwardResult full = forward(model_, dataset_.embeddings);
    ensemble_.update(softmax_rows(full.logits));

    const SparseGraph graph = build_knn_graph(full.z, config_.graph);
    // Clean rows are seeded with their current hard labels: the given label
    // on the given-trust branch, the corrected argmax otherwise.
    const Matrix y0 = init_label_matrix(selection_.pseudo_labels, selection_.g, ensemble_);
    SoftLabelMatrix propagated;
    try {
        propagated = propagate(graph, y0, config_.propagation);
    } catch (const std::runtime_error& err) {
        throw std::runtime_error("epoch " + std::to_string(epoch_) + ": " + err.what());
    }
    soft_ = config_.row_normalize ? normalize_soft_labels(propagated) : std::move(propagated);
    selection_ =
        subgraph_select(graph, soft_, dataset_.given_labels, config_.eta, dataset_.num_classes);
    report.selected_count = selection_.selected_count();

    sgd_pass(shuffled_indices(dataset_.size(), rng_), report);

    if (dataset_.has_truth()) {
        int noisy_selected = 0, ind_noise = 0, ood_noise = 0;
        for (int v : selection_.clean_set) {
            if (!dataset_.is_mislabeled(v)) continue;
            ++noisy_selected;
            dataset_.is_ood(v) ? ++ood_noise : ++ind_noise;
        }
        if (!selection_.clean_set.empty())
            report.selected_noise_rate =
                static_cast<double>(noisy_selected) / selection_.clean_set.size();
        report.selected_ind_noise = ind_noise;
        report.selected_ood_noise = ood_noise;

        int ind_total = 0, ind_wrong = 0;
        for (Eigen::Index i = 0; i < dataset_.size(); ++i) {
            if (dataset_.is_ood(static_cast<int>(i))) continue;
            ++ind_total;
            if (selection_.pseudo_labels[i] != dataset_.truth[i]) ++ind_wrong;
        }
        if (ind_total > 0)
            report.corrected_error_rate = static_cast<double>(ind_wrong) / ind_total;
    }
    return report;
}

void Trainer::sgd_pass(const std::vector<int>& order, EpochReport& report) {
    const double lr = config_.learning_rate;
    const LossParams& lp = config_.loss;
    double ce_weighted = 0.0;
    int ce_samples = 0;
    double inst_sum = 0.0, sub_sum = 0.0;

    for (std::size_t start = 0; start < order.size(); start += config_.batch_size) {
        const int end =
            static_cast<int>(std::min(start + config_.batch_size, order.size()));
        const int b = end - static_cast<int>(start);

        const Matrix x_anchor =
            gather_rows(dataset_.embeddings, order, static_cast<int>(start), end);
        const Matrix x_view = augment_embedding(x_anchor, lp.jitter_sigma, rng_);

        Batch batch;
        batch.pseudo_labels.resize(2 * b);
        batch.g.resize(2 * b);
        for (int r = 0; r < b; ++r) {
            const int id = order[start + r];
            batch.pseudo_labels[r] = batch.pseudo_labels[b + r] = selection_.pseudo_labels[id];
            batch.g[r] = batch.g[b + r] = selection_.g[id];
        }

        const ForwardResult fa = forward(model_, x_anchor);
        const ForwardResult fv = forward(model_, x_view);
        batch.logits = fa.logits;
        batch.z.resize(2 * b, fa.z.cols());
        batch.z.topRows(b) = fa.z;
        batch.z.bottomRows(b) = fv.z;

        const std::vector<int> anchor_labels(batch.pseudo_labels.begin(),
                                             batch.pseudo_labels.begin() + b);
        const std::vector<char> anchor_g(batch.g.begin(), batch.g.begin() + b);
        const LogitLoss ce = cross_entropy_loss(batch.logits, anchor_labels, anchor_g);
        const EmbeddingLoss inst = instance_contrastive_loss(batch, lp.tau1);
        const EmbeddingLoss sub = subgraph_contrastive_loss(batch, lp.tau2);

        // The contrastive terms are sums over anchors; average them here so
        // the step size does not scale with the batch size.
        const double scale = 1.0 / b;
        const Matrix grad_z =
            scale * (lp.lambda1 * inst.grad_z + lp.lambda2 * sub.grad_z);
        const Matrix grad_raw_a =
            normalization_backprop(fa.z_raw, fa.z, grad_z.topRows(b), fa.zero_rows);
        const Matrix grad_raw_v =
            normalization_backprop(fv.z_raw, fv.z, grad_z.bottomRows(b), fv.zero_rows);

        const Matrix grad_classifier = fa.hidden.transpose() * ce.grad_logits;
        const Matrix grad_projector =
            fa.hidden.transpose() * grad_raw_a + fv.hidden.transpose() * grad_raw_v;
        const Matrix grad_hidden_a = ce.grad_logits * model_.classifier.transpose() +
                                     grad_raw_a * model_.projector.transpose();
        const Matrix grad_hidden_v = grad_raw_v * model_.projector.transpose();
        const Matrix grad_encoder =
            x_anchor.transpose() * grad_hidden_a + x_view.transpose() * grad_hidden_v;

        model_.classifier -= lr * grad_classifier;
        model_.projector -= lr * grad_projector;
        model_.encoder -= lr * grad_encoder;

        const int batch_selected =
            static_cast<int>(std::count(anchor_g.begin(), anchor_g.end(), char(1)));
        ce_weighted += ce.value * batch_selected;
        ce_samples += batch_selected;
        inst_sum += inst.value;
        sub_sum += sub.value;
    }

    report.loss_ce = ce_samples > 0 ? ce_weighted / ce_samples : 0.0;
    report.loss_inst = inst_sum / static_cast<double>(order.size());
    report.loss_subgraph = sub_sum / static_cast<double>(order.size());
}

}  // namespace ngc
