#include "ngc/losses.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "ngc/model.hpp"

namespace ngc {

void LossParams::validate() const {
    if (!(tau1 > 0.0) || !(tau2 > 0.0))
        throw std::invalid_argument("losses: temperatures must be > 0");
    if (jitter_sigma < 0.0) throw std::invalid_argument("losses: jitter_sigma must be >= 0");
}

void Batch::validate() const {
    const int b = anchors();
    if (z.rows() != 2 * b) throw std::invalid_argument("batch: z must hold anchors plus views");
    if (static_cast<int>(pseudo_labels.size()) != 2 * b ||
        static_cast<int>(g.size()) != 2 * b)
        throw std::invalid_argument("batch: label/indicator length mismatch");
}

namespace {

// Shared softmax machinery for both contrastive losses: the per-anchor
// target distribution differs only in which rows count as positives.
EmbeddingLoss contrastive_loss(const Batch& batch, double tau,
                               const std::function<void(int, std::vector<int>&)>& positives_of) {
    batch.validate();
    if (!(tau > 0.0)) throw std::invalid_argument("contrastive loss: tau must be > 0");
    const int b = batch.anchors();
    const int rows = 2 * b;

    EmbeddingLoss out;
    out.grad_z = Matrix::Zero(rows, batch.z.cols());
    if (b == 0) return out;

    const Matrix dots = batch.z * batch.z.transpose();
    std::vector<int> pos;
    Vector p(rows);
    for (int i = 0; i < b; ++i) {
        pos.clear();
        positives_of(i, pos);
        if (pos.empty()) continue;

        double max_score = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < rows; ++a)
            if (a != i) max_score = std::max(max_score, dots(i, a) / tau);
        double sum = 0.0;
        for (int a = 0; a < rows; ++a) {
            if (a == i) continue;
            p[a] = std::exp(dots(i, a) / tau - max_score);
            sum += p[a];
        }
        const double lse = max_score + std::log(sum);

        const double inv_count = 1.0 / static_cast<double>(pos.size());
        for (int a : pos) out.value += (lse - dots(i, a) / tau) * inv_count;

        // dL/ds_a = softmax_a - positive share; chain through both ends
        // of each dot product.
        for (int a = 0; a < rows; ++a) {
            if (a == i) continue;
            const double coeff = p[a] / sum;
            out.grad_z.row(i) += coeff / tau * batch.z.row(a);
            out.grad_z.row(a) += coeff / tau * batch.z.row(i);
        }
        for (int a : pos) {
            out.grad_z.row(i) -= inv_count / tau * batch.z.row(a);
            out.grad_z.row(a) -= inv_count / tau * batch.z.row(i);
        }
    }
    return out;
}

}  // namespace

EmbeddingLoss instance_contrastive_loss(const Batch& batch, double tau) {
    return contrastive_loss(batch, tau, [&](int i, std::vector<int>& pos) {
        pos.push_back(batch.view_of(i));
    });
}

EmbeddingLoss subgraph_contrastive_loss(const Batch& batch, double tau) {
    const int rows = 2 * batch.anchors();
    return contrastive_loss(batch, tau, [&](int i, std::vector<int>& pos) {
        if (!batch.g[i]) return;
        for (int a = 0; a < rows; ++a)
            if (a != i && batch.g[a] && batch.pseudo_labels[a] == batch.pseudo_labels[i])
                pos.push_back(a);
    });
}

LogitLoss cross_entropy_loss(const Matrix& logits, const std::vector<int>& labels,
                             const std::vector<char>& g) {
    if (static_cast<Eigen::Index>(labels.size()) != logits.rows() ||
        static_cast<Eigen::Index>(g.size()) != logits.rows())
        throw std::invalid_argument("cross_entropy_loss: label length mismatch");

    LogitLoss out;
    out.grad_logits = Matrix::Zero(logits.rows(), logits.cols());
    int count = 0;
    for (Eigen::Index i = 0; i < logits.rows(); ++i)
        if (g[i]) ++count;
    if (count == 0) return out;

    const Matrix probs = softmax_rows(logits);
    const double inv_count = 1.0 / count;
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        if (!g[i]) continue;
        out.value -= std::log(probs(i, labels[i])) * inv_count;
        out.grad_logits.row(i) = probs.row(i) * inv_count;
        out.grad_logits(i, labels[i]) -= inv_count;
    }
    return out;
}

double total_loss(const Batch& batch, const LossParams& params) {
    params.validate();
    const int b = batch.anchors();
    const std::vector<int> anchor_labels(batch.pseudo_labels.begin(),
                                         batch.pseudo_labels.begin() + b);
    const std::vector<char> anchor_g(batch.g.begin(), batch.g.begin() + b);
    const double ce = cross_entropy_loss(batch.logits, anchor_labels, anchor_g).value;
    const double inst = instance_contrastive_loss(batch, params.tau1).value;
    const double sub = subgraph_contrastive_loss(batch, params.tau2).value;
    return ce + params.lambda1 * inst + params.lambda2 * sub;
}

}  // namespace ngc
