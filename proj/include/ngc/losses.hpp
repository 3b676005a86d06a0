#pragma once

#include <vector>

#include "ngc/dataset.hpp"

namespace ngc {

struct LossParams {
    double tau1 = 0.3;
    double tau2 = 1.0;
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double jitter_sigma = 0.1;

    void validate() const;
};

/// A minibatch of B anchors and their B paired views. Row b of `z` is anchor
/// b, row B+b its view, so the pairing is j(i) = B + i and the contrast set
/// A(i) for an anchor is every row except itself. Pseudo-labels and clean
/// indicators of a view repeat its source sample's.
struct Batch {
    Matrix z;                        // (2B) x P, unit rows
    std::vector<int> pseudo_labels;  // length 2B
    std::vector<char> g;             // length 2B
    Matrix logits;                   // B x K, anchors only

    int anchors() const { return static_cast<int>(logits.rows()); }
    int view_of(int i) const { return anchors() + i; }
    void validate() const;
};

struct EmbeddingLoss {
    double value = 0.0;
    Matrix grad_z;  // gradient w.r.t. every (unit-normalized) row of z
};

struct LogitLoss {
    double value = 0.0;
    Matrix grad_logits;
};

/// Sum over anchors of -log( exp(z_i.z_j(i)/tau) / sum_{a != i} exp(z_i.z_a/tau) ).
EmbeddingLoss instance_contrastive_loss(const Batch& batch, double tau);

/// Like the instance loss but averaged over the positive set
/// P(i) = {a != i : same pseudo-label, both clean}; anchors with an empty
/// P(i) contribute nothing.
EmbeddingLoss subgraph_contrastive_loss(const Batch& batch, double tau);

/// Mean negative log-softmax over clean anchors; zero when none are clean.
LogitLoss cross_entropy_loss(const Matrix& logits, const std::vector<int>& labels,
                             const std::vector<char>& g);

double total_loss(const Batch& batch, const LossParams& params);

}  // namespace ngc
