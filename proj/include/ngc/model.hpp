#pragma once

#include <cstdint>
#include <random>

#include "ngc/dataset.hpp"

namespace ngc {

/// Linear encoder with a classifier head and a projector head. Projector
/// outputs are row-normalized before any loss or graph use.
struct ToyModel {
    Matrix encoder;     // D x H
    Matrix classifier;  // H x K
    Matrix projector;   // H x P

    static ToyModel random_init(int dim, int hidden, int num_classes, int proj_dim,
                                std::mt19937_64& rng);

    int input_dim() const { return static_cast<int>(encoder.rows()); }
    int hidden_dim() const { return static_cast<int>(encoder.cols()); }
    int num_classes() const { return static_cast<int>(classifier.cols()); }
    int proj_dim() const { return static_cast<int>(projector.cols()); }
};

struct ForwardResult {
    Matrix hidden;  // N x H
    Matrix logits;  // N x K
    Matrix z_raw;   // N x P, pre-normalization
    Matrix z;       // N x P, unit rows (zero rows stay zero)
    std::vector<char> zero_rows;
};

ForwardResult forward(const ToyModel& model, const Matrix& x);

/// Adds iid Gaussian noise with the given scale to every coordinate.
Matrix augment_embedding(const Matrix& x, double jitter_sigma, std::mt19937_64& rng);

/// Numerically stable row-wise softmax.
Matrix softmax_rows(const Matrix& logits);

/// Pulls a gradient w.r.t. z = raw/|raw| back to raw. Rows flagged zero get
/// a zero gradient.
Matrix normalization_backprop(const Matrix& raw, const Matrix& z, const Matrix& grad_z,
                              const std::vector<char>& zero_rows);

}  // namespace ngc
