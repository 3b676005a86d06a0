#include "ngc/model.hpp"

#include <cmath>
#include <stdexcept>

namespace ngc {

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale,
                       std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

}  // namespace

ToyModel ToyModel::random_init(int dim, int hidden, int num_classes, int proj_dim,
                               std::mt19937_64& rng) {
    if (dim < 1 || hidden < 1 || num_classes < 2 || proj_dim < 1)
        throw std::invalid_argument("model: bad dimensions");
    ToyModel m;
    m.encoder = gaussian_matrix(dim, hidden, 1.0 / std::sqrt(dim), rng);
    m.classifier = gaussian_matrix(hidden, num_classes, 1.0 / std::sqrt(hidden), rng);
    m.projector = gaussian_matrix(hidden, proj_dim, 1.0 / std::sqrt(hidden), rng);
    return m;
}

ForwardResult forward(const ToyModel& model, const Matrix& x) {
    if (x.cols() != model.encoder.rows())
        throw std::invalid_argument("forward: input dimension mismatch");
    ForwardResult r;
    r.hidden.noalias() = x * model.encoder;
    r.logits.noalias() = r.hidden * model.classifier;
    r.z_raw.noalias() = r.hidden * model.projector;
    NormalizedRows norm = normalize_rows(r.z_raw);
    r.z = std::move(norm.values);
    r.zero_rows = std::move(norm.was_zero);
    return r;
}

Matrix augment_embedding(const Matrix& x, double jitter_sigma, std::mt19937_64& rng) {
    if (jitter_sigma < 0) throw std::invalid_argument("augment: sigma must be >= 0");
    if (jitter_sigma == 0) return x;
    std::normal_distribution<double> gauss(0.0, jitter_sigma);
    Matrix out = x;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) += gauss(rng);
    return out;
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix probs(logits.rows(), logits.cols());
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        const double max = logits.row(i).maxCoeff();
        probs.row(i) = (logits.row(i).array() - max).exp();
        probs.row(i) /= probs.row(i).sum();
    }
    return probs;
}

Matrix normalization_backprop(const Matrix& raw, const Matrix& z, const Matrix& grad_z,
                              const std::vector<char>& zero_rows) {
    Matrix grad_raw(raw.rows(), raw.cols());
    for (Eigen::Index i = 0; i < raw.rows(); ++i) {
        if (zero_rows[i]) {
            grad_raw.row(i).setZero();
            continue;
        }
        const double norm = raw.row(i).norm();
        const double along = grad_z.row(i).dot(z.row(i));
        grad_raw.row(i) = (grad_z.row(i) - along * z.row(i)) / norm;
    }
    return grad_raw;
}

}  // namespace ngc
