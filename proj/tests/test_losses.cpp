#include "doctest.h"

#include <cmath>
#include <functional>
#include <random>

#include "ngc/losses.hpp"
#include "ngc/model.hpp"

using namespace ngc;

namespace {

Matrix random_matrix(int n, int d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, scale);
    Matrix m(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = gauss(rng);
    return m;
}

// Builds a batch from raw (pre-normalization) embeddings for the anchor and
// view halves.
Batch make_batch(const Matrix& raw, const std::vector<int>& labels, const std::vector<char>& g,
                 const Matrix& logits) {
    Batch b;
    b.z = normalize_rows(raw).values;
    b.pseudo_labels = labels;
    b.g = g;
    b.logits = logits;
    return b;
}

// Plain scalar restatement of the shared contrastive form: for every anchor
// and every positive, -log softmax of the positive among all other rows.
double naive_contrastive(const Matrix& z, double tau,
                         const std::vector<std::vector<int>>& positives) {
    const int b = static_cast<int>(positives.size());
    const int rows = static_cast<int>(z.rows());
    double loss = 0.0;
    for (int i = 0; i < b; ++i) {
        if (positives[i].empty()) continue;
        double denom = 0.0;
        for (int a = 0; a < rows; ++a)
            if (a != i) denom += std::exp(z.row(i).dot(z.row(a)) / tau);
        double sum = 0.0;
        for (int p : positives[i])
            sum += -std::log(std::exp(z.row(i).dot(z.row(p)) / tau) / denom);
        loss += sum / static_cast<double>(positives[i].size());
    }
    return loss;
}

std::vector<std::vector<int>> instance_positives(int b) {
    std::vector<std::vector<int>> pos(b);
    for (int i = 0; i < b; ++i) pos[i] = {b + i};
    return pos;
}

std::vector<std::vector<int>> subgraph_positives(const Batch& batch) {
    const int b = batch.anchors();
    std::vector<std::vector<int>> pos(b);
    for (int i = 0; i < b; ++i) {
        if (!batch.g[i]) continue;
        for (int a = 0; a < 2 * b; ++a)
            if (a != i && batch.g[a] && batch.pseudo_labels[a] == batch.pseudo_labels[i])
                pos[i].push_back(a);
    }
    return pos;
}

// Central finite differences through the normalization, the oracle for the
// analytic gradients.
double max_relative_grad_error(const Matrix& raw,
                               const std::function<double(const Matrix&)>& loss_of_raw,
                               const Matrix& grad_raw) {
    const double h = 1e-5;
    double worst = 0.0;
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        for (Eigen::Index j = 0; j < raw.cols(); ++j) {
            Matrix plus = raw, minus = raw;
            plus(i, j) += h;
            minus(i, j) -= h;
            const double numeric = (loss_of_raw(plus) - loss_of_raw(minus)) / (2 * h);
            const double analytic = grad_raw(i, j);
            const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
            worst = std::max(worst, std::abs(numeric - analytic) / denom);
        }
    return worst;
}

Matrix grad_through_normalization(const Matrix& raw, const EmbeddingLoss& loss) {
    const NormalizedRows norm = normalize_rows(raw);
    return normalization_backprop(raw, norm.values, loss.grad_z, norm.was_zero);
}

}  // namespace

TEST_CASE("a single-anchor instance loss is exactly zero") {
    Matrix raw(2, 3);
    raw << 1, 2, 3, -1, 0.5, 2;
    const Batch b = make_batch(raw, {0, 0}, {1, 1}, Matrix::Zero(1, 2));
    const EmbeddingLoss loss = instance_contrastive_loss(b, 0.7);
    CHECK(loss.value == 0.0);
    CHECK(loss.grad_z.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("orthogonal pair with identical views hits the closed form") {
    Matrix z(4, 2);
    z << 1, 0, 0, 1, 1, 0, 0, 1;  // anchors then identical copies
    Batch b;
    b.z = z;
    b.pseudo_labels = {0, 1, 0, 1};
    b.g = {1, 1, 1, 1};
    b.logits = Matrix::Zero(2, 2);
    const EmbeddingLoss loss = instance_contrastive_loss(b, 1.0);
    const double e = std::exp(1.0);
    CHECK(loss.value == doctest::Approx(2.0 * std::log((e + 2.0) / e)).epsilon(1e-12));
    CHECK(std::abs(loss.value - 1.1028) < 5e-4);
}

TEST_CASE("instance loss matches the naive scalar recomputation") {
    std::mt19937_64 rng(53);
    for (int trial = 0; trial < 10; ++trial) {
        const int b = 1 + static_cast<int>(rng() % 6);
        const Matrix raw = random_matrix(2 * b, 4, rng);
        const Batch batch = make_batch(raw, std::vector<int>(2 * b, 0),
                                       std::vector<char>(2 * b, 1), Matrix::Zero(b, 2));
        const EmbeddingLoss loss = instance_contrastive_loss(batch, 0.5);
        CHECK(loss.value ==
              doctest::Approx(naive_contrastive(batch.z, 0.5, instance_positives(b)))
                  .epsilon(1e-10));
        CHECK(loss.value >= 0.0);
    }
}

TEST_CASE("subgraph loss is zero when nothing is selected") {
    std::mt19937_64 rng(59);
    const Matrix raw = random_matrix(6, 3, rng);
    const Batch b = make_batch(raw, {0, 1, 0, 0, 1, 0}, std::vector<char>(6, 0),
                               Matrix::Zero(3, 2));
    const EmbeddingLoss loss = subgraph_contrastive_loss(b, 1.0);
    CHECK(loss.value == 0.0);
    CHECK(loss.grad_z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two clean same-class samples with orthogonal context") {
    // Anchors share a class and an embedding; every other dot is zero, so
    // the p = anchor term is -log(e/(e+2)) per the hand computation.
    Matrix z(4, 3);
    z << 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1;
    Batch b;
    b.z = z;
    b.pseudo_labels = {0, 0, 1, 1};  // views carry a different class
    b.g = {1, 1, 0, 0};
    b.logits = Matrix::Zero(2, 2);
    const EmbeddingLoss loss = subgraph_contrastive_loss(b, 1.0);
    const double e = std::exp(1.0);
    // Each anchor has the single positive p = the other anchor.
    CHECK(loss.value == doctest::Approx(2.0 * -std::log(e / (e + 2.0))).epsilon(1e-12));
}

TEST_CASE("subgraph loss matches the naive scalar recomputation") {
    std::mt19937_64 rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        const int b = 2 + static_cast<int>(rng() % 5);
        const Matrix raw = random_matrix(2 * b, 4, rng);
        std::vector<int> labels(2 * b);
        std::vector<char> g(2 * b);
        for (int i = 0; i < b; ++i) {
            labels[i] = labels[b + i] = static_cast<int>(rng() % 2);
            g[i] = g[b + i] = rng() % 2 ? 1 : 0;
        }
        const Batch batch = make_batch(raw, labels, g, Matrix::Zero(b, 2));
        const EmbeddingLoss loss = subgraph_contrastive_loss(batch, 1.3);
        CHECK(loss.value ==
              doctest::Approx(naive_contrastive(batch.z, 1.3, subgraph_positives(batch)))
                  .epsilon(1e-10));
        CHECK(loss.value >= 0.0);
    }
}

TEST_CASE("cross entropy basics") {
    SUBCASE("uniform logits cost ln K") {
        const Matrix logits = Matrix::Zero(3, 4);
        const LogitLoss loss = cross_entropy_loss(logits, {0, 1, 2}, {1, 1, 1});
        CHECK(loss.value == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    }
    SUBCASE("nothing selected costs nothing") {
        const Matrix logits = Matrix::Random(3, 4);
        const LogitLoss loss = cross_entropy_loss(logits, {0, 1, 2}, {0, 0, 0});
        CHECK(loss.value == 0.0);
        CHECK(loss.grad_logits.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("large-margin correct logits cost almost nothing") {
        Matrix logits = Matrix::Zero(2, 3);
        logits(0, 1) = 50.0;
        logits(1, 2) = 50.0;
        const LogitLoss loss = cross_entropy_loss(logits, {1, 2}, {1, 1});
        CHECK(loss.value < 1e-12);
    }
}

TEST_CASE("analytic gradients match central finite differences") {
    std::mt19937_64 rng(67);
    const double tol = 1e-4;
    for (int trial = 0; trial < 12; ++trial) {
        const int b = 2 + static_cast<int>(rng() % 3);
        const int dim = 2 + static_cast<int>(rng() % 4);
        const Matrix raw = random_matrix(2 * b, dim, rng);
        std::vector<int> labels(2 * b);
        std::vector<char> g(2 * b);
        for (int i = 0; i < b; ++i) {
            labels[i] = labels[b + i] = static_cast<int>(rng() % 3);
            g[i] = g[b + i] = rng() % 3 ? 1 : 0;
        }

        const Batch batch = make_batch(raw, labels, g, Matrix::Zero(b, 3));

        const EmbeddingLoss inst = instance_contrastive_loss(batch, 0.4);
        const double inst_err = max_relative_grad_error(
            raw,
            [&](const Matrix& r) {
                Batch probe = batch;
                probe.z = normalize_rows(r).values;
                return instance_contrastive_loss(probe, 0.4).value;
            },
            grad_through_normalization(raw, inst));
        CHECK(inst_err < tol);

        const EmbeddingLoss sub = subgraph_contrastive_loss(batch, 1.1);
        const double sub_err = max_relative_grad_error(
            raw,
            [&](const Matrix& r) {
                Batch probe = batch;
                probe.z = normalize_rows(r).values;
                return subgraph_contrastive_loss(probe, 1.1).value;
            },
            grad_through_normalization(raw, sub));
        CHECK(sub_err < tol);

        const Matrix logits = random_matrix(b, 3, rng);
        const std::vector<int> anchor_labels(labels.begin(), labels.begin() + b);
        const std::vector<char> anchor_g(g.begin(), g.begin() + b);
        const LogitLoss ce = cross_entropy_loss(logits, anchor_labels, anchor_g);
        const double ce_err = max_relative_grad_error(
            logits,
            [&](const Matrix& l) {
                return cross_entropy_loss(l, anchor_labels, anchor_g).value;
            },
            ce.grad_logits);
        CHECK(ce_err < tol);
    }
}

TEST_CASE("contrastive losses are rotation invariant") {
    std::mt19937_64 rng(71);
    const int b = 4, dim = 5;
    const Matrix raw = random_matrix(2 * b, dim, rng);
    const std::vector<int> labels(2 * b, 0);
    const std::vector<char> g(2 * b, 1);
    const Batch batch = make_batch(raw, labels, g, Matrix::Zero(b, 2));

    // Orthogonalize a random square matrix by QR.
    const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(dim, dim, rng)).householderQ();
    Batch rotated = batch;
    rotated.z = batch.z * q;

    CHECK(instance_contrastive_loss(rotated, 0.5).value ==
          doctest::Approx(instance_contrastive_loss(batch, 0.5).value).epsilon(1e-10));
    CHECK(subgraph_contrastive_loss(rotated, 1.0).value ==
          doctest::Approx(subgraph_contrastive_loss(batch, 1.0).value).epsilon(1e-10));
}

TEST_CASE("total loss composes the three terms") {
    std::mt19937_64 rng(73);
    const int b = 3;
    const Matrix raw = random_matrix(2 * b, 4, rng);
    std::vector<int> labels{0, 1, 2, 0, 1, 2};
    std::vector<char> g{1, 1, 0, 1, 1, 0};
    Batch batch = make_batch(raw, labels, g, random_matrix(b, 3, rng));

    LossParams params;
    params.tau1 = 0.4;
    params.tau2 = 1.2;

    const std::vector<int> anchor_labels(labels.begin(), labels.begin() + b);
    const std::vector<char> anchor_g(g.begin(), g.begin() + b);
    const double ce = cross_entropy_loss(batch.logits, anchor_labels, anchor_g).value;
    const double inst = instance_contrastive_loss(batch, params.tau1).value;
    const double sub = subgraph_contrastive_loss(batch, params.tau2).value;

    params.lambda1 = 0.0;
    params.lambda2 = 0.0;
    CHECK(total_loss(batch, params) == doctest::Approx(ce).epsilon(1e-12));
    params.lambda1 = 1.0;
    params.lambda2 = 1.0;
    CHECK(total_loss(batch, params) == doctest::Approx(ce + inst + sub).epsilon(1e-12));
    params.lambda1 = 0.5;
    params.lambda2 = 2.0;
    CHECK(total_loss(batch, params) ==
          doctest::Approx(ce + 0.5 * inst + 2.0 * sub).epsilon(1e-12));
}

TEST_CASE("loss params reject nonpositive temperatures") {
    LossParams params;
    params.tau1 = 0.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.tau1 = 0.3;
    params.tau2 = -1.0;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
