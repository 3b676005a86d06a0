#include "doctest.h"

#include <random>

#include "ngc/model.hpp"

using namespace ngc;

TEST_CASE("forward with identity maps returns the input as z") {
    ToyModel model;
    model.encoder = Matrix::Identity(3, 3);
    model.classifier = Matrix::Identity(3, 3);
    model.projector = Matrix::Identity(3, 3);
    Matrix x(2, 3);
    x << 1, 0, 0, 0, 0, 1;  // unit rows
    const ForwardResult r = forward(model, x);
    CHECK(r.z == x);
    CHECK(r.logits == x);
}

TEST_CASE("zero weights give uniform softmax") {
    ToyModel model;
    model.encoder = Matrix::Zero(4, 5);
    model.classifier = Matrix::Zero(5, 3);
    model.projector = Matrix::Zero(5, 2);
    const ForwardResult r = forward(model, Matrix::Random(6, 4));
    const Matrix probs = softmax_rows(r.logits);
    CHECK((probs.array() - 1.0 / 3.0).abs().maxCoeff() < 1e-15);
    // projector output is all zero and flagged
    CHECK(r.zero_rows == std::vector<char>(6, 1));
}

TEST_CASE("rows pass through forward independently") {
    std::mt19937_64 rng(7);
    const ToyModel model = ToyModel::random_init(4, 6, 3, 2, rng);
    const Matrix x = Matrix::Random(5, 4);
    const ForwardResult full = forward(model, x);
    for (int i = 0; i < 5; ++i) {
        const ForwardResult one = forward(model, x.row(i));
        CHECK(one.logits == full.logits.row(i));
        CHECK(one.z == full.z.row(i));
    }
}

TEST_CASE("forward rejects mismatched input dimension") {
    std::mt19937_64 rng(7);
    const ToyModel model = ToyModel::random_init(4, 6, 3, 2, rng);
    CHECK_THROWS_AS(forward(model, Matrix::Random(2, 5)), std::invalid_argument);
}

TEST_CASE("augment_embedding") {
    const Matrix x = Matrix::Random(8, 5);

    SUBCASE("zero sigma is the identity") {
        std::mt19937_64 rng(1);
        CHECK(augment_embedding(x, 0.0, rng) == x);
    }
    SUBCASE("same seed gives the same jitter") {
        std::mt19937_64 a(42), b(42);
        CHECK(augment_embedding(x, 0.3, a) == augment_embedding(x, 0.3, b));
    }
    SUBCASE("negative sigma throws") {
        std::mt19937_64 rng(1);
        CHECK_THROWS_AS(augment_embedding(x, -0.1, rng), std::invalid_argument);
    }
    SUBCASE("mean squared displacement approaches D sigma^2") {
        // Monte-Carlo estimate over many draws of a single row.
        const int d = 10, draws = 4000;
        const double sigma = 0.5;
        const Matrix row = Matrix::Zero(1, d);
        std::mt19937_64 rng(9);
        double total = 0.0;
        for (int t = 0; t < draws; ++t)
            total += augment_embedding(row, sigma, rng).squaredNorm();
        const double expected = d * sigma * sigma;
        CHECK(std::abs(total / draws - expected) < 0.1 * expected);
    }
}

TEST_CASE("random init is deterministic in the rng stream") {
    std::mt19937_64 a(5), b(5);
    const ToyModel m1 = ToyModel::random_init(4, 8, 3, 2, a);
    const ToyModel m2 = ToyModel::random_init(4, 8, 3, 2, b);
    CHECK(m1.encoder == m2.encoder);
    CHECK(m1.classifier == m2.classifier);
    CHECK(m1.projector == m2.projector);
}
