#pragma once

#include <ostream>
#include <vector>

#include "ngc/dataset.hpp"
#include "ngc/knn_graph.hpp"

namespace ngc {

/// N x K per-class scores. Rows of a normalized matrix lie in [0,1] and sum
/// to 1; rows whose raw sum was 0 are set uniform and flagged.
struct SoftLabelMatrix {
    Matrix values;
    bool normalized = false;
    std::vector<char> degenerate_rows;
};

struct PropagationParams {
    double alpha = 0.5;  // in (0,1), keeps I - alpha*S positive definite
    double cg_tolerance = 1e-6;
    int cg_max_iters = 500;
};

/// Exponential moving average of row-stochastic model predictions with
/// bias correction by 1/(1 - momentum^step).
class TemporalEnsemble {
public:
    TemporalEnsemble(Eigen::Index num_samples, int num_classes, double momentum);

    void update(const Matrix& predictions);

    /// Bias-corrected estimate; uniform rows before the first update.
    Matrix predictions() const;

    int step() const { return step_; }
    double momentum() const { return momentum_; }

private:
    Matrix ema_;
    double momentum_;
    int step_ = 0;
};

/// Row i is one-hot(labels[i]) where clean[i] != 0, else the ensemble row.
/// Callers pass the clean set's current hard labels; for samples kept on the
/// given-label branch these coincide with the given labels.
Matrix init_label_matrix(const std::vector<int>& labels, const std::vector<char>& clean,
                         const TemporalEnsemble& te);

struct PropagationStats {
    int max_iterations = 0;
    double max_residual = 0.0;
    // Quadratic objective 0.5 x'Ax - b'x per CG step, one path per class
    // column. Nonincreasing by construction of the method.
    std::vector<std::vector<double>> energy;
};

/// Solves (I - alpha*S) Ytilde = (1 - alpha) Y column by column with
/// conjugate gradient, S = D^{-1/2} W D^{-1/2} and S-rows of isolated nodes
/// zero. Throws on non-convergence, reporting the final residual.
SoftLabelMatrix propagate(const SparseGraph& graph, const Matrix& y,
                          const PropagationParams& params, PropagationStats* stats = nullptr);

/// Clamps negatives to zero and scales every row to unit sum. A row summing
/// to zero becomes uniform and is flagged.
SoftLabelMatrix normalize_soft_labels(const SoftLabelMatrix& y);

/// Row-wise argmax; ties go to the smallest class index.
std::vector<int> hard_pseudo_labels(const SoftLabelMatrix& y);

/// Debugging dump, one CSV row of per-class scores per sample.
void dump_soft_labels(const SoftLabelMatrix& y, std::ostream& out);

}  // namespace ngc
