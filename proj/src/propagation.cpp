#include "ngc/propagation.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace ngc {

TemporalEnsemble::TemporalEnsemble(Eigen::Index num_samples, int num_classes, double momentum)
    : ema_(Matrix::Zero(num_samples, num_classes)), momentum_(momentum) {
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("temporal ensemble: momentum must be in [0,1)");
}

void TemporalEnsemble::update(const Matrix& predictions) {
    if (predictions.rows() != ema_.rows() || predictions.cols() != ema_.cols())
        throw std::invalid_argument("temporal ensemble: prediction shape mismatch");
    ema_ = momentum_ * ema_ + (1.0 - momentum_) * predictions;
    ++step_;
}

Matrix TemporalEnsemble::predictions() const {
    if (step_ == 0)
        return Matrix::Constant(ema_.rows(), ema_.cols(), 1.0 / static_cast<double>(ema_.cols()));
    const double correction = 1.0 - std::pow(momentum_, step_);
    return ema_ / correction;
}

Matrix init_label_matrix(const std::vector<int>& labels, const std::vector<char>& clean,
                         const TemporalEnsemble& te) {
    Matrix y = te.predictions();
    const Eigen::Index n = y.rows();
    if (static_cast<Eigen::Index>(clean.size()) != n ||
        static_cast<Eigen::Index>(labels.size()) != n)
        throw std::invalid_argument("init_label_matrix: length mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!clean[i]) continue;
        if (labels[i] < 0 || labels[i] >= y.cols())
            throw std::invalid_argument("init_label_matrix: label out of range");
        y.row(i).setZero();
        y(i, labels[i]) = 1.0;
    }
    return y;
}

namespace {

// Applies x -> (I - alpha*S) x with S in normalized-edge form.
struct SystemOperator {
    int n;
    double alpha;
    const std::vector<Edge>* edges;
    std::vector<double> norm_weight;  // w_ij / sqrt(d_i d_j) per edge

    SystemOperator(const SparseGraph& graph, double a)
        : n(graph.num_nodes()), alpha(a), edges(&graph.edges()) {
        norm_weight.reserve(edges->size());
        const std::vector<double>& deg = graph.degrees();
        for (const Edge& e : *edges)
            norm_weight.push_back(e.weight / std::sqrt(deg[e.i] * deg[e.j]));
    }

    void apply(const Vector& x, Vector& out) const {
        out = x;
        for (std::size_t idx = 0; idx < edges->size(); ++idx) {
            const Edge& e = (*edges)[idx];
            const double w = alpha * norm_weight[idx];
            out[e.i] -= w * x[e.j];
            out[e.j] -= w * x[e.i];
        }
    }
};

struct CgColumnResult {
    int iterations;
    double residual;
    std::vector<double> energy;
};

CgColumnResult conjugate_gradient(const SystemOperator& op, const Vector& b, Vector& x,
                                  double tolerance, int max_iters) {
    x.setZero();
    Vector r = b;
    Vector p = r;
    Vector ap(b.size());
    double rs = r.squaredNorm();

    CgColumnResult result{0, std::sqrt(rs), {0.0}};
    double energy = 0.0;  // objective at x = 0
    for (int it = 0; it < max_iters && result.residual > tolerance; ++it) {
        op.apply(p, ap);
        const double p_ap = p.dot(ap);
        if (p_ap <= 0.0)
            throw std::runtime_error("conjugate gradient: operator not positive definite");
        const double step = rs / p_ap;
        x += step * p;
        r -= step * ap;
        energy -= 0.5 * step * rs;
        result.energy.push_back(energy);
        const double rs_next = r.squaredNorm();
        p = r + (rs_next / rs) * p;
        rs = rs_next;
        result.residual = std::sqrt(rs);
        result.iterations = it + 1;
    }
    return result;
}

}  // namespace

SoftLabelMatrix propagate(const SparseGraph& graph, const Matrix& y,
                          const PropagationParams& params, PropagationStats* stats) {
    if (graph.num_nodes() != y.rows())
        throw std::invalid_argument("propagate: graph and label matrix disagree on N");
    if (!(params.alpha > 0.0 && params.alpha < 1.0))
        throw std::invalid_argument("propagate: alpha must be in (0,1)");

    const SystemOperator op(graph, params.alpha);
    SoftLabelMatrix result;
    result.values.resize(y.rows(), y.cols());
    result.normalized = false;

    if (stats) *stats = PropagationStats{};
    Vector x(y.rows());
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
        const Vector b = (1.0 - params.alpha) * y.col(c);
        CgColumnResult col =
            conjugate_gradient(op, b, x, params.cg_tolerance, params.cg_max_iters);
        if (col.residual > params.cg_tolerance)
            throw std::runtime_error("propagate: conjugate gradient did not converge in " +
                                     std::to_string(params.cg_max_iters) +
                                     " iterations (residual " + std::to_string(col.residual) +
                                     " for class " + std::to_string(c) + ")");
        result.values.col(c) = x;
        if (stats) {
            stats->max_iterations = std::max(stats->max_iterations, col.iterations);
            stats->max_residual = std::max(stats->max_residual, col.residual);
            stats->energy.push_back(std::move(col.energy));
        }
    }
    return result;
}

SoftLabelMatrix normalize_soft_labels(const SoftLabelMatrix& y) {
    SoftLabelMatrix out;
    out.values = y.values.cwiseMax(0.0);
    out.normalized = true;
    out.degenerate_rows.assign(y.values.rows(), 0);
    const double uniform = 1.0 / static_cast<double>(y.values.cols());
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        const double sum = out.values.row(i).sum();
        if (sum > 0.0) {
            out.values.row(i) /= sum;
        } else {
            out.values.row(i).setConstant(uniform);
            out.degenerate_rows[i] = 1;
        }
    }
    return out;
}

void dump_soft_labels(const SoftLabelMatrix& y, std::ostream& out) {
    out << "id";
    for (Eigen::Index k = 0; k < y.values.cols(); ++k) out << ",score_" << k;
    out << "\n";
    char buf[32];
    for (Eigen::Index i = 0; i < y.values.rows(); ++i) {
        out << i;
        for (Eigen::Index k = 0; k < y.values.cols(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", y.values(i, k));
            out << ',' << buf;
        }
        out << "\n";
    }
}

std::vector<int> hard_pseudo_labels(const SoftLabelMatrix& y) {
    std::vector<int> labels(y.values.rows());
    for (Eigen::Index i = 0; i < y.values.rows(); ++i) {
        int best = 0;
        for (Eigen::Index k = 1; k < y.values.cols(); ++k)
            if (y.values(i, k) > y.values(i, best)) best = static_cast<int>(k);
        labels[i] = best;
    }
    return labels;
}

}  // namespace ngc
