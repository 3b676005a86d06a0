#include "ngc/ood.hpp"

#include <algorithm>
#include <stdexcept>

namespace ngc {

Prototypes compute_prototypes(const Matrix& z, const std::vector<int>& pseudo_labels,
                              const std::vector<char>& g, int num_classes) {
    if (static_cast<Eigen::Index>(pseudo_labels.size()) != z.rows() ||
        static_cast<Eigen::Index>(g.size()) != z.rows())
        throw std::invalid_argument("prototypes: label length mismatch");

    Prototypes p;
    p.vectors = Matrix::Zero(num_classes, z.cols());
    p.support.assign(num_classes, 0);
    p.valid.assign(num_classes, 0);
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        if (!g[i]) continue;
        p.vectors.row(pseudo_labels[i]) += z.row(i);
        ++p.support[pseudo_labels[i]];
    }
    bool any_valid = false;
    for (int k = 0; k < num_classes; ++k) {
        if (p.support[k] == 0) continue;
        const double norm = p.vectors.row(k).norm() / p.support[k];
        if (norm == 0.0) continue;  // selected embeddings cancelled out
        p.vectors.row(k) /= p.vectors.row(k).norm();
        p.valid[k] = 1;
        any_valid = true;
    }
    if (!any_valid) throw std::invalid_argument("prototypes: no class has selected samples");
    return p;
}

double ood_score(const Eigen::RowVectorXd& z, const Prototypes& prototypes) {
    if (std::none_of(prototypes.valid.begin(), prototypes.valid.end(),
                     [](char v) { return v != 0; }))
        throw std::invalid_argument("ood_score: no valid prototypes");
    const double z_norm = z.norm();
    if (z_norm == 0.0) return 0.0;
    double best = -1.0;
    for (int k = 0; k < prototypes.num_classes(); ++k) {
        if (!prototypes.valid[k]) continue;
        best = std::max(best, z.dot(prototypes.vectors.row(k)) / z_norm);
    }
    return best;
}

DetectionDecision classify_or_reject(const Eigen::RowVectorXd& x, const ToyModel& model,
                                     const Prototypes& prototypes, double zeta) {
    if (zeta < -1.0 || zeta > 1.0)
        throw std::invalid_argument("classify_or_reject: zeta must be in [-1,1]");
    const ForwardResult fwd = forward(model, x);

    DetectionDecision d;
    d.zeta = zeta;
    d.score = ood_score(fwd.z.row(0), prototypes);
    d.is_ood = d.score < zeta;
    Eigen::Index best = 0;
    fwd.logits.row(0).maxCoeff(&best);
    d.predicted_class = static_cast<int>(best);
    return d;
}

}  // namespace ngc
