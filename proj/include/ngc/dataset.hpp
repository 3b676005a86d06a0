#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace ngc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

constexpr int kOodLabel = -1;

enum class Split { Train, Test };

/// Embedding dataset with given (possibly corrupted) labels and optional
/// ground truth. `truth[i]` is the true class in [0,K) or kOodLabel.
struct Dataset {
    Matrix embeddings;              // N x D
    std::vector<int> given_labels;  // length N, values in [0,K)
    int num_classes = 0;
    std::vector<int> truth;         // empty when ground truth is unknown
    Split split = Split::Train;

    Eigen::Index size() const { return embeddings.rows(); }
    Eigen::Index dim() const { return embeddings.cols(); }
    bool has_truth() const { return !truth.empty(); }

    // Sample categories (require truth).
    bool is_ood(int i) const { return truth[i] == kOodLabel; }
    bool is_mislabeled(int i) const { return truth[i] != given_labels[i]; }

    void validate() const;  // throws std::invalid_argument on broken invariants
};

struct SyntheticConfig {
    int num_classes = 2;
    int dim = 2;
    int samples_per_class = 0;
    double class_center_separation = 4.0;
    double cluster_stddev = 1.0;
    int num_ood = 0;
    double ood_center_offset = 6.0;
    double sym_noise_level = 0.0;
    double asym_noise_level = 0.0;
    std::vector<int> asym_mapping;  // empty = cyclic shift y -> (y+1) mod K
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// K Gaussian clusters plus optional off-support clusters carrying random
/// given labels. Pure function of the config.
Dataset generate_synthetic(const SyntheticConfig& config);

/// Resamples floor(level*M) distinct labels uniformly over all K classes
/// (the original label may be drawn again).
void inject_symmetric_noise(std::vector<int>& labels, double level, int num_classes,
                            std::mt19937_64& rng);

/// Replaces floor(level*M) distinct labels y by mapping[y].
void inject_asymmetric_noise(std::vector<int>& labels, double level,
                             const std::vector<int>& mapping, std::mt19937_64& rng);

std::vector<int> cyclic_shift_mapping(int num_classes);

Dataset load_dataset(const std::string& path, int num_classes);
void save_dataset(const Dataset& dataset, const std::string& path);

struct NormalizedRows {
    Matrix values;
    std::vector<char> was_zero;  // per-row flag, zero rows are left untouched

    bool any_zero() const;
};

NormalizedRows normalize_rows(const Matrix& m);

}  // namespace ngc
