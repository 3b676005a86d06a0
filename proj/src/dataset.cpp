#include "ngc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ngc {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

long parse_int(const std::string& s, const std::string& what, int line_no) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
    return value;
}

double parse_double(const std::string& s, int line_no) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail("line " + std::to_string(line_no) + ": bad float '" + s + "'");
    if (!std::isfinite(value))
        fail("line " + std::to_string(line_no) + ": non-finite feature value");
    return value;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void Dataset::validate() const {
    if (size() < 1) fail("dataset: empty dataset");
    if (dim() < 1) fail("dataset: dimension must be >= 1");
    if (num_classes < 2) fail("dataset: num_classes must be >= 2");
    if (static_cast<Eigen::Index>(given_labels.size()) != size())
        fail("dataset: label count does not match sample count");
    for (int y : given_labels)
        if (y < 0 || y >= num_classes) fail("dataset: given label out of range");
    if (!truth.empty()) {
        if (static_cast<Eigen::Index>(truth.size()) != size())
            fail("dataset: truth length does not match sample count");
        for (int y : truth)
            if (y != kOodLabel && (y < 0 || y >= num_classes))
                fail("dataset: true label out of range");
    }
    if (!embeddings.allFinite()) fail("dataset: non-finite embedding");
}

void SyntheticConfig::validate() const {
    if (num_classes < 2) fail("synthetic: num_classes must be >= 2");
    if (dim < 1) fail("synthetic: dim must be >= 1");
    if (samples_per_class < 0 || num_ood < 0) fail("synthetic: counts must be >= 0");
    if (!(cluster_stddev > 0)) fail("synthetic: cluster_stddev must be > 0");
    if (!std::isfinite(class_center_separation) || !std::isfinite(cluster_stddev) ||
        !std::isfinite(ood_center_offset))
        fail("synthetic: non-finite parameter");
    if (sym_noise_level < 0 || sym_noise_level > 1 || asym_noise_level < 0 ||
        asym_noise_level > 1)
        fail("synthetic: noise level outside [0,1]");
    if (sym_noise_level > 0 && asym_noise_level > 0)
        fail("synthetic: at most one of sym/asym noise level may be > 0");
    if (!asym_mapping.empty()) {
        if (static_cast<int>(asym_mapping.size()) != num_classes)
            fail("synthetic: asym_mapping must have num_classes entries");
        for (int t : asym_mapping)
            if (t < 0 || t >= num_classes) fail("synthetic: asym_mapping target out of range");
    }
}

namespace {

// Cluster centers sit on the coordinate axes at growing radii, so any two
// centers are at least `scale` apart. IND classes use the positive axes,
// off-support clusters the negative ones.
Vector lattice_center(int index, int dim, double scale, double sign) {
    Vector c = Vector::Zero(dim);
    c[index % dim] = sign * scale * (index / dim + 1);
    return c;
}

}  // namespace

Dataset generate_synthetic(const SyntheticConfig& config) {
    config.validate();
    const int K = config.num_classes;
    const int D = config.dim;
    const Eigen::Index n_ind = static_cast<Eigen::Index>(K) * config.samples_per_class;
    const Eigen::Index n = n_ind + config.num_ood;
    if (n == 0) fail("synthetic: empty dataset");

    std::mt19937_64 rng(config.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Dataset ds;
    ds.embeddings.resize(n, D);
    ds.given_labels.resize(n);
    ds.truth.resize(n);
    ds.num_classes = K;

    Eigen::Index row = 0;
    for (int k = 0; k < K; ++k) {
        const Vector center = lattice_center(k, D, config.class_center_separation, 1.0);
        for (int s = 0; s < config.samples_per_class; ++s, ++row) {
            for (int d = 0; d < D; ++d)
                ds.embeddings(row, d) = center[d] + config.cluster_stddev * gauss(rng);
            ds.truth[row] = k;
            ds.given_labels[row] = k;
        }
    }

    // Off-support samples come from K extra clusters whose axes continue
    // past the class axes, so they overlap no class direction when D > K.
    const int ood_clusters = std::max(1, std::min(config.num_ood, K));
    const int ood_cluster_size = (config.num_ood + ood_clusters - 1) / ood_clusters;
    std::uniform_int_distribution<int> random_label(0, K - 1);
    for (int j = 0; j < config.num_ood; ++j, ++row) {
        const Vector center =
            lattice_center(K + j / ood_cluster_size, D, config.ood_center_offset, -1.0);
        for (int d = 0; d < D; ++d)
            ds.embeddings(row, d) = center[d] + config.cluster_stddev * gauss(rng);
        ds.truth[row] = kOodLabel;
        ds.given_labels[row] = random_label(rng);
    }

    if (n_ind > 0) {
        std::vector<int> ind_labels(ds.given_labels.begin(), ds.given_labels.begin() + n_ind);
        if (config.sym_noise_level > 0) {
            inject_symmetric_noise(ind_labels, config.sym_noise_level, K, rng);
        } else if (config.asym_noise_level > 0) {
            const std::vector<int> mapping =
                config.asym_mapping.empty() ? cyclic_shift_mapping(K) : config.asym_mapping;
            inject_asymmetric_noise(ind_labels, config.asym_noise_level, mapping, rng);
        }
        std::copy(ind_labels.begin(), ind_labels.end(), ds.given_labels.begin());
    }

    ds.validate();
    return ds;
}

namespace {

// Draws floor(level*M) distinct indices by a partial Fisher-Yates pass.
std::vector<std::size_t> pick_indices(std::size_t m, double level, std::mt19937_64& rng) {
    if (level < 0.0 || level > 1.0) fail("noise level outside [0,1]");
    const std::size_t count = static_cast<std::size_t>(level * static_cast<double>(m));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    order.resize(count);
    return order;
}

}  // namespace

void inject_symmetric_noise(std::vector<int>& labels, double level, int num_classes,
                            std::mt19937_64& rng) {
    if (num_classes < 1) fail("inject_symmetric_noise: num_classes must be >= 1");
    std::uniform_int_distribution<int> resample(0, num_classes - 1);
    for (std::size_t i : pick_indices(labels.size(), level, rng)) labels[i] = resample(rng);
}

void inject_asymmetric_noise(std::vector<int>& labels, double level,
                             const std::vector<int>& mapping, std::mt19937_64& rng) {
    const int K = static_cast<int>(mapping.size());
    for (int t : mapping)
        if (t < 0 || t >= K) fail("inject_asymmetric_noise: mapping target out of range");
    for (std::size_t i : pick_indices(labels.size(), level, rng)) {
        if (labels[i] < 0 || labels[i] >= K)
            fail("inject_asymmetric_noise: label out of mapping range");
        labels[i] = mapping[labels[i]];
    }
}

std::vector<int> cyclic_shift_mapping(int num_classes) {
    std::vector<int> mapping(num_classes);
    for (int k = 0; k < num_classes; ++k) mapping[k] = (k + 1) % num_classes;
    return mapping;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
    dataset.validate();
    std::ofstream out(path);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << "id,given_label,true_label";
    for (Eigen::Index d = 0; d < dataset.dim(); ++d) out << ",feat_" << d;
    out << "\n";
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        out << i << ',' << dataset.given_labels[i] << ',';
        if (dataset.has_truth()) out << dataset.truth[i];
        for (Eigen::Index d = 0; d < dataset.dim(); ++d)
            out << ',' << format_double(dataset.embeddings(i, d));
        out << "\n";
    }
    if (!out) fail("write failed for '" + path + "'");
}

Dataset load_dataset(const std::string& path, int num_classes) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) fail(path + ": missing header");

    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 4 || header[0] != "id" || header[1] != "given_label" ||
        header[2] != "true_label")
        fail(path + ": malformed header");
    const int D = static_cast<int>(header.size()) - 3;
    for (int d = 0; d < D; ++d)
        if (header[3 + d] != "feat_" + std::to_string(d)) fail(path + ": malformed header");

    struct Row {
        long id;
        int given;
        bool has_truth;
        int truth;
        std::vector<double> feats;
    };
    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != header.size())
            fail(path + ": line " + std::to_string(line_no) + ": expected " +
                 std::to_string(header.size()) + " fields, got " + std::to_string(f.size()));
        Row row;
        row.id = parse_int(f[0], "id", line_no);
        row.given = static_cast<int>(parse_int(f[1], "given_label", line_no));
        if (row.given < 0 || row.given >= num_classes)
            fail(path + ": line " + std::to_string(line_no) + ": given_label " +
                 std::to_string(row.given) + " out of range [0," + std::to_string(num_classes) +
                 ")");
        row.has_truth = !f[2].empty();
        row.truth = 0;
        if (row.has_truth) {
            row.truth = static_cast<int>(parse_int(f[2], "true_label", line_no));
            if (row.truth != kOodLabel && (row.truth < 0 || row.truth >= num_classes))
                fail(path + ": line " + std::to_string(line_no) + ": true_label " +
                     std::to_string(row.truth) + " out of range");
        }
        row.feats.resize(D);
        for (int d = 0; d < D; ++d) row.feats[d] = parse_double(f[3 + d], line_no);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) fail(path + ": empty dataset");

    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const bool with_truth = rows.front().has_truth;
    Dataset ds;
    ds.embeddings.resize(n, D);
    ds.given_labels.resize(n);
    ds.num_classes = num_classes;
    if (with_truth) ds.truth.resize(n);

    std::vector<char> seen(n, 0);
    for (const Row& row : rows) {
        if (row.id < 0 || row.id >= n || seen[row.id])
            fail(path + ": ids must be a permutation of 0.." + std::to_string(n - 1));
        seen[row.id] = 1;
        if (row.has_truth != with_truth)
            fail(path + ": true_label must be present for all rows or none");
        ds.given_labels[row.id] = row.given;
        if (with_truth) ds.truth[row.id] = row.truth;
        for (int d = 0; d < D; ++d) ds.embeddings(row.id, d) = row.feats[d];
    }
    ds.validate();
    return ds;
}

bool NormalizedRows::any_zero() const {
    return std::any_of(was_zero.begin(), was_zero.end(), [](char f) { return f != 0; });
}

NormalizedRows normalize_rows(const Matrix& m) {
    NormalizedRows result;
    result.values = m;
    result.was_zero.assign(m.rows(), 0);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double norm = m.row(i).norm();
        if (norm == 0.0)
            result.was_zero[i] = 1;
        else
            result.values.row(i) /= norm;
    }
    return result;
}

}  // namespace ngc
