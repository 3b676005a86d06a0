#include "ngc/model_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ngc {

namespace {

constexpr char kMagic[4] = {'N', 'G', 'C', 'M'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

void write_matrix(std::ofstream& out, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

Matrix read_matrix(std::ifstream& in, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = 0;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            m(i, j) = v;
        }
    return m;
}

}  // namespace

void save_model(const ModelArtifacts& artifacts, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    const ToyModel& m = artifacts.model;
    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(m.input_dim()));
    write_u32(out, static_cast<std::uint32_t>(m.hidden_dim()));
    write_u32(out, static_cast<std::uint32_t>(m.num_classes()));
    write_u32(out, static_cast<std::uint32_t>(m.proj_dim()));
    write_matrix(out, m.encoder);
    write_matrix(out, m.classifier);
    write_matrix(out, m.projector);

    write_u32(out, artifacts.prototypes ? 1 : 0);
    if (artifacts.prototypes) {
        const Prototypes& p = *artifacts.prototypes;
        write_matrix(out, p.vectors);
        for (int k = 0; k < p.num_classes(); ++k)
            write_u32(out, static_cast<std::uint32_t>(p.support[k]));
        for (int k = 0; k < p.num_classes(); ++k) out.put(p.valid[k] ? 1 : 0);
    }
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

ModelArtifacts load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
    char magic[4];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::invalid_argument(path + ": not a model file");
    if (read_u32(in) != kVersion)
        throw std::invalid_argument(path + ": unsupported model file version");

    const std::uint32_t d = read_u32(in);
    const std::uint32_t h = read_u32(in);
    const std::uint32_t k = read_u32(in);
    const std::uint32_t p = read_u32(in);

    ModelArtifacts artifacts;
    artifacts.model.encoder = read_matrix(in, d, h);
    artifacts.model.classifier = read_matrix(in, h, k);
    artifacts.model.projector = read_matrix(in, h, p);

    if (read_u32(in) != 0) {
        Prototypes protos;
        protos.vectors = read_matrix(in, k, p);
        protos.support.resize(k);
        protos.valid.resize(k);
        for (std::uint32_t c = 0; c < k; ++c) protos.support[c] = static_cast<int>(read_u32(in));
        for (std::uint32_t c = 0; c < k; ++c) protos.valid[c] = in.get() == 1;
        artifacts.prototypes = std::move(protos);
    }
    if (!in) throw std::invalid_argument(path + ": truncated model file");
    return artifacts;
}

}  // namespace ngc
