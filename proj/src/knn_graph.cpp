#include "ngc/knn_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ngc {

SparseGraph::SparseGraph(int num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)), degrees_(num_nodes, 0.0) {
    for (Edge& e : edges_)
        if (e.i > e.j) std::swap(e.i, e.j);
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    for (const Edge& e : edges_) {
        if (e.i < 0 || e.j >= num_nodes_ || e.i == e.j)
            throw std::invalid_argument("graph: bad edge endpoints");
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("graph: edge weight must be positive and finite");
        degrees_[e.i] += e.weight;
        degrees_[e.j] += e.weight;
    }
}

void SparseGraph::dump(std::ostream& out) const {
    char buf[32];
    for (const Edge& e : edges_) {
        std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
        out << e.i << ' ' << e.j << ' ' << buf << '\n';
    }
}

std::vector<std::vector<int>> knn_indices(const Matrix& z, int k) {
    const int n = static_cast<int>(z.rows());
    if (k < 1 || k >= n)
        throw std::invalid_argument("knn_indices: require 1 <= k < N, got k=" +
                                    std::to_string(k) + ", N=" + std::to_string(n));
    if (!z.allFinite()) throw std::invalid_argument("knn_indices: non-finite embeddings");

    std::vector<std::vector<int>> neighbors(n);
    std::vector<int> order(n);
    // Query columns in blocks so the dot products run as one matrix product
    // per block instead of n separate matrix-vector passes.
    constexpr int kBlock = 256;
    Matrix dots;
    for (int block = 0; block < n; block += kBlock) {
        const int width = std::min(kBlock, n - block);
        dots.noalias() = z * z.middleRows(block, width).transpose();
        for (int c = 0; c < width; ++c) {
            const int j = block + c;
            int m = 0;
            for (int i = 0; i < n; ++i)
                if (i != j) order[m++] = i;
            auto better = [&](int a, int b) {
                if (dots(a, c) != dots(b, c)) return dots(a, c) > dots(b, c);
                return a < b;
            };
            std::partial_sort(order.begin(), order.begin() + k, order.begin() + m, better);
            neighbors[j].assign(order.begin(), order.begin() + k);
        }
    }
    return neighbors;
}

SparseGraph build_knn_graph(const Matrix& z, const GraphParams& params) {
    const int n = static_cast<int>(z.rows());
    const std::vector<std::vector<int>> neighbors = knn_indices(z, params.k);

    // Directed entries as unordered pairs. The dot product is symmetric, so
    // a pair seen from both directions carries the same weight; pairs seen
    // once are halved under Mean symmetrization.
    std::vector<Edge> directed;
    directed.reserve(static_cast<std::size_t>(n) * params.k);
    for (int j = 0; j < n; ++j) {
        for (int i : neighbors[j]) {
            const double dot = z.row(i).dot(z.row(j));
            if (dot <= 0.0) continue;  // hinge
            const double w = std::pow(dot, params.gamma);
            if (w <= 0.0) continue;
            directed.push_back({std::min(i, j), std::max(i, j), w});
        }
    }
    std::sort(directed.begin(), directed.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });

    std::vector<Edge> edges;
    edges.reserve(directed.size());
    for (std::size_t idx = 0; idx < directed.size();) {
        Edge e = directed[idx];
        const bool both =
            idx + 1 < directed.size() && directed[idx + 1].i == e.i && directed[idx + 1].j == e.j;
        idx += both ? 2 : 1;
        if (params.symmetrization == Symmetrization::Mean && !both) e.weight *= 0.5;
        edges.push_back(e);
    }
    return SparseGraph(n, std::move(edges));
}

SparseGraph refine_graph(const SparseGraph& graph, const std::vector<char>& keep) {
    if (static_cast<int>(keep.size()) != graph.num_nodes())
        throw std::invalid_argument("refine_graph: indicator length mismatch");
    std::vector<Edge> kept;
    for (const Edge& e : graph.edges())
        if (keep[e.i] && keep[e.j]) kept.push_back(e);
    return SparseGraph(graph.num_nodes(), std::move(kept));
}

}  // namespace ngc
