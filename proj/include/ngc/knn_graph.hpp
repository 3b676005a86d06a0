#pragma once

#include <ostream>
#include <vector>

#include "ngc/dataset.hpp"

namespace ngc {

struct Edge {
    int i;  // i < j
    int j;
    double weight;  // > 0

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph stored as an edge list sorted by (i, j),
/// plus a per-node degree cache d_i = sum_j w_ij.
class SparseGraph {
public:
    SparseGraph() = default;
    SparseGraph(int num_nodes, std::vector<Edge> edges);

    int num_nodes() const { return num_nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<double>& degrees() const { return degrees_; }
    bool is_isolated(int node) const { return degrees_[node] == 0.0; }

    /// Edge-list dump `i j w`, one edge per line, sorted by (i, j).
    void dump(std::ostream& out) const;

private:
    int num_nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> degrees_;
};

enum class Symmetrization { Max, Mean };

struct GraphParams {
    int k = 10;
    double gamma = 1.0;
    Symmetrization symmetrization = Symmetrization::Max;
};

/// Per-row lists of the k indices i != j maximizing z_i . z_j, in
/// descending-similarity order; ties go to the smaller index.
std::vector<std::vector<int>> knn_indices(const Matrix& z, int k);

/// Directed weights w_ij = max(z_i . z_j, 0)^gamma for i in NN_k(j),
/// symmetrized into an undirected graph. Zero-weight edges are dropped.
SparseGraph build_knn_graph(const Matrix& z, const GraphParams& params);

/// Keeps exactly the edges whose both endpoints have keep != 0. Node count
/// is unchanged; dropped nodes become isolated.
SparseGraph refine_graph(const SparseGraph& graph, const std::vector<char>& keep);

}  // namespace ngc
