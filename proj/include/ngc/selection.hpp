#pragma once

#include <ostream>
#include <vector>

#include "ngc/knn_graph.hpp"
#include "ngc/propagation.hpp"

namespace ngc {

/// Union-find with path compression and union by rank.
class DisjointSet {
public:
    explicit DisjointSet(int n);

    int find(int x);
    bool unite(int a, int b);  // false when already joined

private:
    std::vector<int> parent_;
    std::vector<int> rank_;
};

struct SelectionState {
    std::vector<char> g;             // final clean indicators
    std::vector<int> pseudo_labels;  // argmax labels, given label where score > 1/K
    std::vector<int> clean_set;      // sorted union of the per-class components
    std::vector<std::vector<int>> per_class_lcc;

    static SelectionState none(Eigen::Index n, int num_classes);
    int selected_count() const;
};

struct ConfidenceSelection {
    std::vector<char> keep;
    std::vector<int> pseudo_labels;
};

/// keep_i = 1 when the given label's score exceeds 1/K (then the pseudo-label
/// is pinned to the given label), otherwise when the row max exceeds eta.
/// Both comparisons are strict.
ConfidenceSelection confidence_select(const SoftLabelMatrix& soft, const std::vector<int>& given,
                                      double eta, int num_classes);

/// Drops every node with a different pseudo-label and its incident edges.
SparseGraph class_subgraph(const SparseGraph& graph, const std::vector<int>& pseudo_labels,
                           int cls);

/// Maximum-cardinality connected component among the candidates; ties go to
/// the component containing the smallest node index. Sorted ascending.
std::vector<int> largest_connected_component(const SparseGraph& graph,
                                             const std::vector<int>& candidates);

/// Confidence pruning, then per-class largest-component selection on the
/// refined graph.
SelectionState subgraph_select(const SparseGraph& graph, const SoftLabelMatrix& soft,
                               const std::vector<int>& given, double eta, int num_classes);

/// CSV dump `id,g,pseudo_label,in_lcc`.
void dump_selection(const SelectionState& state, std::ostream& out);

}  // namespace ngc
