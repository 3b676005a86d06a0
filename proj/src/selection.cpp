#include "ngc/selection.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace ngc {

DisjointSet::DisjointSet(int n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
}

int DisjointSet::find(int x) {
    int root = x;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[x] != root) {
        int next = parent_[x];
        parent_[x] = root;
        x = next;
    }
    return root;
}

bool DisjointSet::unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
}

SelectionState SelectionState::none(Eigen::Index n, int num_classes) {
    SelectionState s;
    s.g.assign(n, 0);
    s.pseudo_labels.assign(n, 0);
    s.per_class_lcc.resize(num_classes);
    return s;
}

int SelectionState::selected_count() const {
    return static_cast<int>(std::count(g.begin(), g.end(), char(1)));
}

ConfidenceSelection confidence_select(const SoftLabelMatrix& soft, const std::vector<int>& given,
                                      double eta, int num_classes) {
    const Eigen::Index n = soft.values.rows();
    if (static_cast<Eigen::Index>(given.size()) != n)
        throw std::invalid_argument("confidence_select: label length mismatch");

    ConfidenceSelection out;
    out.keep.assign(n, 0);
    out.pseudo_labels = hard_pseudo_labels(soft);
    const double uniform = 1.0 / static_cast<double>(num_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (soft.values(i, given[i]) > uniform) {
            out.keep[i] = 1;
            out.pseudo_labels[i] = given[i];
        } else if (soft.values.row(i).maxCoeff() > eta) {
            out.keep[i] = 1;
        }
    }
    return out;
}

SparseGraph class_subgraph(const SparseGraph& graph, const std::vector<int>& pseudo_labels,
                           int cls) {
    std::vector<char> keep(graph.num_nodes());
    for (int i = 0; i < graph.num_nodes(); ++i) keep[i] = pseudo_labels[i] == cls;
    return refine_graph(graph, keep);
}

std::vector<int> largest_connected_component(const SparseGraph& graph,
                                             const std::vector<int>& candidates) {
    if (candidates.empty()) return {};
    std::vector<char> is_candidate(graph.num_nodes(), 0);
    for (int v : candidates) is_candidate[v] = 1;

    DisjointSet dsu(graph.num_nodes());
    for (const Edge& e : graph.edges())
        if (is_candidate[e.i] && is_candidate[e.j]) dsu.unite(e.i, e.j);

    std::unordered_map<int, int> component_size;
    for (int v : candidates) ++component_size[dsu.find(v)];

    // Scanning candidates in ascending index makes the smallest-index tie
    // rule fall out of the strict > comparison.
    std::vector<int> sorted = candidates;
    std::sort(sorted.begin(), sorted.end());
    int best_root = -1;
    int best_size = 0;
    for (int v : sorted) {
        const int size = component_size[dsu.find(v)];
        if (size > best_size) {
            best_size = size;
            best_root = dsu.find(v);
        }
    }

    std::vector<int> result;
    result.reserve(best_size);
    for (int v : sorted)
        if (dsu.find(v) == best_root) result.push_back(v);
    return result;
}

SelectionState subgraph_select(const SparseGraph& graph, const SoftLabelMatrix& soft,
                               const std::vector<int>& given, double eta, int num_classes) {
    const int n = graph.num_nodes();
    ConfidenceSelection conf = confidence_select(soft, given, eta, num_classes);
    const SparseGraph refined = refine_graph(graph, conf.keep);

    SelectionState state;
    state.g.assign(n, 0);
    state.pseudo_labels = conf.pseudo_labels;
    state.per_class_lcc.resize(num_classes);

    for (int k = 0; k < num_classes; ++k) {
        std::vector<int> candidates;
        for (int i = 0; i < n; ++i)
            if (conf.keep[i] && conf.pseudo_labels[i] == k) candidates.push_back(i);
        const SparseGraph class_graph = class_subgraph(refined, conf.pseudo_labels, k);
        state.per_class_lcc[k] = largest_connected_component(class_graph, candidates);
        for (int v : state.per_class_lcc[k]) {
            state.g[v] = 1;
            state.clean_set.push_back(v);
        }
    }
    std::sort(state.clean_set.begin(), state.clean_set.end());
    return state;
}

void dump_selection(const SelectionState& state, std::ostream& out) {
    std::vector<char> in_lcc(state.g.size(), 0);
    for (const auto& component : state.per_class_lcc)
        for (int v : component) in_lcc[v] = 1;
    out << "id,g,pseudo_label,in_lcc\n";
    for (std::size_t i = 0; i < state.g.size(); ++i)
        out << i << ',' << int(state.g[i]) << ',' << state.pseudo_labels[i] << ','
            << int(in_lcc[i]) << '\n';
}

}  // namespace ngc
