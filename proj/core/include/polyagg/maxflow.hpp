#pragma once

#include <cstdint>
#include <vector>

namespace polyagg {

/// s-t flow network over `n` inner nodes with integer capacities. Terminal links are
/// given per node; pairwise links may be asymmetric. Solved with Dinic's algorithm.
class FlowNetwork {
public:
    using Capacity = std::int64_t;

    explicit FlowNetwork(int num_nodes);

    int num_nodes() const { return n_; }

    /// Adds capacity on source -> node and node -> sink.
    void add_terminal(int node, Capacity source_cap, Capacity sink_cap);

    /// Adds capacity on a -> b and b -> a.
    void add_edge(int a, int b, Capacity cap_ab, Capacity cap_ba);

    struct Cut {
        Capacity value = 0;
        std::vector<bool> source_side;  // per inner node
    };

    /// Exact minimum cut. The source side is the set reachable from the source in the
    /// final residual graph, so ties resolve deterministically toward the sink.
    Cut min_cut();

private:
    struct Arc {
        int to;
        Capacity cap;
    };

    void add_arc(int from, int to, Capacity cap, Capacity rev_cap);
    bool bfs();
    Capacity dfs(int v, Capacity pushed);

    int n_;
    int source_;
    int sink_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> out_;
    std::vector<int> level_;
    std::vector<std::size_t> iter_;
};

}  // namespace polyagg
