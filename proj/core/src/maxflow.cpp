#include "polyagg/maxflow.hpp"

#include "polyagg/errors.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace polyagg {

FlowNetwork::FlowNetwork(int num_nodes)
    : n_(num_nodes), source_(num_nodes), sink_(num_nodes + 1), out_(num_nodes + 2)
{
}

void FlowNetwork::add_arc(int from, int to, Capacity cap, Capacity rev_cap)
{
    if (cap < 0 || rev_cap < 0) throw InputError("flow capacities must be nonnegative");
    out_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap});
    out_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, rev_cap});
}

void FlowNetwork::add_terminal(int node, Capacity source_cap, Capacity sink_cap)
{
    if (source_cap > 0) add_arc(source_, node, source_cap, 0);
    if (sink_cap > 0) add_arc(node, sink_, sink_cap, 0);
    if (source_cap < 0 || sink_cap < 0) throw InputError("flow capacities must be nonnegative");
}

void FlowNetwork::add_edge(int a, int b, Capacity cap_ab, Capacity cap_ba)
{
    if (cap_ab == 0 && cap_ba == 0) return;
    add_arc(a, b, cap_ab, cap_ba);
}

bool FlowNetwork::bfs()
{
    level_.assign(out_.size(), -1);
    std::queue<int> q;
    level_[source_] = 0;
    q.push(source_);
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int id : out_[v]) {
            const Arc& a = arcs_[id];
            if (a.cap > 0 && level_[a.to] < 0) {
                level_[a.to] = level_[v] + 1;
                q.push(a.to);
            }
        }
    }
    return level_[sink_] >= 0;
}

FlowNetwork::Capacity FlowNetwork::dfs(int v, Capacity pushed)
{
    if (v == sink_) return pushed;
    for (std::size_t& i = iter_[v]; i < out_[v].size(); ++i) {
        const int id = out_[v][i];
        Arc& a = arcs_[id];
        if (a.cap <= 0 || level_[a.to] != level_[v] + 1) continue;
        const Capacity got = dfs(a.to, std::min(pushed, a.cap));
        if (got > 0) {
            a.cap -= got;
            arcs_[id ^ 1].cap += got;
            return got;
        }
    }
    return 0;
}

FlowNetwork::Cut FlowNetwork::min_cut()
{
    Cut cut;
    while (bfs()) {
        iter_.assign(out_.size(), 0);
        while (Capacity f = dfs(source_, std::numeric_limits<Capacity>::max())) {
            cut.value += f;
        }
    }
    // After the last failed BFS, level_ marks the residual reachability from the source.
    cut.source_side.resize(n_);
    for (int v = 0; v < n_; ++v) cut.source_side[v] = level_[v] >= 0;
    return cut;
}

}  // namespace polyagg
