#include "plexsim/graph.hpp"

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "plexsim/rng.hpp"

namespace plexsim {

double PlexusGraph::extent_um(ExtentMode mode) const {
    const int cells = (mode == ExtentMode::node_pitch) ? width_ - 1 : width_;
    return cells * cell_size_um_;
}

bool PlexusGraph::is_connected() const {
    if (nodes_.empty()) return true;
    std::vector<std::vector<NodeIndex>> adj(nodes_.size());
    for (const GraphEdge& e : edges_) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<NodeIndex> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const NodeIndex n = stack.back();
        stack.pop_back();
        for (NodeIndex m : adj[n]) {
            if (!seen[m]) {
                seen[m] = 1;
                ++reached;
                stack.push_back(m);
            }
        }
    }
    return reached == nodes_.size();
}

PlexusGraph build_grid(int width, int height, double cell_size_um,
                       double diagonal_fraction, std::uint64_t seed) {
    if (width < 2 || height < 2) {
        throw std::invalid_argument("grid dimensions must be at least 2x2, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
    if (!(cell_size_um > 0.0)) {
        throw std::invalid_argument("cell_size must be positive");
    }
    if (!(diagonal_fraction >= 0.0 && diagonal_fraction <= 1.0)) {
        throw std::invalid_argument("diagonal_fraction must lie in [0,1]");
    }

    PlexusGraph g;
    g.width_ = width;
    g.height_ = height;
    g.cell_size_um_ = cell_size_um;

    g.nodes_.reserve(static_cast<std::size_t>(width) * height);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const NodeIndex idx = static_cast<NodeIndex>(row) * width + col;
            g.nodes_.push_back({idx, col * cell_size_um, row * cell_size_um});
        }
    }

    // Lattice edges, ascending node order: right neighbor then up neighbor.
    // Both point to a larger index, so a < b holds by construction.
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const NodeIndex n = static_cast<NodeIndex>(row) * width + col;
            if (col + 1 < width) {
                g.edges_.push_back({static_cast<EdgeIndex>(g.edges_.size()), n,
                                    n + 1, EdgeKind::lattice});
            }
            if (row + 1 < height) {
                g.edges_.push_back({static_cast<EdgeIndex>(g.edges_.size()), n,
                                    static_cast<NodeIndex>(n + width), EdgeKind::lattice});
            }
        }
    }

    // One independent draw per unit cell, bottom-up row-major. A cell gets at
    // most one diagonal, so diagonals never cross and planarity is kept.
    Rng rng(seed, RngStream::diagonals);
    for (int row = 0; row + 1 < height; ++row) {
        for (int col = 0; col + 1 < width; ++col) {
            if (!rng.bernoulli(diagonal_fraction)) continue;
            const NodeIndex bl = static_cast<NodeIndex>(row) * width + col;
            const NodeIndex br = bl + 1;
            const NodeIndex tl = bl + width;
            const NodeIndex tr = tl + 1;
            const bool rising = rng.bernoulli(0.5);  // "/" vs "\"
            const NodeIndex a = rising ? br : bl;
            const NodeIndex b = rising ? tl : tr;
            g.edges_.push_back({static_cast<EdgeIndex>(g.edges_.size()), a, b,
                                EdgeKind::diagonal});
        }
    }
    return g;
}

NodeIndex node_at(const PlexusGraph& graph, int col, int row) {
    if (col < 0 || col >= graph.width() || row < 0 || row >= graph.height()) {
        throw std::invalid_argument("node position (" + std::to_string(col) + "," +
                                    std::to_string(row) + ") outside " +
                                    std::to_string(graph.width()) + "x" +
                                    std::to_string(graph.height()) + " grid");
    }
    return static_cast<NodeIndex>(row) * graph.width() + col;
}

void write_graph_text(const PlexusGraph& graph, std::ostream& out) {
    for (const GraphNode& n : graph.nodes()) {
        out << "node," << n.index << ',' << n.x_um << ',' << n.y_um << '\n';
    }
    for (const GraphEdge& e : graph.edges()) {
        out << "edge," << e.index << ',' << e.a << ',' << e.b << ','
            << (e.kind == EdgeKind::lattice ? "lattice" : "diagonal") << '\n';
    }
}

}  // namespace plexsim
