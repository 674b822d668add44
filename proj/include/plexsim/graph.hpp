#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace plexsim {

using NodeIndex = std::int32_t;
using EdgeIndex = std::int32_t;

enum class EdgeKind : std::uint8_t { lattice, diagonal };

struct GraphNode {
    NodeIndex index;
    double x_um;
    double y_um;
};

/// Undirected edge; endpoints are stored in canonical order a < b.
struct GraphEdge {
    EdgeIndex index;
    NodeIndex a;
    NodeIndex b;
    EdgeKind kind;
};

/// How the physical side length of a W-node grid is reported: distance
/// between the outermost node centers ((W-1)*cell) or the footprint of W
/// cells (W*cell).
enum class ExtentMode : std::uint8_t { node_pitch, cell_footprint };

/// Coarse-grained plexus topology: a width x height lattice with node pitch
/// cell_size_um, plus at most one random diagonal per unit cell so diagonals
/// never cross. Immutable after construction; safe to share across threads.
///
/// Node indexing is row-major from the lower-left corner: node (col,row) has
/// index row*width + col and sits at (col*cell_size, row*cell_size).
class PlexusGraph {
public:
    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] double cell_size_um() const { return cell_size_um_; }
    [[nodiscard]] std::size_t node_count() const { return nodes_.size(); }
    [[nodiscard]] std::size_t edge_count() const { return edges_.size(); }
    [[nodiscard]] const std::vector<GraphNode>& nodes() const { return nodes_; }
    [[nodiscard]] const std::vector<GraphEdge>& edges() const { return edges_; }

    [[nodiscard]] double extent_um(ExtentMode mode) const;

    /// True if every node is reachable from node 0 (checked by traversal).
    [[nodiscard]] bool is_connected() const;

private:
    friend PlexusGraph build_grid(int, int, double, double, std::uint64_t);

    int width_ = 0;
    int height_ = 0;
    double cell_size_um_ = 0.0;
    std::vector<GraphNode> nodes_;
    std::vector<GraphEdge> edges_;
};

/// Builds the grid: lattice edges everywhere, then one Bernoulli draw per
/// unit cell (probability diagonal_fraction) for a diagonal whose orientation
/// is chosen uniformly. Same arguments and seed give a byte-identical edge
/// list. Cells are visited bottom-up, row-major, so the draw order is fixed.
PlexusGraph build_grid(int width, int height, double cell_size_um,
                       double diagonal_fraction, std::uint64_t seed);

/// Node index for lattice position (col,row); throws std::invalid_argument
/// when out of range.
NodeIndex node_at(const PlexusGraph& graph, int col, int row);

/// Plain-text export: `node,index,x_um,y_um` and `edge,index,a,b,kind`
/// records, one per line, for plotting and debugging.
void write_graph_text(const PlexusGraph& graph, std::ostream& out);

}  // namespace plexsim
