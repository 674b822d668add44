#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "plexsim/graph.hpp"

namespace plexsim {

/// Grayscale raster, row-major with the top row first (image convention).
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    [[nodiscard]] double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Reads a PGM file, either ASCII (P2) or binary (P5). Throws
/// std::runtime_error on malformed input.
RasterImage load_pgm(const std::filesystem::path& path);

/// Area-weighted block mean to an arbitrary output resolution.
RasterImage block_mean_downsample(const RasterImage& image, int out_width, int out_height);

/// Inclusive node rectangle in grid coordinates.
struct NodeRect {
    int col0 = 0;
    int row0 = 0;
    int col1 = 0;
    int row1 = 0;

    [[nodiscard]] int width() const { return col1 - col0 + 1; }
    [[nodiscard]] int height() const { return row1 - row0 + 1; }
    [[nodiscard]] int node_count() const { return width() * height(); }
    [[nodiscard]] bool contains(int col, int row) const {
        return col >= col0 && col <= col1 && row >= row0 && row <= row1;
    }
};

/// Input electrodes chosen from an image, brightest coarse pixel first.
struct InputPlacement {
    std::vector<NodeIndex> nodes;
    std::vector<double> intensities;  // coarse intensity per selected node
    NodeRect region;
    std::string source;  // optional image provenance note
};

/// Downsamples the image to the region's node resolution by block mean, then
/// selects the k brightest coarse pixels. The image's top row lands on the
/// region's top (highest) grid row. Ties are broken toward the smaller node
/// index, i.e. row-major order of the region, so the choice is deterministic.
/// Throws std::invalid_argument for k < 1, k exceeding the region's node
/// count, an empty image, or a region outside the graph.
InputPlacement place_inputs_from_image(const RasterImage& image, int k,
                                       const PlexusGraph& graph, const NodeRect& region);

}  // namespace plexsim
