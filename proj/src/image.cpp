#include "plexsim/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plexsim {

namespace {

// Reads the next PGM header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') {
                tok.push_back(static_cast<char>(in.get()));
            }
            return tok;
        }
    }
    return tok;
}

int parse_header_int(std::istream& in, const char* what) {
    const std::string tok = next_token(in);
    try {
        const int v = std::stoi(tok);
        if (v <= 0) throw std::runtime_error("");
        return v;
    } catch (...) {
        throw std::runtime_error(std::string("PGM: bad ") + what + " '" + tok + "'");
    }
}

}  // namespace

RasterImage load_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image file " + path.string());

    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5") {
        throw std::runtime_error("unsupported raster format '" + magic + "' (expected PGM P2/P5)");
    }
    RasterImage img;
    img.width = parse_header_int(in, "width");
    img.height = parse_header_int(in, "height");
    const int maxval = parse_header_int(in, "maxval");
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);

    if (magic == "P2") {
        for (double& p : img.pixels) {
            const std::string tok = next_token(in);
            try {
                p = std::stod(tok);
            } catch (...) {
                throw std::runtime_error("PGM: bad pixel value '" + tok + "'");
            }
        }
    } else {
        in.get();  // single whitespace after maxval
        if (maxval < 256) {
            std::vector<unsigned char> raw(img.pixels.size());
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw std::runtime_error("PGM: truncated pixel data");
            std::copy(raw.begin(), raw.end(), img.pixels.begin());
        } else {
            std::vector<unsigned char> raw(img.pixels.size() * 2);
            in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
            if (!in) throw std::runtime_error("PGM: truncated pixel data");
            for (std::size_t i = 0; i < img.pixels.size(); ++i) {
                img.pixels[i] = raw[2 * i] * 256.0 + raw[2 * i + 1];
            }
        }
    }
    return img;
}

RasterImage block_mean_downsample(const RasterImage& image, int out_width, int out_height) {
    if (image.width <= 0 || image.height <= 0 || image.pixels.empty()) {
        throw std::invalid_argument("cannot downsample an empty image");
    }
    if (out_width <= 0 || out_height <= 0) {
        throw std::invalid_argument("downsample target must be positive");
    }
    RasterImage out;
    out.width = out_width;
    out.height = out_height;
    out.pixels.resize(static_cast<std::size_t>(out_width) * out_height);

    const double sx = static_cast<double>(image.width) / out_width;
    const double sy = static_cast<double>(image.height) / out_height;
    for (int oy = 0; oy < out_height; ++oy) {
        const double y0 = oy * sy;
        const double y1 = (oy + 1) * sy;
        for (int ox = 0; ox < out_width; ++ox) {
            const double x0 = ox * sx;
            const double x1 = (ox + 1) * sx;
            double sum = 0.0;
            for (int iy = static_cast<int>(std::floor(y0)); iy < image.height && iy < y1; ++iy) {
                const double hy = std::min<double>(y1, iy + 1) - std::max<double>(y0, iy);
                if (hy <= 0.0) continue;
                for (int ix = static_cast<int>(std::floor(x0)); ix < image.width && ix < x1; ++ix) {
                    const double hx = std::min<double>(x1, ix + 1) - std::max<double>(x0, ix);
                    if (hx <= 0.0) continue;
                    sum += hx * hy * image.at(ix, iy);
                }
            }
            out.pixels[static_cast<std::size_t>(oy) * out_width + ox] = sum / (sx * sy);
        }
    }
    return out;
}

InputPlacement place_inputs_from_image(const RasterImage& image, int k,
                                       const PlexusGraph& graph, const NodeRect& region) {
    if (k < 1) throw std::invalid_argument("input count k must be at least 1");
    if (image.width <= 0 || image.height <= 0 || image.pixels.empty()) {
        throw std::invalid_argument("input image is empty");
    }
    if (region.col0 < 0 || region.row0 < 0 || region.col1 < region.col0 ||
        region.row1 < region.row0 || region.col1 >= graph.width() ||
        region.row1 >= graph.height()) {
        throw std::invalid_argument("input region does not fit in the grid");
    }
    if (k > region.node_count()) {
        throw std::invalid_argument("k = " + std::to_string(k) + " exceeds region capacity of " +
                                    std::to_string(region.node_count()) + " nodes");
    }

    const RasterImage coarse = block_mean_downsample(image, region.width(), region.height());

    // Coarse pixel (x, y) with y counted from the image top maps to grid
    // position (col0 + x, row1 - y).
    struct Candidate {
        double intensity;
        NodeIndex node;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(coarse.pixels.size());
    for (int y = 0; y < coarse.height; ++y) {
        for (int x = 0; x < coarse.width; ++x) {
            const NodeIndex node = node_at(graph, region.col0 + x, region.row1 - y);
            candidates.push_back({coarse.at(x, y), node});
        }
    }
    const auto brighter = [](const Candidate& lhs, const Candidate& rhs) {
        if (lhs.intensity != rhs.intensity) return lhs.intensity > rhs.intensity;
        return lhs.node < rhs.node;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), brighter);

    InputPlacement placement;
    placement.region = region;
    placement.nodes.reserve(k);
    placement.intensities.reserve(k);
    for (int i = 0; i < k; ++i) {
        placement.nodes.push_back(candidates[i].node);
        placement.intensities.push_back(candidates[i].intensity);
    }
    return placement;
}

}  // namespace plexsim
