#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "plexsim/image.hpp"
#include "support/temp_dir.hpp"

using namespace plexsim;

namespace {

RasterImage make_image(int w, int h, double fill = 0.0) {
    RasterImage img;
    img.width = w;
    img.height = h;
    img.pixels.assign(static_cast<std::size_t>(w) * h, fill);
    return img;
}

}  // namespace

TEST_CASE("PGM loading handles both encodings") {
    testing::TempDir tmp("pgm");
    const auto ascii = tmp.path() / "a.pgm";
    {
        std::ofstream f(ascii);
        f << "P2\n# comment\n3 2\n255\n0 10 20\n30 40 50\n";
    }
    const RasterImage a = load_pgm(ascii);
    CHECK(a.width == 3);
    CHECK(a.height == 2);
    CHECK(a.at(1, 0) == 10);
    CHECK(a.at(2, 1) == 50);

    const auto binary = tmp.path() / "b.pgm";
    {
        std::ofstream f(binary, std::ios::binary);
        f << "P5\n2 2\n255\n";
        const unsigned char px[4] = {5, 6, 7, 8};
        f.write(reinterpret_cast<const char*>(px), 4);
    }
    const RasterImage b = load_pgm(binary);
    CHECK(b.at(0, 0) == 5);
    CHECK(b.at(1, 1) == 8);

    CHECK_THROWS((void)load_pgm(tmp.path() / "missing.pgm"));
    const auto bad = tmp.path() / "bad.pgm";
    {
        std::ofstream f(bad);
        f << "P6\n1 1\n255\nx";
    }
    CHECK_THROWS((void)load_pgm(bad));
}

TEST_CASE("block mean averages whole blocks") {
    RasterImage img = make_image(4, 4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) img.pixels[y * 4 + x] = y * 4 + x;
    }
    const RasterImage half = block_mean_downsample(img, 2, 2);
    CHECK(half.at(0, 0) == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
    CHECK(half.at(1, 1) == doctest::Approx((10 + 11 + 14 + 15) / 4.0));
    // identity resolution copies values
    const RasterImage same = block_mean_downsample(img, 4, 4);
    CHECK(same.at(3, 2) == doctest::Approx(img.at(3, 2)));
    // fractional ratio preserves the mean
    const RasterImage odd = block_mean_downsample(img, 3, 3);
    double total = 0.0;
    for (double p : odd.pixels) total += p;
    CHECK(total / 9.0 == doctest::Approx(7.5));
}

TEST_CASE("uniform image falls back to the row-major tie rule") {
    // Integer downsampling ratio keeps the block means exactly equal, so the
    // selection is a pure tie-break.
    const PlexusGraph g = build_grid(10, 10, 25.0, 0.0, 0);
    const RasterImage img = make_image(8, 8, 42.0);
    const NodeRect region{2, 2, 5, 5};
    const InputPlacement p = place_inputs_from_image(img, 1, g, region);
    REQUIRE(p.nodes.size() == 1);
    CHECK(p.nodes[0] == node_at(g, 2, 2));  // region's first node, row-major
    const InputPlacement p3 = place_inputs_from_image(img, 3, g, region);
    CHECK(p3.nodes[1] == node_at(g, 3, 2));
    CHECK(p3.nodes[2] == node_at(g, 4, 2));
}

TEST_CASE("a single bright pixel wins any k=1 placement") {
    const PlexusGraph g = build_grid(12, 12, 25.0, 0.0, 0);
    RasterImage img = make_image(6, 6, 1.0);
    img.pixels[2 * 6 + 4] = 200.0;  // image (x=4, y=2), counted from the top
    const NodeRect region{3, 3, 8, 8};
    const InputPlacement p = place_inputs_from_image(img, 1, g, region);
    REQUIRE(p.nodes.size() == 1);
    // top image row is the region's top grid row: row = row1 - y
    CHECK(p.nodes[0] == node_at(g, 3 + 4, 8 - 2));
}

TEST_CASE("selection equals a full sort with the same tie rule") {
    const PlexusGraph g = build_grid(9, 9, 25.0, 0.0, 0);
    RasterImage img = make_image(7, 7);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = static_cast<double>((i * 37) % 11);  // plenty of ties
    }
    const NodeRect region{1, 1, 7, 7};
    const int k = 12;
    const InputPlacement p = place_inputs_from_image(img, k, g, region);

    struct Entry {
        double v;
        NodeIndex node;
    };
    std::vector<Entry> all;
    const RasterImage coarse = block_mean_downsample(img, region.width(), region.height());
    for (int y = 0; y < coarse.height; ++y) {
        for (int x = 0; x < coarse.width; ++x) {
            all.push_back({coarse.at(x, y), node_at(g, region.col0 + x, region.row1 - y)});
        }
    }
    std::stable_sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        if (a.v != b.v) return a.v > b.v;
        return a.node < b.node;
    });
    for (int i = 0; i < k; ++i) {
        CHECK(p.nodes[i] == all[i].node);
        CHECK(p.intensities[i] == all[i].v);
    }
}

TEST_CASE("placement argument errors") {
    const PlexusGraph g = build_grid(5, 5, 25.0, 0.0, 0);
    const RasterImage img = make_image(4, 4, 1.0);
    CHECK_THROWS_AS((void)place_inputs_from_image(img, 0, g, {0, 0, 2, 2}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)place_inputs_from_image(img, 10, g, {0, 0, 2, 2}),
                    std::invalid_argument);  // 9-node region
    CHECK_THROWS_AS((void)place_inputs_from_image(img, 1, g, {0, 0, 5, 5}),
                    std::invalid_argument);  // outside the grid
    CHECK_THROWS_AS((void)place_inputs_from_image(make_image(0, 0), 1, g, {0, 0, 2, 2}),
                    std::invalid_argument);
}
