#include <catch2/catch_amalgamated.hpp>

#include "beansplit/measures.hpp"
#include "test_support.hpp"

using namespace beansplit;

namespace {

LabelMask random_mask(Rng& rng, int w, int h, double p_split, double p_coat) {
    LabelMask m = LabelMask::filled(w, h, PixelClass::Tray);
    for (auto& c : m.labels) {
        const double u = rng.uniform();
        if (u < p_split) c = PixelClass::Split;
        else if (u < p_split + p_coat) c = PixelClass::SeedCoat;
    }
    return m;
}

BinaryMask random_binary(Rng& rng, int w, int h, double p) {
    BinaryMask b;
    b.width = w;
    b.height = h;
    b.values.resize(static_cast<std::size_t>(w) * h);
    for (auto& v : b.values) v = rng.uniform() < p ? 1 : 0;
    return b;
}

}  // namespace

TEST_CASE("bsr hand values", "[measures]") {
    LabelMask m = LabelMask::filled(4, 3, PixelClass::SeedCoat);  // 12 coat, 0 split
    CHECK(bsr(m) == 0.0);

    // 3 split, 9 seed coat
    m.labels[0] = m.labels[5] = m.labels[7] = PixelClass::Split;
    CHECK(bsr(m) == 0.25);

    // the magnitude of a real low-severity sample: 190 / (190 + 9810)
    LabelMask big = LabelMask::filled(100, 100, PixelClass::SeedCoat);
    for (int i = 0; i < 190; ++i) big.labels[i] = PixelClass::Split;
    CHECK_THAT(bsr(big), Catch::Matchers::WithinAbs(0.019, 1e-15));

    LabelMask tray_only = LabelMask::filled(2, 2, PixelClass::Tray);
    try {
        bsr(tray_only);
        FAIL("expected NoBeanPixels");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoBeanPixels);
    }
}

TEST_CASE("bsr equals one iff every bean pixel is split", "[measures]") {
    LabelMask m = LabelMask::filled(3, 3, PixelClass::Split);
    CHECK(bsr(m) == 1.0);
    m.labels[4] = PixelClass::SeedCoat;
    CHECK(bsr(m) < 1.0);
}

TEST_CASE("bsr is invariant under 2x2 pixel duplication", "[measures]") {
    Rng rng(301);
    const LabelMask m = random_mask(rng, 17, 11, 0.2, 0.5);
    LabelMask doubled = LabelMask::filled(34, 22, PixelClass::Tray);
    for (int y = 0; y < 22; ++y) {
        for (int x = 0; x < 34; ++x) doubled.at(x, y) = m.at(x / 2, y / 2);
    }
    CHECK(bsr(doubled) == bsr(m));
}

TEST_CASE("connected components hand cases", "[measures]") {
    BinaryMask empty;
    empty.width = empty.height = 4;
    empty.values.assign(16, 0);
    CHECK(connected_components(empty, 8).empty());
    CHECK(connected_components(empty, 4).empty());

    // two diagonally adjacent pixels
    BinaryMask diag = empty;
    diag.values[0] = 1;          // (0,0)
    diag.values[4 * 1 + 1] = 1;  // (1,1)
    CHECK(connected_components(diag, 8).size() == 1);
    CHECK(connected_components(diag, 4).size() == 2);
}

TEST_CASE("component areas partition the foreground", "[measures]") {
    Rng rng(303);
    for (int trial = 0; trial < 20; ++trial) {
        const BinaryMask b = random_binary(rng, 24, 16, 0.35);
        std::size_t fg = 0;
        for (auto v : b.values) fg += v;
        for (int conn : {4, 8}) {
            std::size_t sum = 0;
            for (const auto& c : connected_components(b, conn)) {
                REQUIRE(c.area == c.pixels.size());
                sum += c.area;
            }
            CHECK(sum == fg);
        }
    }
}

TEST_CASE("components agree with flood fill and are ordered by scan order", "[measures]") {
    Rng rng(305);
    for (int trial = 0; trial < 25; ++trial) {
        const BinaryMask b = random_binary(rng, 32, 32, rng.uniform(0.2, 0.6));
        for (int conn : {4, 8}) {
            const auto ours = connected_components(b, conn);
            auto oracle = testsupport::flood_fill_components(b, conn);
            REQUIRE(ours.size() == oracle.size());
            // compare as sets of pixel sets
            std::vector<std::set<std::pair<int, int>>> got;
            for (const auto& c : ours) got.emplace_back(c.pixels.begin(), c.pixels.end());
            for (const auto& comp : got) {
                CHECK(std::find(oracle.begin(), oracle.end(), comp) != oracle.end());
            }
            // deterministic ordering by first pixel in scan order
            auto first_index = [&](const SplitComponent& c) {
                std::size_t best = b.values.size();
                for (auto [x, y] : c.pixels) {
                    best = std::min(best, static_cast<std::size_t>(y) * b.width + x);
                }
                return best;
            };
            for (std::size_t i = 1; i < ours.size(); ++i) {
                CHECK(first_index(ours[i - 1]) < first_index(ours[i]));
            }
        }
    }
}

TEST_CASE("component sets are stable under dihedral transforms", "[measures]") {
    Rng rng(307);
    LabelMask mask = random_mask(rng, 12, 9, 0.3, 0.3);
    const auto base = connected_components(BinaryMask::of_class(mask, PixelClass::Split), 8);
    for (int k = 1; k < 8; ++k) {
        const LabelMask t = dihedral_transform(mask, k);
        const auto moved = connected_components(BinaryMask::of_class(t, PixelClass::Split), 8);
        REQUIRE(moved.size() == base.size());
        std::multiset<std::size_t> a, b;
        for (const auto& c : base) a.insert(c.area);
        for (const auto& c : moved) b.insert(c.area);
        CHECK(a == b);
    }
}

TEST_CASE("bsh bins and clamping", "[measures]") {
    // single split of area M/4 with N=10 lands in bin 3 ([0.2, 0.3))
    const auto h = bsh({25}, 1000, 100, 10);
    REQUIRE(h.bins.size() == 10);
    CHECK(h.bins[2] == 25.0 / 1000.0);
    for (int i = 0; i < 10; ++i) {
        if (i != 2) CHECK(h.bins[i] == 0.0);
    }

    // ratio >= 1 clamps into the top bin
    const auto c = bsh({100, 250}, 1000, 100, 10);
    CHECK(c.bins[9] == 350.0 / 1000.0);

    // exact bin boundaries go right: area 20 of M=100, N=10 -> ratio 0.2 -> bin 3
    const auto e = bsh({20}, 1000, 100, 10);
    CHECK(e.bins[2] == 20.0 / 1000.0);
    CHECK(e.bins[1] == 0.0);

    try {
        bsh({1}, 0, 100, 10);
        FAIL("expected InvalidParameter");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::InvalidParameter);
    }
}

TEST_CASE("bsh mass conservation against exact rationals", "[measures]") {
    Rng rng(309);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t bean = 500 + rng.index(5000);
        const std::size_t M = 20 + rng.index(200);
        const int N = 1 + static_cast<int>(rng.index(16));
        std::vector<std::size_t> areas;
        const int k = static_cast<int>(rng.index(12));
        std::size_t total = 0;
        for (int i = 0; i < k; ++i) {
            areas.push_back(1 + rng.index(M + M / 2));
            total += areas.back();
        }
        const auto h = bsh(areas, bean, M, N);
        // sum of bins equals the exact rational total within 1e-12
        const double exact = static_cast<double>(total) / static_cast<double>(bean);
        CHECK(std::abs(h.total() - exact) <= 1e-12);
        // each bin is the correctly rounded value of its integer numerator
        std::vector<std::size_t> per_bin(N, 0);
        for (std::size_t a : areas) {
            std::size_t bin = std::min<std::size_t>((N * a) / M, N - 1);
            per_bin[bin] += a;
        }
        for (int i = 0; i < N; ++i) {
            CHECK(h.bins[i] == static_cast<double>(per_bin[i]) / static_cast<double>(bean));
        }
    }
}

TEST_CASE("emd hand cases", "[measures]") {
    auto hist = [](std::vector<double> bins) {
        BshHistogram h;
        h.bin_count = static_cast<int>(bins.size());
        h.bins = std::move(bins);
        h.bean_area = 1;
        h.max_split_area = 1;
        return h;
    };
    CHECK(emd_1d(hist({0.1, 0.2, 0.3}), hist({0.1, 0.2, 0.3})) == 0.0);
    // unit mass in bin 1 vs bin 3: cumulative diffs 1,1,0
    CHECK(emd_1d(hist({1, 0, 0}), hist({0, 0, 1})) == 2.0);
    // extra mass delta in the last bin costs exactly delta
    CHECK_THAT(emd_1d(hist({0.2, 0.3, 0.1 + 0.05}), hist({0.2, 0.3, 0.1})),
               Catch::Matchers::WithinAbs(0.05, 1e-15));

    try {
        emd_1d(hist({1, 2}), hist({1, 2, 3}));
        FAIL("expected BinCountMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::BinCountMismatch);
    }
}

TEST_CASE("emd metric axioms on random histograms", "[measures]") {
    Rng rng(311);
    auto random_hist = [&](int n) {
        BshHistogram h;
        h.bin_count = n;
        h.bean_area = 1;
        h.max_split_area = 1;
        for (int i = 0; i < n; ++i) h.bins.push_back(rng.uniform());
        return h;
    };
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(12));
        const auto a = random_hist(n), b = random_hist(n), c = random_hist(n);
        const double dab = emd_1d(a, b), dba = emd_1d(b, a);
        CHECK(dab == dba);
        CHECK(dab >= 0.0);
        CHECK(emd_1d(a, a) == 0.0);
        CHECK(emd_1d(a, c) <= emd_1d(a, b) + emd_1d(b, c) + 1e-12);
    }
}

TEST_CASE("estimate_max_bean_area finds the largest bean region", "[measures]") {
    LabelMask m = LabelMask::filled(10, 10, PixelClass::Tray);
    for (int y = 0; y < 3; ++y) {
        for (int x = 0; x < 3; ++x) m.at(x, y) = PixelClass::SeedCoat;  // 9 px bean
    }
    for (int y = 6; y < 10; ++y) {
        for (int x = 6; x < 10; ++x) {
            m.at(x, y) = (x + y) % 2 ? PixelClass::SeedCoat : PixelClass::Split;  // 16 px bean
        }
    }
    CHECK(estimate_max_bean_area({m}) == 16);
}
