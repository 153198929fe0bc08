#include "doctest.h"

#include <cmath>
#include <set>

#include "bandsparse/sim.hpp"
#include "bandsparse/zoom.hpp"

using namespace bandsparse;

TEST_CASE("split_bands: exact edges, exact partition, shared parents") {
    std::vector<Cell> one = {{0.0, 0.5, 0.25}};
    std::vector<Cell> kids = split_bands(one, 5);
    REQUIRE(kids.size() == 5);
    CHECK(kids[0].lo == 0.0);
    CHECK(kids[4].hi == 0.5);
    for (int i = 0; i + 1 < 5; ++i) CHECK(kids[i].hi == kids[i + 1].lo);
    const double want[] = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    for (int i = 0; i < 5; ++i) {
        CHECK(kids[i].lo == doctest::Approx(want[i]).epsilon(1e-15));
        CHECK(kids[i].hi == doctest::Approx(want[i + 1]).epsilon(1e-15));
    }

    double width_sum = 0.0;
    for (const Cell& c : kids) width_sum += c.width();
    CHECK(width_sum == 0.5);  // telescoping partition is exact

    // Two adjacent parents: the shared edge appears once per side, bitwise.
    std::vector<Cell> two = {{0.2, 0.3, 0.25}, {0.3, 0.4, 0.35}};
    std::vector<Cell> k2 = split_bands(two, 3);
    REQUIRE(k2.size() == 6);
    CHECK(k2[2].hi == k2[3].lo);
    CHECK(k2[2].hi == 0.3);

    CHECK_THROWS_AS(split_bands(one, 1), std::invalid_argument);
}

TEST_CASE("split chains are bit-identical across runs") {
    std::vector<Cell> bands = {{0.0, 1.0, 0.5}};
    auto run_chain = [&] {
        std::vector<Cell> cur = bands;
        for (int b : {8, 5, 3, 7}) cur = split_bands(cur, b);
        return cur;
    };
    const std::vector<Cell> a = run_chain();
    const std::vector<Cell> b = run_chain();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].lo == b[i].lo);
        CHECK(a[i].hi == b[i].hi);
    }
}

TEST_CASE("band_ratio: printed values and extrapolation flag") {
    CHECK(band_ratio(20, 100) == 0.675);
    CHECK(band_ratio(4, 50) == doctest::Approx(0.569816).epsilon(1e-12));
    CHECK(!band_ratio_extrapolated(20, 100));
    CHECK(band_ratio_extrapolated(3, 100));
    CHECK(band_ratio_extrapolated(20, 40));
    CHECK(band_ratio_extrapolated(101, 100));
    CHECK_THROWS_AS(band_ratio(1, 100), std::invalid_argument);
}

TEST_CASE("recommend_bands respects its threshold and stage rule") {
    for (int n : {50, 100, 200, 300, 500}) {
        for (int stages : {1, 2, 3}) {
            const double threshold = stages >= 2 ? 0.66 : 0.81;
            const auto rec = recommend_bands(n, stages);
            if (rec) {
                CHECK(*rec >= 4);
                CHECK(*rec <= 100);
                CHECK(band_ratio(*rec, n) > threshold);
                // Upper end of the feasible interval: the next B fails or is
                // out of range.
                if (*rec < 100) CHECK(band_ratio(*rec + 1, n) <= threshold);
            } else {
                for (int b = 4; b <= 100; ++b) CHECK(band_ratio(b, n) <= threshold);
            }
        }
    }
    // N = 500 is infeasible single-stage but feasible for two stages.
    CHECK(!recommend_bands(500, 1).has_value());
    CHECK(recommend_bands(500, 2).has_value());
}

TEST_CASE("select_active_bands thresholds relative to the peak") {
    SolveResult res;
    res.coefficients = {cxd(0.0), cxd(1.0, 0), cxd(0.4, 0), cxd(1e-5, 0)};
    auto idx = select_active_bands(res, 4, 1e-3);
    CHECK(idx == std::vector<std::size_t>{1, 2});

    SolveResult zero;
    zero.coefficients = CVector(4, cxd(0.0));
    CHECK(select_active_bands(zero, 4, 1e-3).empty());

    SolveResult ratio;
    ratio.coefficients = {cxd(1.0, 0), cxd(0.5, 0)};
    CHECK(select_active_bands(ratio, 2, 1e-3).size() == 2);

    CHECK_THROWS_AS(select_active_bands(res, 7, 1e-3), std::invalid_argument);
}

TEST_CASE("run_zoom: noise-free on-grid tone survives the whole chain") {
    const std::size_t n = 64;
    const SamplingScheme scheme = SamplingScheme::uniform(n);
    SignalRealization truth;
    truth.frequencies = {{0.375}};
    truth.amplitudes = {cxd(1, 0)};
    const CVector y = synthesize(truth, scheme);

    ZoomPlan plan;
    plan.stages = {{8, DictKind::wideband_integrated}, {8, DictKind::wideband_integrated}};
    plan.alphas = {0.3, 0.3};
    const ZoomResult res = run_zoom(y, scheme, plan);

    CHECK(res.model_order == 1);
    REQUIRE(res.frequencies.size() == 1);
    CHECK(toroidal_distance(res.frequencies[0][0], 0.375) <= 2.0 / 64);
    for (const auto& stage_boxes : res.surviving) {
        bool contained = false;
        for (const Box& b : stage_boxes)
            if (box_contains(b, {0.375})) contained = true;
        CHECK(contained);
    }
    CHECK(res.final_resolution[0] == doctest::Approx(1.0 / 64).epsilon(1e-15));
    REQUIRE(res.amplitudes.size() == 1);
    CHECK(std::abs(res.amplitudes[0] - cxd(1, 0)) < 0.2);

    // Band nesting: every stage-2 survivor sits inside some stage-1 survivor.
    for (const Box& fine : res.surviving[1]) {
        bool nested = false;
        for (const Box& coarse : res.surviving[0])
            if (fine[0].lo >= coarse[0].lo && fine[0].hi <= coarse[0].hi) nested = true;
        CHECK(nested);
    }
}

TEST_CASE("run_zoom: pure noise with lambda above lambda_max reports order zero") {
    const std::size_t n = 48;
    const SamplingScheme scheme = SamplingScheme::uniform(n);
    Rng rng(1001);
    CVector y(n);
    for (auto& v : y) v = rng.complex_gaussian(1.0);

    ZoomPlan plan;
    plan.stages = {{8, DictKind::wideband_integrated}};
    plan.alphas = {1.0};  // lambda = lambda_max: solution is identically zero
    const ZoomResult res = run_zoom(y, scheme, plan);
    CHECK(res.model_order == 0);
    CHECK(res.frequencies.empty());
}

TEST_CASE("run_zoom: two-dimensional tone, per-axis splitting") {
    const SamplingScheme scheme = SamplingScheme::uniform_md({16, 16});
    SignalRealization truth;
    truth.frequencies = {{0.3125, 0.6875}};  // on the 16-grid in both axes
    truth.amplitudes = {cxd(1, 0)};
    const CVector y = synthesize(truth, scheme);

    ZoomPlan plan;
    plan.stages = {{4, DictKind::wideband_integrated}, {4, DictKind::wideband_integrated}};
    plan.alphas = {0.3, 0.3};
    const ZoomResult res = run_zoom(y, scheme, plan);
    CHECK(res.model_order == 1);
    REQUIRE(res.frequencies.size() == 1);
    CHECK(toroidal_distance(res.frequencies[0][0], 0.3125) <= 1.0 / 8);
    CHECK(toroidal_distance(res.frequencies[0][1], 0.6875) <= 1.0 / 8);
    CHECK(res.final_resolution[0] == doctest::Approx(1.0 / 16).epsilon(1e-15));
}

TEST_CASE("run_zoom: re-running the same plan is bit-identical") {
    const std::size_t n = 50;
    const SamplingScheme scheme = SamplingScheme::uniform(n);
    SignalSpec spec;
    spec.dims = 1;
    spec.k = 2;
    spec.min_spacing = 0.05;
    Rng rng(31007);
    SignalRealization truth;
    CVector clean = generate_signal(spec, scheme, rng, &truth);
    CVector y = add_noise(clean, NoiseSpec{15.0}, rng);

    ZoomPlan plan;
    plan.stages = {{10, DictKind::wideband_integrated}, {5, DictKind::wideband_integrated}};
    plan.alphas = {0.4, 0.4};
    const ZoomResult a = run_zoom(y, scheme, plan);
    const ZoomResult b = run_zoom(y, scheme, plan);
    CHECK(zoom_result_json(a) == zoom_result_json(b));
    REQUIRE(a.surviving.size() == b.surviving.size());
    for (std::size_t z = 0; z < a.surviving.size(); ++z) {
        REQUIRE(a.surviving[z].size() == b.surviving[z].size());
        for (std::size_t i = 0; i < a.surviving[z].size(); ++i) {
            CHECK(a.surviving[z][i][0].lo == b.surviving[z][i][0].lo);
            CHECK(a.surviving[z][i][0].hi == b.surviving[z][i][0].hi);
        }
    }
}

TEST_CASE("run_zoom: narrowband refinement stage places points at midpoints") {
    const std::size_t n = 64;
    const SamplingScheme scheme = SamplingScheme::uniform(n);
    SignalRealization truth;
    truth.frequencies = {{0.390625}};  // midpoint of the first stage-2 cell in [0.375, 0.5)
    truth.amplitudes = {cxd(1, 0)};
    const CVector y = synthesize(truth, scheme);

    ZoomPlan plan;
    plan.stages = {{8, DictKind::wideband_integrated}, {4, DictKind::narrowband}};
    plan.alphas = {0.3, 0.3};
    const ZoomResult res = run_zoom(y, scheme, plan);
    CHECK(res.model_order == 1);
    REQUIRE(res.frequencies.size() == 1);
    CHECK(res.frequencies[0][0] == doctest::Approx(0.390625).epsilon(1e-9));
}

TEST_CASE("run_zoom: refine_midpoints pass keeps a clean on-grid answer") {
    const std::size_t n = 64;
    const SamplingScheme scheme = SamplingScheme::uniform(n);
    SignalRealization truth;
    truth.frequencies = {{0.375}};
    truth.amplitudes = {cxd(1, 0)};
    const CVector y = synthesize(truth, scheme);

    ZoomPlan plan;
    plan.stages = {{8, DictKind::wideband_integrated}, {8, DictKind::wideband_integrated}};
    plan.alphas = {0.3, 0.3};
    plan.refine_midpoints = true;
    const ZoomResult res = run_zoom(y, scheme, plan);
    CHECK(res.model_order == 1);
    CHECK(toroidal_distance(res.frequencies[0][0], 0.375) <= 2.0 / 64);
}

TEST_CASE("cluster machinery merges runs and respects the torus seam") {
    std::vector<Box> boxes;
    auto cell = [](double lo, double hi) { return Cell{lo, hi, 0.5 * (lo + hi)}; };
    boxes.push_back({cell(0.3, 0.4)});
    boxes.push_back({cell(0.4, 0.5)});    // adjacent to the first
    boxes.push_back({cell(0.65, 0.7)});   // isolated
    boxes.push_back({cell(0.9, 1.0)});    // seam-adjacent to the next
    boxes.push_back({cell(0.0, 0.05)});
    const auto clusters = cluster_surviving(boxes);
    CHECK(clusters.size() == 3);
    std::multiset<std::size_t> sizes;
    for (const auto& c : clusters) sizes.insert(c.size());
    CHECK(sizes == std::multiset<std::size_t>({1, 2, 2}));
}

TEST_CASE("zoom plan validation") {
    ZoomPlan plan;
    plan.stages = {};
    CHECK_THROWS_AS(plan.validate(1), std::invalid_argument);
    plan.stages = {{1, DictKind::wideband_integrated}};
    CHECK_THROWS_AS(plan.validate(1), std::invalid_argument);
    plan.stages = {{4, DictKind::wideband_dpss}};
    CHECK_THROWS_AS(plan.validate(1), std::invalid_argument);  // DPSS needs a config
    plan.stages = {{4, DictKind::wideband_integrated}};
    plan.alphas = {1.2};
    CHECK_THROWS_AS(plan.validate(1), std::invalid_argument);
}
