#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "aeloc/grnn/database_io.hpp"
#include "aeloc/grnn/grnn.hpp"
#include "support/grnn_properties.hpp"

using namespace aeloc;
using namespace aeloc::grnn;

namespace {

std::vector<PrototypeVector> line(std::initializer_list<double> g, std::initializer_list<double> h = {}) {
    std::vector<PrototypeVector> out;
    auto hi = h.begin();
    for (double v : g) {
        out.push_back({{v}, {hi != h.end() ? *hi++ : v}});
    }
    return out;
}

} // namespace

TEST(Kernel, Examples) {
    const double a[1] = {0.3}, b[1] = {0.3}, c[1] = {0.8}, d[1] = {5.3};
    EXPECT_EQ(kernel(a, b, 0.5), 1.0);
    EXPECT_NEAR(kernel(a, c, 0.5), 0.6065306597126334, 1e-15);
    const double far = kernel(a, d, 0.5);
    EXPECT_GE(far, 0.0);
    EXPECT_LT(far, 1e-21);
    const double huge[1] = {1e300};
    EXPECT_EQ(kernel(a, huge, 1e-10), 0.0);
}

TEST(Kernel, RejectsBadArguments) {
    const double a[1] = {0}, b[2] = {0, 1};
    EXPECT_THROW(kernel(a, a, 0.0), InvalidArgument);
    EXPECT_THROW(kernel(a, a, -1.0), InvalidArgument);
    EXPECT_THROW(kernel(a, a, std::numeric_limits<double>::infinity()), InvalidArgument);
    EXPECT_THROW(kernel(a, b, 1.0), InvalidArgument);
}

TEST(ComputeSigmas, Examples) {
    EXPECT_EQ(compute_sigmas(line({0, 2})), (std::vector<double>{1, 1}));
    EXPECT_EQ(compute_sigmas(line({0, 1, 5})), (std::vector<double>{0.5, 0.5, 2.0}));
}

TEST(ComputeSigmas, EquallySpacedDelays) {
    // 200 mm spacing at 1.7 km/s: the delay moves by 2 * 200 / 1.7e6 s per prototype.
    const double step = 2 * 200.0 / 1.7e6;
    std::vector<PrototypeVector> ps;
    for (int k = 0; k < 12; ++k) ps.push_back({{-1.2941176470588236e-3 + k * step}, {900.0 + 200 * k}});
    const auto s = compute_sigmas(ps);
    for (double v : s) EXPECT_NEAR(v, step / 2, 1e-15);
    EXPECT_EQ(s, oracle::exhaustive_sigmas(ps));
}

TEST(ComputeSigmas, SkipsDuplicatesButRejectsIsolatedOnes) {
    EXPECT_EQ(compute_sigmas(line({0, 0, 3})), (std::vector<double>{1.5, 1.5, 1.5}));
    EXPECT_THROW(compute_sigmas(line({4})), InvalidArgument);
    try {
        compute_sigmas(line({4, 4}));
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("prototype 0"), std::string::npos);
    }
}

TEST(PrototypeSet, ValidatesInput) {
    EXPECT_THROW(PrototypeSet({}, {}), InvalidArgument);
    EXPECT_THROW(PrototypeSet(line({0, 1}), {1.0}), InvalidArgument);
    EXPECT_THROW(PrototypeSet(line({0, 1}), {1.0, 0.0}), InvalidArgument);
    EXPECT_THROW(PrototypeSet({{{0}, {1}}, {{0, 1}, {1}}}, {1, 1}), InvalidArgument);
    EXPECT_THROW(PrototypeSet({{{std::nan("")}, {1}}}, {1}), InvalidArgument);
}

TEST(BasisWeights, HandExample) {
    const PrototypeSet set(line({0, 1}), {0.5, 0.5});
    const double g[1] = {0.25};
    const auto w = basis_weights(set, g);
    const double e1 = std::exp(-0.125), e2 = std::exp(-1.125);
    EXPECT_NEAR(w.values[0], e1 / (e1 + e2), 1e-15);
    EXPECT_NEAR(w.values[0], 0.731, 5e-4);
    EXPECT_NEAR(w.values[1], 0.269, 5e-4);
    EXPECT_FALSE(w.extrapolated);
}

TEST(BasisWeights, MidpointIsSymmetric) {
    const PrototypeSet set(line({-3, 7}), {2.0, 2.0});
    const double g[1] = {2};
    const auto w = basis_weights(set, g);
    EXPECT_DOUBLE_EQ(w.values[0], 0.5);
    EXPECT_DOUBLE_EQ(w.values[1], 0.5);
}

TEST(BasisWeights, DominantKernel) {
    const auto set = PrototypeSet::with_global_sigma(line({0, 6, 12, 18}), 1.0);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto w = basis_weights(set, set[k].given);
        EXPECT_GT(w.values[k], 0.999);
    }
}

TEST(BasisWeights, PerPrototypeSigmaInNumeratorAndDenominator) {
    const PrototypeSet set(line({0, 1}), {0.25, 1.0});
    const double g[1] = {0.5};
    const auto w = basis_weights(set, g);
    const double k1 = std::exp(-0.25 / (2 * 0.0625)), k2 = std::exp(-0.25 / 2);
    EXPECT_NEAR(w.values[0], k1 / (k1 + k2), 1e-15);
}

TEST(BasisWeights, UnderflowFallsBackToNearest) {
    const PrototypeSet set(line({0, 1, 2}), {0.01, 0.01, 0.01});
    const double g[1] = {1e6};
    const auto w = basis_weights(set, g);
    EXPECT_TRUE(w.extrapolated);
    EXPECT_EQ(w.values, (std::vector<double>{0, 0, 1}));
    const double tie[1] = {-1e6};
    EXPECT_EQ(basis_weights(PrototypeSet(line({-1, 1}), {1e-3, 1e-3}), tie).values, (std::vector<double>{1, 0}));
    const double mid[1] = {0};
    EXPECT_EQ(basis_weights(PrototypeSet(line({-1e3, 1e3}), {1e-3, 1e-3}), mid).values, (std::vector<double>{1, 0}));
}

TEST(BasisWeights, RejectsDimensionMismatch) {
    const PrototypeSet set(line({0, 1}), {1, 1});
    const double g[2] = {0, 0};
    EXPECT_THROW(basis_weights(set, g), InvalidArgument);
}

TEST(Estimate, HandExample) {
    const PrototypeSet set(line({0, 1}, {0, 1000}), {0.5, 0.5});
    const double g[1] = {0.25};
    const auto est = estimate(set, g);
    const double e1 = std::exp(-0.125), e2 = std::exp(-1.125);
    EXPECT_NEAR(est.hidden[0], 1000 * e2 / (e1 + e2), 1e-9);
    EXPECT_NEAR(est.hidden[0], 269, 0.5);
    EXPECT_EQ(est.effective_support, 2u);
}

TEST(Estimate, SinglePrototypeAlwaysRecallsIt) {
    const PrototypeSet set({{{3.0}, {42.0, -1.0}}}, {0.1});
    for (double q : {-1e9, 0.0, 3.0, 7.5, 1e9}) {
        const double g[1] = {q};
        const auto est = estimate(set, g);
        EXPECT_EQ(est.hidden, (std::vector<double>{42.0, -1.0}));
        EXPECT_EQ(est.weights, (std::vector<double>{1.0}));
    }
}

TEST(Estimate, WellSeparatedRecallsPrototype) {
    const auto set = PrototypeSet::with_global_sigma(line({0, 6, 12, 18}, {100, 300, 500, 700}), 1.0);
    for (std::size_t k = 0; k < set.size(); ++k) {
        const auto est = estimate(set, set[k].given);
        EXPECT_NEAR(est.hidden[0], set[k].hidden[0], 1e-3 * set[k].hidden[0]);
        EXPECT_GT(est.top_weight(), 0.999);
    }
}

TEST(Estimate, PropagatesUnderflowFlag) {
    const PrototypeSet set(line({0, 1}, {10, 20}), {0.01, 0.01});
    const double g[1] = {-1e9};
    const auto est = estimate(set, g);
    EXPECT_TRUE(est.extrapolated);
    EXPECT_EQ(est.hidden[0], 10.0);
}

TEST(Properties, Normalization) { EXPECT_EQ(oracle::check_normalization(200, 1), ""); }
TEST(Properties, ConvexHull) { EXPECT_EQ(oracle::check_convex_hull(200, 2), ""); }
TEST(Properties, PermutationInvariance) { EXPECT_EQ(oracle::check_permutation(200, 3), ""); }
TEST(Properties, NearestNeighbourLimit) { EXPECT_EQ(oracle::check_nearest_neighbour_limit(200, 4), ""); }
TEST(Properties, SmoothingLimit) { EXPECT_EQ(oracle::check_smoothing_limit(200, 5), ""); }
TEST(Properties, TranslationEquivariance) { EXPECT_EQ(oracle::check_translation(200, 6), ""); }
TEST(Properties, SigmasMatchExhaustiveOracle) { EXPECT_EQ(oracle::check_sigma_oracle(100, 7), ""); }

TEST(DatabaseIo, RoundTripsBitExactly) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<PrototypeVector> ps;
    for (int k = 0; k < 20; ++k) ps.push_back({{u(rng) * 1e-3, u(rng)}, {u(rng) * 1e3}});
    const Database db{PrototypeSet::with_nearest_neighbour_sigmas(ps), {{"filter_f_low_hz", "35000"}, {"note", "a b"}}};
    const auto text = format_database(db);
    EXPECT_EQ(text.substr(0, text.find('\n')), "# given_dim=2 hidden_dim=1");
    const auto back = parse_database(text);
    EXPECT_EQ(back.set, db.set);
    EXPECT_EQ(back.metadata, db.metadata);
    ASSERT_NE(back.find("note"), nullptr);
    EXPECT_EQ(*back.find("note"), "a b");
    EXPECT_EQ(back.find("missing"), nullptr);
}

TEST(DatabaseIo, ReportsBadFiles) {
    EXPECT_THROW(parse_database(""), IoError);
    EXPECT_THROW(parse_database("1,2,3\n"), IoError);
    EXPECT_THROW(parse_database("# given_dim=1 hidden_dim=1\n1,2\n"), IoError);
    EXPECT_THROW(parse_database("# given_dim=1 hidden_dim=1\n1,2,0\n"), IoError);
    try {
        parse_database("# given_dim=1 hidden_dim=1\n1,2,1\n1,x,1\n", "db.txt");
        FAIL();
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("db.txt:3"), std::string::npos);
    }
}
