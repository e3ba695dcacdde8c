#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "advdir/attack.hpp"
#include "advdir/dataset.hpp"
#include "advdir/relu.hpp"

using namespace advdir;

namespace {

// Reference two-unit planar network with hand-computable forward values:
// W = ((1, 1/4), (-1, -1/4)), b = (1/2, -1/2), v = (1, 1).
ReluNetwork reference_net() {
    ReluNetwork net;
    net.W = {{1.0, 0.25}, {-1.0, -0.25}};
    net.b = {0.5, -0.5};
    net.v = {1.0, 1.0};
    return net;
}

LabeledDataset planted(std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::MarginPlanted;
    spec.dim = 3;
    spec.per_class = 15;
    spec.seed = seed;
    spec.separation = 2.0;
    return generate(spec);
}

ReluClassifier random_nonneg_net(std::size_t width, std::size_t dim,
                                 std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    ReluNetwork net;
    net.W.assign(width, Vec(dim));
    net.b.assign(width, 0.0);
    net.v.assign(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
        for (double& c : net.W[i]) c = gauss(rng);
        net.b[i] = gauss(rng);
        net.v[i] = std::abs(gauss(rng));
    }
    const DecisionRule rule = (seed % 2 == 0) ? DecisionRule::OpenThreshold
                                              : DecisionRule::ClosedThreshold;
    ReluClassifier clf{std::move(net), rule, 0.2 + 0.8 * unif(rng),
                       NetClass::NonnegOutput};
    validate_net_class(clf);
    return clf;
}

}  // namespace

TEST_CASE("forward pass reproduces hand-computed values") {
    const ReluNetwork net = reference_net();
    // x3 = (0,-1): preactivation (1/4, -1/4), relu keeps (1/4, 0), f = 1/4
    const Vec z3 = net.preactivation({0.0, -1.0});
    CHECK(z3[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(z3[1] == doctest::Approx(-0.25).epsilon(1e-12));
    CHECK(net.forward({0.0, -1.0}) == doctest::Approx(0.25).epsilon(1e-12));
    // x1 = (-1,1): preactivation (-1/4, 1/4), f = 1/4 again
    CHECK(net.forward({-1.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("forward degenerate cases") {
    ReluNetwork zero_b = reference_net();
    zero_b.b = {0.0, 0.0};
    CHECK(zero_b.forward({0.0, 0.0}) == 0.0);

    ReluNetwork zero_v = reference_net();
    zero_v.v = {0.0, 0.0};
    CHECK(zero_v.forward({3.0, -2.0}) == 0.0);
    CHECK(zero_v.forward({-5.0, 7.0}) == 0.0);
}

TEST_CASE("open and closed rules disagree exactly on the threshold level set") {
    ReluClassifier open{reference_net(), DecisionRule::OpenThreshold, 0.25,
                        NetClass::NonnegOutput};
    ReluClassifier closed{reference_net(), DecisionRule::ClosedThreshold, 0.25,
                          NetClass::NonnegOutput};
    const Vec x = {0.0, -1.0};  // f = 1/4 = a exactly
    CHECK(open.classify(x) == -1);
    CHECK(closed.classify(x) == +1);
}

TEST_CASE("class validation rejects mislabeled networks") {
    ReluNetwork net = reference_net();
    net.v = {1.0, -0.5};
    ReluClassifier bad{std::move(net), DecisionRule::OpenThreshold, 0.25,
                       NetClass::NonnegOutput};
    CHECK_THROWS_AS(validate_net_class(bad), std::invalid_argument);

    ReluClassifier not_ones{reference_net(), DecisionRule::OpenThreshold, 0.25,
                            NetClass::OnesOutput};
    not_ones.net.v = {1.0, 2.0};
    CHECK_THROWS_AS(validate_net_class(not_ones), std::invalid_argument);
}

TEST_CASE("constrained training fits separable data and keeps v nonnegative") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TwoGaussians;
    spec.dim = 4;
    spec.per_class = 30;
    spec.separation = 7.0;
    std::size_t wins = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        spec.seed = 100 + seed;
        const LabeledDataset data = generate(spec);
        ReluTrainConfig cfg;
        cfg.epochs = 120;
        cfg.step = 0.05;
        cfg.threshold = 0.5;
        cfg.seed = seed;
        const ReluTrainResult res = train_relu_constrained(data, 8, cfg);
        for (double vi : res.classifier.net.v) CHECK(vi >= 0.0);
        if (res.s_accurate) {
            ++wins;
            CHECK(classifies_all(res.classifier, data));
        }
        const ReluTrainResult again = train_relu_constrained(data, 8, cfg);
        CHECK(again.classifier.net.W == res.classifier.net.W);
    }
    // empirical: at least 90% of seeds reach an exact fit
    CHECK(wins >= 18);
}

TEST_CASE("random accurate nets filter to verified exact fits") {
    const LabeledDataset data = planted(77);
    const auto survivors = random_accurate_relu(data, 6, 20, 3);
    CHECK(survivors.size() >= 1);
    for (const ReluClassifier& clf : survivors) CHECK(classifies_all(clf, data));
    CHECK(random_accurate_relu(data, 6, 0, 3).empty());
}

TEST_CASE("width-1 certificate is the definitional single half-space") {
    ReluNetwork net;
    net.W = {{1.0, 2.0}};
    net.b = {-0.5};
    net.v = {1.5};
    ReluClassifier clf{std::move(net), DecisionRule::OpenThreshold, 0.7,
                       NetClass::NonnegOutput};
    const auto points = halton_box(500, 2, Vec{-3.0, -3.0}, Vec{3.0, 3.0});
    const CertificateReport rep = convexity_certificate(clf, points);
    CHECK(rep.subset_count == 1);
    CHECK(rep.passed());
    CHECK(rep.checked + rep.skipped_boundary == points.size());
}

TEST_CASE("certificate agrees with direct classification on random nets") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        const ReluClassifier clf = random_nonneg_net(1 + seed % 7, 3, seed);
        const auto points =
            halton_box(2000, 3, Vec(3, -5.0), Vec(3, 5.0));
        const CertificateReport rep = convexity_certificate(clf, points);
        CHECK(rep.passed());
    }
}

TEST_CASE("a point whose active set certifies it is classified +1") {
    const ReluClassifier clf = random_nonneg_net(5, 3, 11);
    // find a +1-classified point; its full active subset realizes f(x) > a
    const auto points = halton_box(4000, 3, Vec(3, -6.0), Vec(3, 6.0));
    bool found = false;
    for (const Vec& x : points) {
        if (clf.classify(x) != +1) continue;
        found = true;
        const Vec z = clf.net.preactivation(x);
        double active_sum = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i)
            if (z[i] > 0.0) active_sum += clf.net.v[i] * z[i];
        CHECK(active_sum == doctest::Approx(clf.net.forward(x)).epsilon(1e-12));
        CHECK(active_sum > clf.a);
        break;
    }
    CHECK(found);
}

TEST_CASE("convex-region direction joins the two planar fixture endpoints") {
    const LabeledDataset data(2, {{1.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}},
                              {+1, +1, -1}, LabelKind::Binary);
    // alpha = x3 = (0,-1) in the -1 class, beta = x1 = (1,1)
    const AdversarialDirection v = convex_region_direction(data, 2, 0);
    CHECK(v.v == Vec{1.0, 2.0});
    const AdversarialDirection back = convex_region_direction(data, 0, 2);
    CHECK(back.v == Vec{-1.0, -2.0});
}

TEST_CASE("convex-region direction flips every -1 point of trained nets") {
    const LabeledDataset data = planted(313);
    const auto nets = random_accurate_relu(data, 6, 30, 5);
    REQUIRE(nets.size() >= 3);
    std::size_t alpha = data.size(), beta = data.size();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (alpha == data.size() && data.label(i) < 0) alpha = i;
        if (beta == data.size() && data.label(i) > 0) beta = i;
    }
    const AdversarialDirection dir = convex_region_direction(data, alpha, beta);
    for (const ReluClassifier& clf : nets) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (clf.classify(data.point(i)) != -1) continue;
            const auto c = flip_search(label_fn(clf), data.point(i), dir.v, 1e6);
            CHECK(c.has_value());
        }
    }
}

TEST_CASE("gradient convention: a unit sitting exactly at zero is silent") {
    ReluNetwork net;
    net.W = {{1.0, 0.0}};
    net.b = {0.0};
    net.v = {2.0};
    ReluClassifier clf{std::move(net), DecisionRule::OpenThreshold, 0.5,
                       NetClass::NonnegOutput};
    const AttackableModel m = as_attackable(clf);
    const Vec g = m.score_grad({0.0, 3.0});  // preactivation exactly 0
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
    const Vec g_active = m.score_grad({1.0, 3.0});
    CHECK(g_active[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("halton sequence starts at the textbook values") {
    const auto pts = halton_box(3, 2, Vec{0.0, 0.0}, Vec{1.0, 1.0});
    REQUIRE(pts.size() == 3);
    CHECK(pts[0][0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pts[1][0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(pts[2][0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(pts[0][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(pts[1][1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(pts[2][1] == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("network json round-trips bit-exactly") {
    const ReluClassifier clf = random_nonneg_net(4, 3, 21);
    const std::string text = network_to_json(clf);
    const ReluClassifier back = network_from_json(text);
    CHECK(back.net.W == clf.net.W);
    CHECK(back.net.b == clf.net.b);
    CHECK(back.net.v == clf.net.v);
    CHECK(back.a == clf.a);
    CHECK(back.rule == clf.rule);
    CHECK(back.net_class == clf.net_class);
    CHECK(network_to_json(back) == text);
}
