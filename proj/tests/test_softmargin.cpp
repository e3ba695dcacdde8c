#include <doctest.h>

#include <cmath>
#include <vector>

#include "advdir/attack.hpp"
#include "advdir/dataset.hpp"
#include "advdir/softmargin.hpp"

using namespace advdir;

namespace {

LabeledDataset gaussian_draw(std::uint64_t seed, std::size_t per_class) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TwoGaussians;
    spec.dim = 6;
    spec.per_class = per_class;
    spec.seed = seed;
    spec.separation = 6.0;
    return generate(spec);
}

}  // namespace

TEST_CASE("soft training is deterministic and zero-step training is inert") {
    const LabeledDataset data = gaussian_draw(4, 30);
    SoftTrainConfig cfg;
    cfg.epochs = 25;
    cfg.step = 0.05;
    cfg.norm_cap = 2.0;
    cfg.seed = 99;
    const LinearClassifier a = train_soft(data, cfg);
    const LinearClassifier b = train_soft(data, cfg);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);

    SoftTrainConfig frozen = cfg;
    frozen.epochs = 1;
    frozen.step = 0.0;
    const LinearClassifier c0 = train_soft(data, frozen);
    frozen.epochs = 0;
    const LinearClassifier init = train_soft(data, frozen);
    CHECK(c0.w == init.w);
    CHECK(norm2(init.w) > 0.0);
}

TEST_CASE("unit-margin-confident classifiers measure rho = 0 exactly") {
    // every point scores +-2, comfortably past the unit-margin cutoff
    const LabeledDataset data(2, {{1.0, 0.5}, {1.0, -0.5}, {-1.0, 0.2},
                                  {-1.0, -0.8}},
                              {+1, +1, -1, -1}, LabelKind::Binary);
    const LinearClassifier h{{2.0, 0.0}, 0.0};
    const auto [r1, r2] = assess_assumptions(h, h, data, data);
    CHECK(r1.rho == 0.0);
    CHECK(r2.rho == 0.0);
    CHECK(r1.n == data.size());
}

TEST_CASE("well-separated draws keep rho near zero after training") {
    const LabeledDataset data = gaussian_draw(12, 200);
    SoftTrainConfig cfg;
    cfg.epochs = 60;
    cfg.step = 0.05;
    cfg.norm_cap = 2.0;
    cfg.seed = 5;
    const LinearClassifier h1 = train_soft(data, cfg);
    cfg.seed = 6;
    const LinearClassifier h2 = train_soft(data, cfg);
    const auto [r1, r2] = assess_assumptions(h1, h2, data, data);
    CHECK(r1.rho <= 0.02);
    CHECK(r2.rho <= 0.02);
    CHECK(r1.n == data.size());
}

TEST_CASE("rho matches a brute-force recount of low-margin points") {
    const LabeledDataset s1 = gaussian_draw(21, 50);
    const LabeledDataset s2 = gaussian_draw(22, 50);
    // deliberately weak intercept-free classifiers: arbitrary tilted separators
    const LinearClassifier h1{{0.3, 0.1, -0.2, 0.05, 0.0, 0.02}, 0.0};
    const LinearClassifier h2{{-0.1, 0.4, 0.0, 0.0, 0.1, 0.0}, 0.0};
    const auto [r1, r2] = assess_assumptions(h1, h2, s1, s2);
    std::size_t violations = 0;
    for (std::size_t i = 0; i < s1.size(); ++i)
        if (s1.label(i) * h1.score(s1.point(i)) < 1.0) ++violations;
    CHECK(r1.rho == doctest::Approx(double(violations) / double(s1.size()))
                        .epsilon(1e-12));
}

TEST_CASE("size bound evaluates to the frozen arithmetic value") {
    // (1-0.1)*10000 - 2*100 - 4*sqrt(10000*ln 10000), evaluated independently
    CHECK(soft_margin_size_bound(10000, 0.05, 1.0, 1.0) ==
          doctest::Approx(7586.058296491883).epsilon(1e-6));
    CHECK(std::abs(soft_margin_size_bound(10000, 0.05, 1.0, 1.0) - 7585.9) <
          0.5);
}

TEST_CASE("size bound is vacuous at rho = 1/2 and monotone in its knobs") {
    for (std::size_t n : {2u, 10u, 1000u})
        CHECK(soft_margin_size_bound(n, 0.5, 1.0, 1.0) < 0.0);
    const double base = soft_margin_size_bound(5000, 0.1, 1.0, 1.0);
    CHECK(soft_margin_size_bound(5000, 0.2, 1.0, 1.0) < base);
    CHECK(soft_margin_size_bound(5000, 0.1, 2.0, 1.0) < base);
    CHECK(soft_margin_size_bound(5000, 0.1, 1.0, 3.0) < base);
}

TEST_CASE("joint subset handles the perfect, empty, and generic cases") {
    const LabeledDataset s1 = gaussian_draw(31, 40);
    const LabeledDataset s2 = gaussian_draw(32, 40);
    SoftTrainConfig cfg;
    cfg.epochs = 60;
    cfg.step = 0.05;
    cfg.norm_cap = 2.0;
    cfg.seed = 1;
    const LinearClassifier h1 = train_soft(s1, cfg);

    SUBCASE("both perfect: union of the samples") {
        const JointSubset joint = joint_correct_subset(h1, h1, s1, s1);
        // h1 separates its own confident draw, so everything stays
        CHECK(joint.set.size() == s1.size() + s1.size());
        CHECK(joint.from_first == s1.size());
        CHECK(joint.from_second == s1.size());
    }
    SUBCASE("an always-wrong partner empties the subset") {
        LinearClassifier anti = h1;
        for (double& c : anti.w) c = -c;
        anti.b = -anti.b;
        const JointSubset joint = joint_correct_subset(h1, anti, s1, s1);
        CHECK(joint.set.size() == 0);
    }
    SUBCASE("membership matches a per-point recount") {
        cfg.seed = 2;
        const LinearClassifier h2 = train_soft(s2, cfg);
        const JointSubset joint = joint_correct_subset(h1, h2, s1, s2);
        std::size_t expect = 0;
        for (const LabeledDataset* s : {&s1, &s2})
            for (std::size_t i = 0; i < s->size(); ++i)
                if (h1.classify(s->point(i)) == s->label(i) &&
                    h2.classify(s->point(i)) == s->label(i))
                    ++expect;
        CHECK(joint.set.size() == expect);
    }
}

TEST_CASE("joint direction flips every joint point for both classifiers") {
    const LabeledDataset s1 = gaussian_draw(41, 150);
    const LabeledDataset s2 = gaussian_draw(42, 150);
    SoftTrainConfig cfg;
    cfg.epochs = 80;
    cfg.step = 0.05;
    cfg.norm_cap = 1.0;
    cfg.seed = 7;
    const LinearClassifier h1 = train_soft(s1, cfg);
    cfg.seed = 8;
    const LinearClassifier h2 = train_soft(s2, cfg);
    const SoftDirection result = transferable_direction_soft(h1, h2, s1, s2);
    REQUIRE(result.joint.set.size() > 0);
    std::size_t flipped = 0;
    for (std::size_t i = 0; i < result.joint.set.size(); ++i) {
        const Vec& x = result.joint.set.point(i);
        const int y = result.joint.set.label(i);
        const Vec dir = scaled(result.direction.v, double(-y));
        const auto c1 = flip_search(label_fn(h1), x, dir, 1e6);
        const auto c2 = flip_search(label_fn(h2), x, dir, 1e6);
        if (c1 && c2) ++flipped;
    }
    CHECK(flipped == result.joint.set.size());
}
