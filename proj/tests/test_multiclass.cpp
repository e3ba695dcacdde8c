#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "advdir/attack.hpp"
#include "advdir/dataset.hpp"
#include "advdir/multiclass.hpp"

using namespace advdir;

TEST_CASE("hard one-vs-rest training fits well-separated clusters exactly") {
    const LabeledDataset data = make_clusters(3, 3, 12, 9.0, 2);
    MulticlassTrainConfig cfg;
    cfg.seed = 5;
    const MulticlassLinear h = train_multiclass(data, MulticlassMode::HardOvr, cfg);
    CHECK(classifies_all(h, data));
    const MulticlassLinear again =
        train_multiclass(data, MulticlassMode::HardOvr, cfg);
    CHECK(h.rows == again.rows);
    CHECK(h.bias == again.bias);
}

TEST_CASE("argmax ties break toward the smallest class index") {
    MulticlassLinear h;
    h.rows = {{1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}};
    h.bias = {0.0, 0.0, 0.0};
    // rows 1 and 2 score identically everywhere; class 1 must win
    CHECK(h.classify({5.0, 2.0}) == 1);
    // all three tie at the origin
    CHECK(h.classify({0.0, 0.0}) == 1);
}

TEST_CASE("pair reduction is the row difference and is antisymmetric") {
    MulticlassLinear h;
    h.rows = {{1.0, 0.0}, {0.0, 1.0}};
    h.bias = {0.25, -0.5};
    const LinearClassifier kl = reduce_pair(h, 1, 2);
    CHECK(kl.w == Vec{1.0, -1.0});
    CHECK(kl.b == doctest::Approx(0.75).epsilon(1e-12));
    const LinearClassifier lk = reduce_pair(h, 2, 1);
    CHECK(lk.w == Vec{-1.0, 1.0});
    CHECK(lk.b == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("reduced classifier inherits accuracy on the pair slice") {
    const LabeledDataset data = make_clusters(3, 2, 10, 8.0, 13);
    MulticlassTrainConfig cfg;
    cfg.seed = 3;
    const MulticlassLinear h = train_multiclass(data, MulticlassMode::HardOvr, cfg);
    REQUIRE(classifies_all(h, data));
    const LabeledDataset pair = data.slice({1, 3}).relabel_binary(1, 3);
    const LinearClassifier red = reduce_pair(h, 1, 3);
    for (std::size_t i = 0; i < pair.size(); ++i) {
        // argmax accuracy only promises the strict sign for the winning class
        const int y = pair.label(i);
        const double s = red.score(pair.point(i));
        if (y > 0)
            CHECK(s > 0.0);
        else
            CHECK(s < 0.0);
    }
}

TEST_CASE("two-class argmax agrees with the row-difference binary rule") {
    const LabeledDataset data = make_clusters(2, 3, 15, 7.0, 29);
    MulticlassTrainConfig cfg;
    cfg.seed = 11;
    const MulticlassLinear h = train_multiclass(data, MulticlassMode::HardOvr, cfg);
    const LinearClassifier red = reduce_pair(h, 1, 2);
    GeneratorSpec probe_spec;
    probe_spec.kind = GeneratorKind::TwoGaussians;
    probe_spec.dim = 3;
    probe_spec.per_class = 40;
    probe_spec.seed = 31;
    probe_spec.separation = 2.0;
    const LabeledDataset probes = generate(probe_spec);
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const int arg = h.classify(probes.point(i));
        const double s = red.score(probes.point(i));
        // score > 0 picks class 1; exact ties also resolve to class 1
        CHECK(arg == (s >= 0.0 ? 1 : 2));
    }
}

TEST_CASE("pair direction for far clusters points between their centers") {
    // clusters at (0,0), (10,0), (0,10): the {1,2} separator is vertical and
    // the class-1 escape direction points at the class-2 cluster, i.e. (+1, 0)
    std::vector<Vec> pts;
    std::vector<int> labels;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g(0.0, 0.3);
    const Vec centers[3] = {{0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 8; ++i) {
            pts.push_back({centers[k][0] + g(rng), centers[k][1] + g(rng)});
            labels.push_back(k + 1);
        }
    const LabeledDataset data(2, std::move(pts), std::move(labels),
                              LabelKind::Multiclass, 3);
    const MulticlassDirection dir = multiclass_adversarial_direction(data, 1, 2);
    const double n = norm2(dir.direction.v);
    CHECK(std::abs(dir.direction.v[0] / n - 1.0) < 0.05);
    CHECK(std::abs(dir.direction.v[1] / n) < 0.05);
}

TEST_CASE("pair direction flips class-k points on a trained ensemble") {
    const LabeledDataset data = make_clusters(3, 2, 10, 8.0, 41);
    const MulticlassDirection dir = multiclass_adversarial_direction(data, 2, 3);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        MulticlassTrainConfig cfg;
        cfg.seed = seed;
        const MulticlassLinear h =
            train_multiclass(data, MulticlassMode::HardOvr, cfg);
        if (!classifies_all(h, data)) continue;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.label(i) != 2) continue;
            const auto c = flip_search(label_fn(h), data.point(i),
                                       dir.direction.v, 1e6);
            CHECK(c.has_value());
        }
    }
}

TEST_CASE("soft pipeline rejects a class missing from one sample") {
    const LabeledDataset s1 = make_clusters(3, 2, 8, 8.0, 51);
    const LabeledDataset s2_full = make_clusters(3, 2, 8, 8.0, 52);
    const LabeledDataset s2 = s2_full.slice({1, 2});  // class 3 absent
    MulticlassTrainConfig cfg;
    cfg.soft.epochs = 20;
    cfg.soft.step = 0.05;
    cfg.soft.norm_cap = 0.5;
    cfg.seed = 9;
    const MulticlassSoftResult res = multiclass_soft_pipeline(s1, s2, 3, cfg);
    CHECK(!res.assumptions_ok);
    CHECK(!res.failure_reason.empty());
}

TEST_CASE("soft pipeline doubles the norm cap in the size bound") {
    const LabeledDataset s1 = make_clusters(3, 3, 400, 7.0, 61);
    const LabeledDataset s2 = make_clusters(3, 3, 400, 7.0, 62);
    MulticlassTrainConfig cfg;
    cfg.soft.epochs = 40;
    cfg.soft.step = 0.05;
    cfg.soft.norm_cap = 0.5;
    cfg.seed = 13;
    const MulticlassSoftResult res = multiclass_soft_pipeline(s1, s2, 1, cfg);
    REQUIRE(res.assumptions_ok);
    // rows obey |w_k| <= cap, so differences obey 2*cap; the bound must use
    // the doubled value, never the single-row cap
    CHECK(res.report.norm_bound <= 2.0 * cfg.soft.norm_cap + 1e-9);
    const double expect = soft_margin_size_bound(
        res.report.n, res.report.rho, res.report.norm_bound, res.report.radius);
    CHECK(res.size_bound == doctest::Approx(expect).epsilon(1e-12));
    if (res.size_bound > 0)
        CHECK(double(res.joint.set.size()) >= res.size_bound);
}
