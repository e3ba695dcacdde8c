#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "advdir/attack.hpp"
#include "advdir/dataset.hpp"
#include "advdir/linear.hpp"
#include "advdir/maxmargin.hpp"
#include "advdir/relu.hpp"

using namespace advdir;

namespace {

GeneratorSpec planted_spec(std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::MarginPlanted;
    spec.dim = 3;
    spec.per_class = 20;
    spec.seed = seed;
    spec.separation = 1.5;
    return spec;
}

}  // namespace

TEST_CASE("flip search lands on the exact crossing scale") {
    const LinearClassifier h{{1.0, 0.0}, 0.0};
    const Vec x = {-2.0, 0.0};
    const auto c = flip_search(label_fn(h), x, {1.0, 0.0});
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(h.classify({x[0] + *c * 1.0, 0.0}) == +1);
}

TEST_CASE("flip search reports no crossing along a level direction") {
    const LinearClassifier h{{1.0, 0.0}, 0.0};
    const auto c = flip_search(label_fn(h), {-2.0, 0.0}, {0.0, 1.0});
    CHECK_FALSE(c.has_value());
}

TEST_CASE("flip search validates its arguments") {
    const LinearClassifier h{{1.0, 0.0}, 0.0};
    CHECK_THROWS_AS(flip_search(label_fn(h), {0.0, 0.0}, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(flip_search(label_fn(h), {0.0, 0.0}, {1.0, 0.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("the planar fixture separates linearly but traps the max-margin ray") {
    const CounterexampleFixture fx = counterexample_fixture();
    CHECK(fx.svm.classifier.w[0] == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(fx.svm.classifier.w[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(fx.svm.margin == doctest::Approx(1.0).epsilon(1e-7));
    for (std::size_t i = 0; i < fx.data.size(); ++i)
        CHECK(fx.relu.classify(fx.data.point(i)) == fx.data.label(i));

    // the -1 point rides w* upward forever without leaving the wedge
    const AdversarialDirection up = svm_adversarial_direction(fx.svm, -1);
    CHECK_FALSE(flip_search(label_fn(fx.relu), {0.0, -1.0}, up.v, 1e6)
                    .has_value());
    // while the linear classifier itself flips immediately
    CHECK(flip_search(label_fn(fx.svm.classifier), {0.0, -1.0}, up.v, 1e6)
              .has_value());
}

TEST_CASE("zero budget leaves the input untouched") {
    const LinearClassifier h{{3.0, 0.5}, 0.0};
    AttackConfig cfg;
    cfg.epsilon = 0.0;
    const Vec x = {0.4, -0.7};
    CHECK(pgd_attack(as_attackable(h), x, +1, cfg) == x);
}

TEST_CASE("raw-gradient iterates follow the closed form") {
    // w = (3, 0.5), start at the origin with label +1: every step subtracts
    // gamma * w until the first coordinate hits the budget wall.
    const LinearClassifier h{{3.0, 0.5}, 0.0};
    AttackConfig cfg;
    cfg.epsilon = 0.5;
    cfg.step = 0.01;
    cfg.iterations = 40;
    cfg.step_rule = AttackStep::RawGradient;
    const Vec xa = pgd_attack(as_attackable(h), {0.0, 0.0}, +1, cfg);
    CHECK(xa[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(xa[1] == doctest::Approx(-0.2).epsilon(1e-12));
}

TEST_CASE("signed steps saturate the box corner against the weight signs") {
    const LinearClassifier h{{3.0, -0.5}, 0.0};
    AttackConfig cfg;
    cfg.epsilon = 0.2;
    cfg.step = 0.01;
    cfg.iterations = 40;
    const Vec xa = pgd_attack(as_attackable(h), {0.0, 0.0}, +1, cfg);
    CHECK(xa[0] == doctest::Approx(-0.2).epsilon(1e-12));
    CHECK(xa[1] == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("iterates never leave the budget ball around the start point") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        ReluNetwork net;
        net.W = {Vec{gauss(rng), gauss(rng)}, Vec{gauss(rng), gauss(rng)},
                 Vec{gauss(rng), gauss(rng)}};
        net.b = {gauss(rng), gauss(rng), gauss(rng)};
        net.v = {std::abs(gauss(rng)), std::abs(gauss(rng)),
                 std::abs(gauss(rng))};
        const ReluClassifier clf{std::move(net), DecisionRule::OpenThreshold,
                                 0.3, NetClass::NonnegOutput};
        AttackConfig cfg;
        cfg.epsilon = 0.3;
        cfg.step = 0.05;
        cfg.iterations = 25;
        const Vec x = {gauss(rng), gauss(rng)};
        for (int y : {+1, -1}) {
            const Vec xa = pgd_attack(as_attackable(clf), x, y, cfg);
            for (std::size_t j = 0; j < x.size(); ++j)
                CHECK(std::abs(xa[j] - x[j]) <= cfg.epsilon + 1e-12);
        }
    }
}

TEST_CASE("box clipping keeps pixel-style inputs inside the unit cube") {
    const LinearClassifier h{{0.5, 0.5}, -0.4};
    AttackConfig cfg;
    cfg.epsilon = 0.6;
    cfg.step = 0.1;
    cfg.iterations = 20;
    cfg.clip_unit_box = true;
    const Vec xa = pgd_attack(as_attackable(h), {0.1, 0.9}, +1, cfg);
    for (double c : xa) {
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("noise perturbation respects the budget and is uniform") {
    const Vec x = {0.0};
    CHECK(random_perturbation(x, 0.0, 9) == x);

    // budget bound over many seeds
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Vec y = random_perturbation({0.3, -0.2}, 0.05, s);
        CHECK(std::abs(y[0] - 0.3) <= 0.05);
        CHECK(std::abs(y[1] + 0.2) <= 0.05);
    }

    // one-sample-per-seed empirical law vs the uniform CDF on [-1, 1];
    // 0.0163 is the 1% critical value 1.63/sqrt(10^4)
    const std::size_t n = 10000;
    std::vector<double> u;
    u.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        u.push_back(random_perturbation(x, 1.0, i)[0]);
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = (u[i] + 1.0) / 2.0;
        d = std::max(d, std::abs(cdf - double(i) / double(n)));
        d = std::max(d, std::abs(double(i + 1) / double(n) - cdf));
    }
    CHECK(d < 0.0163);
}

TEST_CASE("transfer matrix: shape, zero-budget column, and determinism") {
    const LabeledDataset data = generate(planted_spec(41));
    const auto linears = sample_accurate_linear(data, 2, 17);
    REQUIRE(linears.size() == 2);

    std::vector<ModelRef> attackers, victims;
    attackers.push_back({"linear", "a0", as_attackable(linears[0])});
    attackers.push_back({"linear", "a1", as_attackable(linears[1])});
    victims.push_back({"linear", "v0", as_attackable(linears[0])});
    victims.push_back({"linear", "v1", as_attackable(linears[1])});

    const std::vector<double> eps = {0.0, 0.1, 0.3};
    AttackConfig cfg;
    cfg.step = 0.02;
    cfg.iterations = 30;
    const TransferReport rep =
        transfer_matrix(attackers, victims, data, eps, cfg, 99);

    // (attackers + the noise baseline) x epsilons x victims
    CHECK(rep.entries.size() == (attackers.size() + 1) * eps.size() * 2);

    // every epsilon = 0 entry equals the victim's clean accuracy
    for (std::size_t vi = 0; vi < victims.size(); ++vi) {
        std::size_t correct = 0;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (linears[vi].classify(data.point(i)) == data.label(i)) ++correct;
        const double clean = double(correct) / double(data.size());
        for (const TransferEntry& e : rep.entries)
            if (e.epsilon == 0.0 && e.victim_id == victims[vi].id)
                CHECK(e.accuracy == doctest::Approx(clean).epsilon(1e-12));
    }

    const TransferReport again =
        transfer_matrix(attackers, victims, data, eps, cfg, 99);
    CHECK(rep.to_csv() == again.to_csv());
    CHECK(rep.summary_json() == again.summary_json());
}

TEST_CASE("noise baseline accuracy is monotone in the budget for halfspaces") {
    const LabeledDataset data = generate(planted_spec(8));
    const auto linears = sample_accurate_linear(data, 1, 3);
    std::vector<ModelRef> atk{{"linear", "a0", as_attackable(linears[0])}};
    std::vector<ModelRef> vic{{"linear", "v0", as_attackable(linears[0])}};
    std::vector<double> eps;
    for (int k = 0; k <= 8; ++k) eps.push_back(0.05 * k);
    const TransferReport rep =
        transfer_matrix(atk, vic, data, eps, AttackConfig{}, 1234);
    double prev = 2.0;
    for (double e : eps) {
        const double acc = rep.mean_accuracy("linear", "random", e);
        CHECK(acc <= prev + 1e-12);
        prev = acc;
    }
}

TEST_CASE("self attack with a generous budget empties the accuracy") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::TwoGaussians;
    spec.dim = 2;
    spec.per_class = 40;
    spec.seed = 6;
    spec.separation = 3.0;
    const LabeledDataset data = generate(spec);
    // weights scaled down so every score sits inside the active hinge band
    const LinearClassifier h{{0.1, 0.0}, 0.0};
    AttackConfig cfg;
    cfg.epsilon = 4.0;
    cfg.step = 0.1;
    cfg.iterations = 60;
    std::size_t correct = 0;
    const AttackableModel m = as_attackable(h);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vec xa = pgd_attack(m, data.point(i), data.label(i), cfg);
        if (h.classify(xa) == data.label(i)) ++correct;
    }
    CHECK(double(correct) / double(data.size()) <= 0.1);
}

TEST_CASE("one max-margin direction flips an entire accurate ensemble") {
    const LabeledDataset data = generate(planted_spec(12));
    const MaxMarginSolution sol = train_max_margin(data);
    const auto linears = sample_accurate_linear(data, 5, 7);
    REQUIRE(linears.size() == 5);
    for (int y : {+1, -1}) {
        const AdversarialDirection dir = svm_adversarial_direction(sol, y);
        const CrossFamilyReport rep =
            cross_family_direction_check(data, linears, {}, dir, y);
        CHECK(rep.attempted > 0);
        CHECK(rep.all_flipped());
        CHECK(rep.outcomes.size() == linears.size());
    }
}
