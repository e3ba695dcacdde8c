#include <doctest.h>

#include <cmath>
#include <vector>

#include "advdir/attack.hpp"
#include "advdir/dataset.hpp"
#include "advdir/linear.hpp"
#include "advdir/maxmargin.hpp"
#include "oracles.hpp"

using namespace advdir;

namespace {

LabeledDataset planar_three_points() {
    return LabeledDataset(2, {{1.0, 1.0}, {-1.0, 1.0}, {0.0, -1.0}},
                          {+1, +1, -1}, LabelKind::Binary);
}

LabeledDataset axis_pair() {
    return LabeledDataset(2, {{-1.0, 0.0}, {1.0, 0.0}}, {-1, +1},
                          LabelKind::Binary);
}

}  // namespace

TEST_CASE("axis-aligned pair: solver matches the hand-solved dual") {
    const MaxMarginSolution sol = train_max_margin(axis_pair());
    CHECK(sol.classifier.w[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.classifier.w[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(sol.classifier.b) < 1e-9);
    CHECK(sol.margin == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(sol.alphas.size() == 2);
    // canonical dual solved by hand: lambda = (1/2, 1/2), |w| = 1
    CHECK(sol.alphas[0] == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(sol.alphas[1] == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("planar three-point set: w* = (0,1), b* = 0, alpha = (1/4,1/4,1/2)") {
    const MaxMarginSolution sol = train_max_margin(planar_three_points());
    CHECK(std::abs(sol.classifier.w[0]) < 1e-7);
    CHECK(sol.classifier.w[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(sol.classifier.b) < 1e-7);
    CHECK(sol.margin == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(sol.alphas.size() == 3);
    CHECK(sol.alphas[0] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(sol.alphas[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(sol.alphas[2] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("solver invariants hold on random planted data") {
    for (std::uint64_t seed : {2u, 9u, 31u}) {
        GeneratorSpec spec;
        spec.kind = GeneratorKind::MarginPlanted;
        spec.dim = 4;
        spec.per_class = 5;
        spec.seed = seed;
        spec.separation = 1.0;
        const LabeledDataset data = generate(spec);
        const MaxMarginSolution sol = train_max_margin(data);

        // unit normal, dual feasibility, representation, support margins
        double nw = 0.0;
        for (double c : sol.classifier.w) nw += c * c;
        CHECK(std::sqrt(nw) == doctest::Approx(1.0).epsilon(1e-7));
        double bal = 0.0;
        Vec repr(data.dim(), 0.0);
        for (std::size_t i = 0; i < data.size(); ++i) {
            CHECK(sol.alphas[i] >= -1e-12);
            bal += sol.alphas[i] * data.label(i);
            axpy(sol.alphas[i] * data.label(i), data.point(i), repr);
        }
        CHECK(std::abs(bal) < 1e-7);
        CHECK(norm2(sub(repr, sol.classifier.w)) < 1e-6);
        for (std::size_t idx : sol.support_indices) {
            const double m = data.label(idx) *
                             (dot(sol.classifier.w, data.point(idx)) +
                              sol.classifier.b);
            CHECK(m == doctest::Approx(sol.margin).epsilon(1e-5));
        }
        CHECK(sol.margin >= spec.separation / 2.0 - 1e-6);

        // independent exhaustive active-set reference on the same points
        std::vector<std::vector<double>> xs;
        std::vector<int> ys;
        for (std::size_t i = 0; i < data.size(); ++i) {
            xs.push_back(data.point(i));
            ys.push_back(data.label(i));
        }
        auto ref = oracle::max_margin_reference(xs, ys, true);
        REQUIRE(ref.has_value());
        CHECK(sol.margin == doctest::Approx(ref->margin).epsilon(1e-6));
        double align = 0.0;
        for (std::size_t j = 0; j < data.dim(); ++j)
            align += sol.classifier.w[j] * ref->w_unit[j];
        CHECK(align == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(sol.classifier.b == doctest::Approx(ref->b_unit).epsilon(1e-5));
        for (std::size_t i = 0; i < data.size(); ++i)
            CHECK(sol.alphas[i] == doctest::Approx(ref->alpha[i]).epsilon(1e-4));
    }
}

TEST_CASE("no-bias mode pins the plane through the origin") {
    // asymmetric pair: with an intercept the midpoint would shift, without one
    // the near point is the only support vector
    const LabeledDataset data(2, {{2.0, 0.0}, {-1.0, 0.0}}, {+1, -1},
                              LabelKind::Binary);
    const MaxMarginSolution sol =
        train_max_margin(data, 1e-8, MarginMode::NoBias);
    CHECK(sol.classifier.b == 0.0);
    CHECK(sol.classifier.w[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.margin == doctest::Approx(1.0).epsilon(1e-7));
    REQUIRE(sol.support_indices.size() == 1);
    CHECK(sol.support_indices[0] == 1);

    auto ref = oracle::max_margin_reference({{2.0, 0.0}, {-1.0, 0.0}}, {+1, -1},
                                            false);
    REQUIRE(ref.has_value());
    CHECK(sol.margin == doctest::Approx(ref->margin).epsilon(1e-8));
}

TEST_CASE("margin evaluation matches hand values") {
    const LabeledDataset data = planar_three_points();
    const LinearClassifier h{{0.0, 1.0}, 0.0};
    CHECK(margin(h, data) == doctest::Approx(1.0).epsilon(1e-12));

    const LinearClassifier wrong{{0.0, -1.0}, 0.0};
    CHECK(margin(wrong, data) < 0.0);

    const LinearClassifier scaled_h{{0.0, 3.0}, 0.0};
    CHECK(margin(scaled_h, data) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("svm direction is -y w* and antisymmetric in the label") {
    const MaxMarginSolution sol = train_max_margin(planar_three_points());
    const AdversarialDirection pos = svm_adversarial_direction(sol, +1, 0);
    CHECK(pos.v[0] == doctest::Approx(0.0).epsilon(1e-7));
    CHECK(pos.v[1] == doctest::Approx(-1.0).epsilon(1e-9));
    const AdversarialDirection neg = svm_adversarial_direction(sol, -1, 0);
    CHECK(neg.v[0] == doctest::Approx(-pos.v[0]).epsilon(1e-12));
    CHECK(neg.v[1] == doctest::Approx(-pos.v[1]).epsilon(1e-12));
}

TEST_CASE("scaling bound: hand cases and homogeneity") {
    const LabeledDataset pair = axis_pair();
    const MaxMarginSolution sol = train_max_margin(pair);
    const LinearClassifier& h = sol.classifier;
    const double gamma_h = margin(h, pair);

    // self-attack at x=(1,0): y<w,x> = 1, gamma_h = 1, sum alpha = 1
    const double b1 = scaling_bound(h, gamma_h, sol, pair.point(1), +1);
    CHECK(b1 == doctest::Approx(1.0).epsilon(1e-7));

    // a point at twice the margin doubles the bound
    const Vec far = {2.0, 0.0};
    CHECK(scaling_bound(h, gamma_h, sol, far, +1) ==
          doctest::Approx(2.0 * b1).epsilon(1e-7));

    // on the margin the bound collapses to 1/sum(alpha)
    CHECK(b1 == doctest::Approx(universal_constant(sol)).epsilon(1e-7));
}

TEST_CASE("universal constant equals the achieved margin after normalization") {
    const MaxMarginSolution pair_sol = train_max_margin(axis_pair());
    CHECK(universal_constant(pair_sol) == doctest::Approx(1.0).epsilon(1e-7));

    const MaxMarginSolution tri = train_max_margin(planar_three_points());
    CHECK(universal_constant(tri) ==
          doctest::Approx(tri.margin).epsilon(1e-6));

    // a point sitting exactly on the +1 margin flips just above the constant
    const Vec margin_point = scaled(tri.classifier.w, tri.margin);
    const auto flip = flip_search(label_fn(tri.classifier), margin_point,
                                  svm_adversarial_direction(tri, +1, 0).v, 10.0);
    REQUIRE(flip.has_value());
    CHECK(*flip > universal_constant(tri));
    CHECK(*flip == doctest::Approx(universal_constant(tri)).epsilon(1e-4));
}

TEST_CASE("solution json round-trips bit-exactly") {
    const MaxMarginSolution sol = train_max_margin(planar_three_points());
    const std::string text = solution_to_json(sol);
    const MaxMarginSolution back = solution_from_json(text);
    CHECK(back.classifier.w == sol.classifier.w);
    CHECK(back.classifier.b == sol.classifier.b);
    CHECK(back.margin == sol.margin);
    CHECK(back.alphas == sol.alphas);
    CHECK(back.support_indices == sol.support_indices);
    CHECK(back.mode == sol.mode);
    CHECK(solution_to_json(back) == text);
}
