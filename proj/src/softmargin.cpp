#include "advdir/softmargin.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "advdir/errors.hpp"

namespace advdir {

LinearClassifier train_soft(const LabeledDataset& data,
                            const SoftTrainConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("soft training on empty dataset");
    if (data.label_kind() != LabelKind::Binary)
        throw std::invalid_argument("soft training needs binary labels");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cfg.step < 0) throw std::invalid_argument("step must be >= 0");
    if (cfg.norm_cap <= 0) throw std::invalid_argument("norm cap must be > 0");
    if (cfg.lambda < 0) throw std::invalid_argument("lambda must be >= 0");

    // start from the first positive point scaled to half the cap; fall back
    // to the first nonzero point of either sign
    Vec w(data.dim(), 0.0);
    bool placed = false;
    for (int want : {+1, -1}) {
        for (std::size_t i = 0; i < data.size() && !placed; ++i) {
            if (data.label(i) != want) continue;
            const double n = norm2(data.point(i));
            if (n == 0.0) continue;
            w = scaled(data.point(i), want * cfg.norm_cap / (2.0 * n));
            placed = true;
        }
        if (placed) break;
    }
    if (!placed)
        throw InfeasibleError("soft training: every point is the zero vector");

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            const Vec& x = data.point(i);
            const int y = data.label(i);
            if (cfg.lambda > 0) {
                const double shrink = 1.0 - cfg.step * cfg.lambda;
                if (shrink <= 0)
                    throw std::invalid_argument("step*lambda must be < 1");
                for (double& c : w) c *= shrink;
            }
            if (y * dot(w, x) < 1.0) axpy(cfg.step * y, x, w);
            const double n = norm2(w);
            if (n > cfg.norm_cap)
                for (double& c : w) c *= cfg.norm_cap / n;
        }
    }
    if (norm2(w) == 0.0)
        throw InfeasibleError("soft training collapsed to the zero vector");
    return LinearClassifier(std::move(w), 0.0);
}

std::pair<AssumptionReport, AssumptionReport> assess_assumptions(
    const LinearClassifier& h1, const LinearClassifier& h2,
    const LabeledDataset& s1, const LabeledDataset& s2) {
    if (s1.size() != s2.size())
        throw std::invalid_argument("samples must be equal-sized");
    if (s1.empty()) throw std::invalid_argument("samples are empty");
    if (s1.dim() != s2.dim()) throw std::invalid_argument("dimension mismatch");
    if (h1.b != 0.0 || h2.b != 0.0)
        throw std::invalid_argument(
            "transfer assumptions are for intercept-free classifiers");

    const double b_cap = std::max(norm2(h1.w), norm2(h2.w));
    const double radius = std::max(s1.radius(), s2.radius());

    auto rho_of = [](const LinearClassifier& h, const LabeledDataset& s) {
        std::size_t bad = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s.label(i) * dot(h.w, s.point(i)) < 1.0) ++bad;
        return double(bad) / double(s.size());
    };

    AssumptionReport r1{b_cap, radius, rho_of(h1, s1), s1.size()};
    AssumptionReport r2{b_cap, radius, rho_of(h2, s2), s2.size()};
    return {r1, r2};
}

double soft_margin_size_bound(std::size_t n, double rho, double b_cap,
                              double radius) {
    if (n == 0) throw std::invalid_argument("size bound needs n >= 1");
    if (rho < 0 || rho > 1) throw std::invalid_argument("rho must be in [0,1]");
    if (b_cap < 0 || radius < 0)
        throw std::invalid_argument("cap and radius must be nonnegative");
    const double nd = double(n);
    return (1.0 - 2.0 * rho) * nd - 2.0 * b_cap * radius * std::sqrt(nd) -
           4.0 * std::sqrt(nd * std::log(nd));
}

JointSubset joint_correct_subset(const LinearClassifier& h1,
                                 const LinearClassifier& h2,
                                 const LabeledDataset& s1,
                                 const LabeledDataset& s2) {
    if (s1.dim() != s2.dim()) throw std::invalid_argument("dimension mismatch");
    std::vector<Vec> points;
    std::vector<int> labels;
    JointSubset out;
    auto scan = [&](const LabeledDataset& s, std::size_t& tally) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Vec& x = s.point(i);
            const int y = s.label(i);
            if (h1.classify(x) == y && h2.classify(x) == y) {
                points.push_back(x);
                labels.push_back(y);
                ++tally;
            }
        }
    };
    scan(s1, out.from_first);
    scan(s2, out.from_second);
    if (!points.empty())
        out.set = LabeledDataset(s1.dim(), std::move(points), std::move(labels),
                                 LabelKind::Binary);
    return out;
}

SoftDirection transferable_direction_soft(const LinearClassifier& h1,
                                          const LinearClassifier& h2,
                                          const LabeledDataset& s1,
                                          const LabeledDataset& s2) {
    JointSubset joint = joint_correct_subset(h1, h2, s1, s2);
    if (joint.set.size() < 2 || joint.set.present_labels().size() < 2)
        throw InfeasibleError(
            "jointly correct subset too small to carry a max-margin direction");
    MaxMarginSolution sol =
        train_max_margin(joint.set, 1e-8, MarginMode::NoBias);
    AdversarialDirection dir =
        make_direction(sol.classifier.w, Provenance::ThmSvm,
                       joint.set.content_hash(),
                       "joint-subset max-margin; use -y*v at a point labeled y");
    return SoftDirection{std::move(dir), std::move(joint), std::move(sol)};
}

}  // namespace advdir
