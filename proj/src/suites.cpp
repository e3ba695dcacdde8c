#include "advdir/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "advdir/errors.hpp"
#include "advdir/idx_io.hpp"
#include "advdir/seeding.hpp"

namespace advdir {

namespace {

std::string fmtd(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmtz(std::size_t x) { return std::to_string(x); }

double unit_uniform(std::mt19937_64& rng) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool flips(const LabelFn& label, const Vec& x, const Vec& v, double c) {
    return label(ray_point(x, c, v)) != label(x);
}

}  // namespace

std::string SuiteResult::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += row[i];
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// svm-hard: on separable data the negated max-margin direction flips every
// point of every accurate classifier, and every accurate classifier's weight
// has positive inner product with w*.

SuiteResult run_svm_hard_suite(std::size_t trials, std::uint64_t seed,
                               const SuiteScale& scale) {
    SuiteResult res;
    res.id = "svm-hard";
    res.header = {"trial", "dim",          "n",
                  "classifiers", "pairs",  "dot_failures",
                  "flip_failures"};
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed_mix(seed, t));
        GeneratorSpec gspec;
        gspec.kind = GeneratorKind::MarginPlanted;
        gspec.dim = 2 + rng() % 9;        // 2..10
        gspec.per_class = 3 + rng() % 23; // n <= 50
        gspec.separation = 0.5 + 1.5 * unit_uniform(rng);
        gspec.seed = seed_mix(seed, t * 3 + 1);
        const LabeledDataset data = generate(gspec);

        const MaxMarginSolution sol = train_max_margin(data);
        const auto ens = sample_accurate_linear(
            data, scale.classifiers_per_trial, seed_mix(seed, t * 3 + 2));
        const AdversarialDirection dpos =
            svm_adversarial_direction(sol, +1, data.content_hash());
        const AdversarialDirection dneg =
            svm_adversarial_direction(sol, -1, data.content_hash());

        std::size_t pairs = 0, dot_failures = 0, flip_failures = 0;
        for (const LinearClassifier& h : ens) {
            if (dot(h.w, sol.classifier.w) <= 0.0) ++dot_failures;
            const LabelFn label = label_fn(h);
            for (std::size_t i = 0; i < data.size(); ++i) {
                ++pairs;
                const Vec& v = data.label(i) > 0 ? dpos.v : dneg.v;
                if (!flip_search(label, data.point(i), v)) ++flip_failures;
            }
        }
        res.rows.push_back({fmtz(t), fmtz(gspec.dim), fmtz(data.size()),
                            fmtz(ens.size()), fmtz(pairs), fmtz(dot_failures),
                            fmtz(flip_failures)});
        if (dot_failures + flip_failures > 0) ++res.failures;
    }
    return res;
}

// ---------------------------------------------------------------------------
// svm-bound: quantitative flip thresholds. Every c just above the per-point
// bound flips; when the bound is tight (h's weight nearly realizes the dual
// lower bound on <w_h, w*>) nothing flips just below it; the universal
// constant (sum alpha)^-1 flips the minimum-margin point.

SuiteResult run_svm_bound_suite(std::size_t trials, std::uint64_t seed,
                                const SuiteScale& scale) {
    SuiteResult res;
    res.id = "svm-bound";
    res.header = {"trial",          "dim",      "n",
                  "classifiers",    "checks",   "upper_failures",
                  "lower_failures", "corollary_failures"};
    const double up = 1e-6, slack = 1e-4;
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed_mix(seed, t));
        GeneratorSpec gspec;
        gspec.kind = GeneratorKind::MarginPlanted;
        gspec.dim = 2 + rng() % 9;
        gspec.per_class = 3 + rng() % 23;
        gspec.separation = 0.5 + 1.5 * unit_uniform(rng);
        gspec.seed = seed_mix(seed, t * 5 + 1);
        const LabeledDataset data = generate(gspec);

        const MaxMarginSolution sol = train_max_margin(data);
        auto ens = sample_accurate_linear(data, scale.classifiers_per_trial,
                                          seed_mix(seed, t * 5 + 2));
        ens.push_back(sol.classifier);  // the tight member

        double alpha_sum = 0.0;
        for (double a : sol.alphas) alpha_sum += a;
        const double c_univ = universal_constant(sol);

        std::size_t checks = 0, upper_failures = 0, lower_failures = 0,
                    corollary_failures = 0;
        for (const LinearClassifier& h : ens) {
            const double gamma_h = margin(h, data);
            const LabelFn label = label_fn(h);
            std::size_t min_idx = 0;
            double min_marg = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < data.size(); ++i) {
                const double m = data.label(i) * h.score(data.point(i));
                if (m < min_marg) {
                    min_marg = m;
                    min_idx = i;
                }
            }
            // lower check applies only when the proof's inner-product
            // inequality is (numerically) an equality for this classifier
            const double ip = dot(h.w, sol.classifier.w);
            const bool tight =
                std::abs(ip - gamma_h * alpha_sum) <= 1e-7 * std::abs(ip);

            for (std::size_t i = 0; i < data.size(); ++i) {
                ++checks;
                const Vec& x = data.point(i);
                const int y = data.label(i);
                const Vec v = scaled(sol.classifier.w, -double(y));
                const double bnd = scaling_bound(h, gamma_h, sol, x, y);
                if (!flips(label, x, v, bnd * (1 + up)) &&
                    !flips(label, x, v, bnd * (1 + slack)))
                    ++upper_failures;
                if (tight && flips(label, x, v, bnd * (1 - up)) &&
                    flips(label, x, v, bnd * (1 - slack)))
                    ++lower_failures;
            }
            {
                const Vec& x = data.point(min_idx);
                const int y = data.label(min_idx);
                const Vec v = scaled(sol.classifier.w, -double(y));
                if (!flips(label, x, v, c_univ * (1 + up)) &&
                    !flips(label, x, v, c_univ * (1 + slack)))
                    ++corollary_failures;
            }
        }
        res.rows.push_back({fmtz(t), fmtz(gspec.dim), fmtz(data.size()),
                            fmtz(ens.size()), fmtz(checks),
                            fmtz(upper_failures), fmtz(lower_failures),
                            fmtz(corollary_failures)});
        if (upper_failures + lower_failures + corollary_failures > 0)
            ++res.failures;
    }
    return res;
}

// ---------------------------------------------------------------------------
// soft-margin: two independent draws, two independently trained capped
// intercept-free classifiers; the jointly correct subset meets the
// (1-2rho)n - 2BRsqrt(n) - 4sqrt(n ln n) size bound and the joint max-margin
// direction flips both classifiers at every subset point.

SuiteResult run_soft_margin_suite(std::size_t trials, std::uint64_t seed,
                                  const SuiteScale& scale) {
    SuiteResult res;
    res.id = "soft-margin";
    res.header = {"trial",  "n",          "rho1",        "rho2",
                  "b_cap",  "radius",     "bound",       "from_first",
                  "from_second", "flip_failures"};
    const std::size_t n = std::max<std::size_t>(2, scale.soft_n);
    for (std::size_t t = 0; t < trials; ++t) {
        GeneratorSpec gspec;
        gspec.kind = GeneratorKind::TwoGaussians;
        gspec.dim = 10;
        gspec.per_class = n / 2;
        gspec.separation = 6.0;

        gspec.seed = seed_mix(seed, t * 11 + 1);
        const LabeledDataset s1 = generate(gspec);
        gspec.seed = seed_mix(seed, t * 11 + 2);
        const LabeledDataset s2 = generate(gspec);

        SoftTrainConfig cfg;
        cfg.epochs = 30;
        cfg.step = 0.05;
        cfg.norm_cap = 1.0;
        cfg.seed = seed_mix(seed, t * 11 + 3);
        const LinearClassifier h1 = train_soft(s1, cfg);
        cfg.seed = seed_mix(seed, t * 11 + 4);
        const LinearClassifier h2 = train_soft(s2, cfg);

        const auto [r1, r2] = assess_assumptions(h1, h2, s1, s2);
        const double rho = std::max(r1.rho, r2.rho);
        const double bound =
            soft_margin_size_bound(r1.n, rho, r1.norm_bound, r1.radius);

        bool ok = true;
        std::size_t flip_failures = 0;
        std::size_t from_first = 0, from_second = 0;
        try {
            const SoftDirection sd = transferable_direction_soft(h1, h2, s1, s2);
            from_first = sd.joint.from_first;
            from_second = sd.joint.from_second;
            if (double(from_first) < bound || double(from_second) < bound)
                ok = false;
            const LabelFn l1 = label_fn(h1), l2 = label_fn(h2);
            for (std::size_t i = 0; i < sd.joint.set.size(); ++i) {
                const Vec& x = sd.joint.set.point(i);
                const Vec v =
                    scaled(sd.direction.v, -double(sd.joint.set.label(i)));
                if (!flip_search(l1, x, v)) ++flip_failures;
                if (!flip_search(l2, x, v)) ++flip_failures;
            }
        } catch (const InfeasibleError& e) {
            ok = false;
            res.notes.push_back("trial " + std::to_string(t) + ": " + e.what());
        }
        if (flip_failures > 0) ok = false;

        res.rows.push_back({fmtz(t), fmtz(r1.n), fmtd(r1.rho), fmtd(r2.rho),
                            fmtd(r1.norm_bound), fmtd(r1.radius), fmtd(bound),
                            fmtz(from_first), fmtz(from_second),
                            fmtz(flip_failures)});
        if (!ok) ++res.failures;
    }
    // the guarantee itself fails with probability <= 4/n^2 per trial
    res.allowed_failures = trials == 0
                               ? 0
                               : std::size_t(std::ceil(double(trials) * 4.0 /
                                                       (double(n) * double(n))));
    return res;
}

// ---------------------------------------------------------------------------
// multiclass-hard: for separable clusters and hard one-vs-rest ensembles the
// pair direction pushes class-k points out of the argmax (and class-l points
// with the negated direction) for every model.

SuiteResult run_multiclass_hard_suite(std::size_t trials, std::uint64_t seed,
                                      const SuiteScale& scale) {
    SuiteResult res;
    res.id = "multiclass-hard";
    res.header = {"trial", "k", "l", "models", "points", "flip_failures"};
    const int pair_table[3][2] = {{1, 2}, {2, 3}, {1, 3}};
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed_mix(seed, t));
        const std::size_t dim = 2 + rng() % 3;
        const std::size_t per_class = 15 + rng() % 11;
        const LabeledDataset data =
            make_clusters(3, dim, per_class, 10.0, seed_mix(seed, t * 13 + 1));

        const std::size_t models = std::max<std::size_t>(1, scale.ensemble_size / 2);
        std::vector<MulticlassLinear> ens;
        for (std::size_t m = 0; m < models; ++m) {
            MulticlassTrainConfig cfg;
            cfg.seed = seed_mix(seed, t * 13 + 2 + m);
            ens.push_back(train_multiclass(data, MulticlassMode::HardOvr, cfg));
        }

        const int k = pair_table[t % 3][0], l = pair_table[t % 3][1];
        const MulticlassDirection md = multiclass_adversarial_direction(data, k, l);
        const Vec back = scaled(md.direction.v, -1.0);

        std::size_t points = 0, flip_failures = 0;
        for (const MulticlassLinear& h : ens) {
            if (!classifies_all(h, data)) {  // hard OVR promises accuracy
                ++flip_failures;
                continue;
            }
            const LabelFn label = label_fn(h);
            for (std::size_t i = 0; i < data.size(); ++i) {
                const int y = data.label(i);
                if (y != k && y != l) continue;
                ++points;
                const Vec& v = y == k ? md.direction.v : back;
                if (!flip_search(label, data.point(i), v)) ++flip_failures;
            }
        }
        res.rows.push_back({fmtz(t), fmtz(std::size_t(k)), fmtz(std::size_t(l)),
                            fmtz(ens.size()), fmtz(points),
                            fmtz(flip_failures)});
        if (flip_failures > 0) ++res.failures;
    }
    return res;
}

// ---------------------------------------------------------------------------
// multiclass-soft: soft one-vs-rest models on independent cluster draws, the
// best partner class, the doubled-cap size bound, and joint-subset flips of
// both reduced classifiers.

SuiteResult run_multiclass_soft_suite(std::size_t trials, std::uint64_t seed,
                                      const SuiteScale& scale) {
    SuiteResult res;
    res.id = "multiclass-soft";
    res.header = {"trial",  "k",        "l",          "n",
                  "rho",    "b_cap",    "radius",     "bound",
                  "from_first", "from_second", "flip_failures"};
    const std::size_t n = std::max<std::size_t>(2, scale.soft_n);
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t per_class = n / 2;
        const LabeledDataset s1 =
            make_clusters(3, 4, per_class, 6.0, seed_mix(seed, t * 17 + 1));
        const LabeledDataset s2 =
            make_clusters(3, 4, per_class, 6.0, seed_mix(seed, t * 17 + 2));

        MulticlassTrainConfig cfg;
        cfg.soft.epochs = 40;
        cfg.soft.step = 0.05;
        cfg.soft.norm_cap = 0.5;
        cfg.seed = seed_mix(seed, t * 17 + 3);
        const int k = 1 + int(t % 3);

        const MulticlassSoftResult r = multiclass_soft_pipeline(s1, s2, k, cfg);
        bool ok = r.assumptions_ok;
        std::size_t flip_failures = 0;
        if (!r.assumptions_ok) {
            res.notes.push_back("trial " + std::to_string(t) + ": " +
                                r.failure_reason);
            res.rows.push_back({fmtz(t), fmtz(std::size_t(k)), "0", "0", "1",
                                "0", "0", "0", "0", "0", "0"});
        } else {
            if (double(r.joint.from_first) < r.size_bound ||
                double(r.joint.from_second) < r.size_bound)
                ok = false;
            const LabelFn l1 = label_fn(r.reduced_first);
            const LabelFn l2 = label_fn(r.reduced_second);
            for (std::size_t i = 0; i < r.joint.set.size(); ++i) {
                const Vec& x = r.joint.set.point(i);
                // direction.v moves class-k points; negate for class l
                const Vec v = r.joint.set.label(i) > 0
                                  ? r.direction.v
                                  : scaled(r.direction.v, -1.0);
                if (!flip_search(l1, x, v)) ++flip_failures;
                if (!flip_search(l2, x, v)) ++flip_failures;
            }
            if (flip_failures > 0) ok = false;
            res.rows.push_back({fmtz(t), fmtz(std::size_t(r.k)),
                                fmtz(std::size_t(r.l)), fmtz(r.report.n),
                                fmtd(r.report.rho), fmtd(r.report.norm_bound),
                                fmtd(r.report.radius), fmtd(r.size_bound),
                                fmtz(r.joint.from_first),
                                fmtz(r.joint.from_second),
                                fmtz(flip_failures)});
        }
        if (!ok) ++res.failures;
    }
    res.allowed_failures = trials == 0
                               ? 0
                               : std::size_t(std::ceil(double(trials) * 4.0 /
                                                       (double(n) * double(n))));
    return res;
}

// ---------------------------------------------------------------------------
// relu-convex helpers

namespace {

// Conjunction classifier from fully separating halfspaces: every row is
// strictly positive on the +1 points and strictly negative on the -1 points,
// so the all-positive rule is accurate and the +1 region is convex.
std::optional<ReluClassifier> make_conjunction(const LabeledDataset& data,
                                               const Vec& witness,
                                               std::size_t width,
                                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ReluNetwork net;
    for (std::size_t i = 0; i < width; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < 50 && !placed; ++attempt) {
            Vec w = witness;
            for (double& c : w) c += 0.2 * gauss(rng);
            const double wn = norm2(w);
            if (wn == 0.0) continue;
            for (double& c : w) c /= wn;
            double lo_pos = std::numeric_limits<double>::infinity();
            double hi_neg = -std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < data.size(); ++p) {
                const double s = dot(w, data.point(p));
                if (data.label(p) > 0)
                    lo_pos = std::min(lo_pos, s);
                else
                    hi_neg = std::max(hi_neg, s);
            }
            if (lo_pos <= hi_neg) continue;
            net.W.push_back(std::move(w));
            net.b.push_back(-0.5 * (lo_pos + hi_neg));
            placed = true;
        }
        if (!placed) return std::nullopt;
    }
    net.v.assign(width, 1.0);
    ReluClassifier clf{std::move(net), DecisionRule::AllPositive, 0.0,
                       NetClass::Conjunction};
    validate_net_class(clf);
    return clf;
}

// Untrained nonneg-output classifier for the convexity probe.
ReluClassifier random_rprime(std::size_t width, std::size_t dim,
                             std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ReluNetwork net;
    net.W.assign(width, Vec(dim));
    net.b.assign(width, 0.0);
    net.v.assign(width, 0.0);
    for (std::size_t i = 0; i < width; ++i) {
        for (double& c : net.W[i]) c = gauss(rng);
        net.b[i] = gauss(rng);
        net.v[i] = std::abs(gauss(rng));
    }
    const double a = 0.2 + 0.8 * unit_uniform(rng);
    const DecisionRule rule = rng() % 2 ? DecisionRule::OpenThreshold
                                        : DecisionRule::ClosedThreshold;
    ReluClassifier clf{std::move(net), rule, a, NetClass::NonnegOutput};
    validate_net_class(clf);
    return clf;
}

// Count convex-combination violations: pairs of -1 points whose blends leave
// the -1 region. Zero expected for any nonneg-output threshold classifier.
std::size_t probe_negative_convexity(const ReluClassifier& clf,
                                     const std::vector<Vec>& candidates,
                                     std::size_t pairs, std::size_t blends,
                                     std::uint64_t seed) {
    std::vector<const Vec*> neg;
    for (const Vec& x : candidates)
        if (clf.classify(x) == -1) neg.push_back(&x);
    if (neg.size() < 2) return 0;
    std::mt19937_64 rng(seed);
    std::size_t violations = 0;
    for (std::size_t p = 0; p < pairs; ++p) {
        const Vec& xa = *neg[rng() % neg.size()];
        const Vec& xb = *neg[rng() % neg.size()];
        for (std::size_t b = 0; b < blends; ++b) {
            const double lam = unit_uniform(rng);
            Vec mid(xa.size());
            for (std::size_t j = 0; j < mid.size(); ++j)
                mid[j] = (1 - lam) * xa[j] + lam * xb[j];
            if (clf.classify(mid) != -1) ++violations;
        }
    }
    return violations;
}

}  // namespace

// relu-convex: the difference direction x_beta - x_alpha flips every point a
// convex-(-1)-region classifier labels -1 (training points and off-sample
// alike); conjunction classifiers mirror the claim on their +1 side; convex
// combinations of -1 points stay -1.

SuiteResult run_relu_convex_suite(std::size_t trials, std::uint64_t seed,
                                  const SuiteScale& scale) {
    SuiteResult res;
    res.id = "relu-convex";
    res.header = {"trial",  "nets", "conjunctions",     "on_set_failures",
                  "off_set_failures", "probe_violations"};
    for (std::size_t t = 0; t < trials; ++t) {
        GeneratorSpec gspec;
        gspec.kind = GeneratorKind::MarginPlanted;
        gspec.dim = 3;
        gspec.per_class = 20;
        gspec.separation = 2.0;
        gspec.seed = seed_mix(seed, t * 19 + 1);
        const LabeledDataset data = generate(gspec);

        const std::size_t want = std::max<std::size_t>(2, scale.ensemble_size / 2);
        std::vector<ReluClassifier> nets = random_accurate_relu(
            data, 6, 3 * want, seed_mix(seed, t * 19 + 2));
        if (nets.size() > want) nets.resize(want);

        std::size_t alpha = data.size(), beta = data.size();
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.label(i) == -1 && alpha == data.size()) alpha = i;
            if (data.label(i) == +1 && beta == data.size()) beta = i;
        }
        const AdversarialDirection dir =
            convex_region_direction(data, alpha, beta);
        const Vec back = scaled(dir.v, -1.0);

        // off-sample trial points: low-discrepancy fill around the data
        const std::vector<Vec> fill =
            certificate_points(data, data.size() + 200);

        std::size_t on_failures = 0, off_failures = 0, probe_violations = 0;
        bool trained_enough = nets.size() >= 2;

        for (const ReluClassifier& clf : nets) {
            const LabelFn label = label_fn(clf);
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (clf.classify(data.point(i)) != -1) continue;
                if (!flip_search(label, data.point(i), dir.v)) ++on_failures;
            }
            std::size_t used = 0;
            for (const Vec& x : fill) {
                if (used >= 20) break;
                if (clf.classify(x) != -1) continue;
                ++used;
                if (!flip_search(label, x, dir.v)) ++off_failures;
            }
            probe_violations += probe_negative_convexity(
                clf, fill, 10, 5, seed_mix(seed, t * 19 + 7));
        }

        std::size_t conjunctions = 0;
        const Vec witness = planted_witness(gspec).w;
        for (std::size_t c = 0; c < 5; ++c) {
            auto clf = make_conjunction(data, witness, 4,
                                        seed_mix(seed, t * 19 + 8 + c));
            if (!clf) continue;
            ++conjunctions;
            const LabelFn label = label_fn(*clf);
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (clf->classify(data.point(i)) != +1) continue;
                if (!flip_search(label, data.point(i), back)) ++on_failures;
            }
            std::size_t used = 0;
            for (const Vec& x : fill) {
                if (used >= 20) break;
                if (clf->classify(x) != +1) continue;
                ++used;
                if (!flip_search(label, x, back)) ++off_failures;
            }
        }

        res.rows.push_back({fmtz(t), fmtz(nets.size()), fmtz(conjunctions),
                            fmtz(on_failures), fmtz(off_failures),
                            fmtz(probe_violations)});
        if (on_failures + off_failures + probe_violations > 0 ||
            !trained_enough || conjunctions == 0)
            ++res.failures;
        if (!trained_enough)
            res.notes.push_back("trial " + std::to_string(t) +
                                ": too few accurate networks");
    }
    return res;
}

// ---------------------------------------------------------------------------
// certificate: direct classification of random nonneg-output nets agrees with
// the explicit union-of-halfspaces membership test everywhere off the
// boundary band.

SuiteResult run_certificate_suite(std::size_t trials, std::uint64_t seed,
                                  const SuiteScale& scale) {
    SuiteResult res;
    res.id = "certificate";
    res.header = {"trial",  "width",   "dim",        "rule",
                  "points", "checked", "skipped",    "mismatches",
                  "sampled"};
    for (std::size_t t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed_mix(seed, t));
        const std::size_t width = 1 + rng() % 10;
        const std::size_t dim = 2 + rng() % 4;
        ReluClassifier clf = random_rprime(width, dim, seed_mix(seed, t * 23 + 1));
        if (t % 2) {
            clf.rule = DecisionRule::ClosedThreshold;
        }

        const Vec lo(dim, -6.0), hi(dim, 6.0);
        const std::vector<Vec> pts =
            halton_box(scale.certificate_points, dim, lo, hi);
        const CertificateReport rep = convexity_certificate(clf, pts);

        res.rows.push_back(
            {fmtz(t), fmtz(width), fmtz(dim),
             clf.rule == DecisionRule::OpenThreshold ? "open" : "closed",
             fmtz(pts.size()), fmtz(rep.checked), fmtz(rep.skipped_boundary),
             fmtz(rep.mismatches.size()), rep.sampled_fallback ? "1" : "0"});
        if (!rep.passed()) ++res.failures;
    }
    return res;
}

// ---------------------------------------------------------------------------
// cross-family: one difference direction flips 100% of the -1-classified
// training points across a mixed linear/network ensemble, while the reverse
// claim (the svm direction against the wedge network) fails by construction.

SuiteResult run_cross_family_suite(std::size_t trials, std::uint64_t seed,
                                   const SuiteScale& scale) {
    SuiteResult res;
    res.id = "cross-family";
    res.header = {"trial",     "linears", "relus",
                  "attempted", "flipped", "reverse_no_flip"};
    for (std::size_t t = 0; t < trials; ++t) {
        GeneratorSpec gspec;
        gspec.kind = GeneratorKind::MarginPlanted;
        gspec.dim = 3;
        gspec.per_class = 15;
        gspec.separation = 2.0;
        gspec.seed = seed_mix(seed, t * 29 + 1);
        const LabeledDataset data = generate(gspec);

        const auto linears = sample_accurate_linear(data, scale.ensemble_size,
                                                    seed_mix(seed, t * 29 + 2));
        std::vector<ReluClassifier> relus = random_accurate_relu(
            data, 6, 3 * scale.ensemble_size, seed_mix(seed, t * 29 + 3));
        const bool enough = relus.size() >= scale.ensemble_size;
        if (relus.size() > scale.ensemble_size)
            relus.resize(scale.ensemble_size);

        std::size_t alpha = data.size(), beta = data.size();
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.label(i) == -1 && alpha == data.size()) alpha = i;
            if (data.label(i) == +1 && beta == data.size()) beta = i;
        }
        const AdversarialDirection dir =
            convex_region_direction(data, alpha, beta);
        const CrossFamilyReport rep =
            cross_family_direction_check(data, linears, relus, dir, -1);

        // the same construction is not reversible: riding the max-margin
        // direction out of the wedge network's -1 cone never leaves it
        const CounterexampleFixture fx = counterexample_fixture();
        const AdversarialDirection rev = svm_adversarial_direction(
            fx.svm, -1, fx.data.content_hash());
        const bool reverse_no_flip =
            !flip_search(label_fn(fx.relu), fx.data.point(2), rev.v, 1e6)
                 .has_value();

        res.rows.push_back({fmtz(t), fmtz(linears.size()), fmtz(relus.size()),
                            fmtz(rep.attempted), fmtz(rep.flipped),
                            reverse_no_flip ? "1" : "0"});
        if (!rep.all_flipped() || !reverse_no_flip || !enough) ++res.failures;
        if (!enough)
            res.notes.push_back("trial " + std::to_string(t) +
                                ": too few accurate networks");
    }
    return res;
}

SuiteResult run_theorem_suite(const std::string& id, std::size_t trials,
                              std::uint64_t seed, const SuiteScale& scale) {
    if (id == "svm-hard") return run_svm_hard_suite(trials, seed, scale);
    if (id == "svm-bound") return run_svm_bound_suite(trials, seed, scale);
    if (id == "soft-margin") return run_soft_margin_suite(trials, seed, scale);
    if (id == "multiclass-hard")
        return run_multiclass_hard_suite(trials, seed, scale);
    if (id == "multiclass-soft")
        return run_multiclass_soft_suite(trials, seed, scale);
    if (id == "relu-convex") return run_relu_convex_suite(trials, seed, scale);
    if (id == "certificate") return run_certificate_suite(trials, seed, scale);
    if (id == "cross-family") return run_cross_family_suite(trials, seed, scale);
    throw std::invalid_argument("unknown suite id: " + id);
}

std::vector<std::string> theorem_suite_ids() {
    return {"svm-hard",        "svm-bound",       "soft-margin",
            "multiclass-hard", "multiclass-soft", "relu-convex",
            "certificate",     "cross-family"};
}

// ---------------------------------------------------------------------------
// transfer experiment

namespace {

// Centered synthetic benchmark with two separable signals. Coordinate 0 is a
// channel only a network can use: the -1 class sits in a blob at the origin
// and the +1 class splits into two lobes at +-lobe_off, so both classes share
// the same coordinate-0 mean and a linear model gains nothing from it.
// Coordinates 2.. carry a weak per-coordinate class-mean shift of alternating
// sign, which is all a linear model sees. A trained network keeps most of its
// score magnitude on the channel (so coherent pushes along the shift axis move
// it less than they move a linear victim) while its faint shift-coordinate
// sensitivities still agree in sign with the shift pattern, which a
// sign-of-gradient attacker amplifies to a full-budget push against linear
// victims. That imbalance, not any shared decision axis, is what the transfer
// matrix measures.
LabeledDataset make_transfer_synthetic(std::size_t per_class, std::size_t dim,
                                       std::uint64_t seed) {
    if (dim < 3) throw std::invalid_argument("transfer data needs dim >= 3");
    constexpr double kLobeOffset = 0.36;
    constexpr double kChannelSigma = 0.05;
    constexpr double kShift = 0.028;
    constexpr double kNoiseSigma = 0.06;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> spread(-0.2, 0.2);
    std::vector<Vec> points;
    std::vector<int> labels;
    auto emit = [&](double cx, int label) {
        Vec x(dim);
        x[0] = cx + kChannelSigma * gauss(rng);
        x[1] = spread(rng);
        for (std::size_t j = 2; j < dim; ++j) {
            const double sgn = (j % 2 == 0) ? 1.0 : -1.0;
            x[j] = sgn * label * kShift + kNoiseSigma * gauss(rng);
        }
        points.push_back(std::move(x));
        labels.push_back(label);
    };
    for (std::size_t i = 0; i < per_class; ++i)
        emit(i % 2 ? -kLobeOffset : kLobeOffset, +1);
    for (std::size_t i = 0; i < per_class; ++i) emit(0.0, -1);
    return LabeledDataset(dim, std::move(points), std::move(labels),
                          LabelKind::Binary);
}

double eval_accuracy(const LabelFn& label, const LabeledDataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (label(data.point(i)) == data.label(i)) ++correct;
    return double(correct) / double(data.size());
}

// Rescale a model's score to roughly unit spread over the sample. Labels are
// scale-invariant, but a hinge-based attack goes dormant on points whose
// scaled margin already exceeds one, so an overgrown score norm would silently
// disarm the attacker; calibration keeps its gradient alive everywhere.
double score_spread(const std::vector<double>& mags) {
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    return sorted[std::size_t(0.95 * double(sorted.size() - 1))];
}

void calibrate_scores(ReluClassifier& clf, const LabeledDataset& data) {
    std::vector<double> mags;
    mags.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        mags.push_back(std::abs(clf.net.forward(data.point(i)) - clf.a));
    if (mags.empty()) return;
    const double q = score_spread(mags);
    if (q <= 0) return;
    for (double& vi : clf.net.v) vi /= q;
    clf.a /= q;
}

void calibrate_scores(LinearClassifier& h, const LabeledDataset& data) {
    std::vector<double> mags;
    mags.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        mags.push_back(std::abs(h.score(data.point(i))));
    if (mags.empty()) return;
    const double q = score_spread(mags);
    if (q <= 0) return;
    for (double& c : h.w) c /= q;
    h.b /= q;
}

}  // namespace

TransferExperimentResult run_transfer_experiment(
    const TransferExperimentConfig& cfg) {
    if (cfg.linear_models == 0 || cfg.relu_models == 0)
        throw std::invalid_argument("need at least one model per family");
    if (cfg.eval_points < 2) throw std::invalid_argument("eval set too small");
    if (cfg.train_per_model == 0)
        throw std::invalid_argument("empty training draws");
    if (cfg.eps_start <= 0 || cfg.eps_step <= 0 || cfg.eps_stop < cfg.eps_start)
        throw std::invalid_argument("bad epsilon grid");

    std::vector<double> epsilons;
    for (std::size_t k = 0;; ++k) {
        const double e = cfg.eps_start + double(k) * cfg.eps_step;
        if (e > cfg.eps_stop + 1e-9) break;
        epsilons.push_back(e);
    }

    const bool from_idx = !cfg.idx_images.empty();
    LabeledDataset idx_pool;
    std::vector<std::size_t> idx_order;
    std::size_t idx_cursor = 0;
    if (from_idx) {
        const LabeledDataset full = read_idx(cfg.idx_images, cfg.idx_labels);
        idx_pool = full.slice({cfg.digit_a + 1, cfg.digit_b + 1})
                       .relabel_binary(cfg.digit_a + 1, cfg.digit_b + 1);
        if (idx_pool.size() < 2 * cfg.train_per_model + cfg.eval_points)
            throw InfeasibleError("idx subset too small for the requested draws");
        idx_order.resize(idx_pool.size());
        std::iota(idx_order.begin(), idx_order.end(), std::size_t{0});
        std::mt19937_64 rng(seed_mix(cfg.seed, 77));
        std::shuffle(idx_order.begin(), idx_order.end(), rng);
    }
    auto next_draw = [&](std::size_t points_per_class,
                         std::uint64_t salt) -> LabeledDataset {
        if (!from_idx) return make_transfer_synthetic(points_per_class, 16, salt);
        const std::size_t want = 2 * points_per_class;
        if (idx_cursor + want > idx_order.size())
            idx_cursor = 0;  // wrap: desk-scale files may be small
        std::vector<std::size_t> rows(idx_order.begin() + idx_cursor,
                                      idx_order.begin() + idx_cursor + want);
        idx_cursor += want;
        std::sort(rows.begin(), rows.end());
        return idx_pool.take(rows);
    };

    const LabeledDataset eval_set =
        next_draw(cfg.eval_points / 2, seed_mix(cfg.seed, 500));

    AttackConfig atk = cfg.attack;
    atk.clip_unit_box = from_idx;  // pixels stay in [0,1]; synthetic data is unconstrained

    TransferExperimentResult out;
    std::vector<ModelRef> models;
    double clean_linear = 0.0, clean_relu = 0.0;

    for (std::size_t i = 0; i < cfg.linear_models; ++i) {
        const LabeledDataset draw =
            next_draw(cfg.train_per_model, seed_mix(cfg.seed, 100 + i));
        SoftTrainConfig sc;
        sc.epochs = 300;
        sc.step = 0.1;
        sc.norm_cap = 8.0;
        sc.seed = seed_mix(cfg.seed, 1000 + i);
        LinearClassifier h = train_soft(draw, sc);
        calibrate_scores(h, draw);
        clean_linear += eval_accuracy(label_fn(h), eval_set);
        models.push_back(ModelRef{"linear", "lin" + std::to_string(i),
                                  as_attackable(h)});
    }
    clean_linear /= double(cfg.linear_models);

    for (std::size_t i = 0; i < cfg.relu_models; ++i) {
        const LabeledDataset draw =
            next_draw(cfg.train_per_model, seed_mix(cfg.seed, 200 + i));
        ReluTrainConfig rc;
        rc.epochs = 300;
        rc.step = 0.05;
        rc.threshold = 2.0;
        rc.init_scale = 1.0;
        ReluTrainResult best;
        for (std::size_t attempt = 0; attempt < 10; ++attempt) {
            rc.seed = seed_mix(cfg.seed, 2000 + i * 37 + attempt);
            best = train_relu_constrained(draw, cfg.relu_width, rc);
            if (best.s_accurate) break;
        }
        calibrate_scores(best.classifier, draw);
        clean_relu += eval_accuracy(label_fn(best.classifier), eval_set);
        models.push_back(ModelRef{"relu", "net" + std::to_string(i),
                                  as_attackable(best.classifier)});
    }
    clean_relu /= double(cfg.relu_models);

    out.report = transfer_matrix(models, models, eval_set, epsilons, atk,
                                 seed_mix(cfg.seed, 999));
    out.epsilons = std::move(epsilons);
    out.clean_linear_accuracy = clean_linear;
    out.clean_relu_accuracy = clean_relu;
    return out;
}

}  // namespace advdir
