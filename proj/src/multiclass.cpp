#include "advdir/multiclass.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "advdir/errors.hpp"
#include "advdir/seeding.hpp"

namespace advdir {

namespace {

void validate_multiclass_data(const LabeledDataset& data) {
    if (data.empty()) throw std::invalid_argument("empty multiclass dataset");
    if (data.label_kind() != LabelKind::Multiclass)
        throw std::invalid_argument("multiclass labels (1..K) required");
    if (data.class_count() < 2)
        throw std::invalid_argument("need at least 2 classes");
}

// class k against everyone else as a fresh binary dataset
LabeledDataset ovr_problem(const LabeledDataset& data, int k) {
    std::vector<Vec> points;
    std::vector<int> labels;
    points.reserve(data.size());
    labels.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        points.push_back(data.point(i));
        labels.push_back(data.label(i) == k ? +1 : -1);
    }
    return LabeledDataset(data.dim(), std::move(points), std::move(labels),
                          LabelKind::Binary);
}

void validate_pair(int k, int l, int classes) {
    if (k < 1 || k > classes || l < 1 || l > classes)
        throw std::invalid_argument("class index outside 1..K");
    if (k == l) throw std::invalid_argument("class pair must be distinct");
}

}  // namespace

Vec MulticlassLinear::scores(const Vec& x) const {
    if (rows.size() != bias.size() || rows.empty())
        throw std::invalid_argument("malformed one-vs-rest model");
    Vec s(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) s[k] = dot(rows[k], x) + bias[k];
    return s;
}

int MulticlassLinear::classify(const Vec& x) const {
    const Vec s = scores(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] > s[best]) best = k;
    return static_cast<int>(best) + 1;
}

MulticlassLinear train_multiclass(const LabeledDataset& data,
                                  MulticlassMode mode,
                                  const MulticlassTrainConfig& cfg) {
    validate_multiclass_data(data);
    const int classes = data.class_count();
    MulticlassLinear model;
    model.rows.reserve(classes);
    model.bias.reserve(classes);

    for (int k = 1; k <= classes; ++k) {
        const LabeledDataset ovr = ovr_problem(data, k);
        if (mode == MulticlassMode::HardOvr) {
            std::optional<LinearClassifier> h;
            for (std::size_t attempt = 0;
                 attempt < cfg.hard_attempts && !h; ++attempt)
                h = perceptron_fit(ovr, seed_mix(cfg.seed, k * 1000 + attempt),
                                   cfg.hard_epoch_cap, /*with_bias=*/true);
            if (!h)
                throw InfeasibleError("one-vs-rest split for class " +
                                      std::to_string(k) + " is not separable");
            model.rows.push_back(std::move(h->w));
            model.bias.push_back(h->b);
        } else {
            SoftTrainConfig row_cfg = cfg.soft;
            row_cfg.seed = seed_mix(cfg.seed, 7000 + k);
            LinearClassifier h = train_soft(ovr, row_cfg);
            model.rows.push_back(std::move(h.w));
            model.bias.push_back(0.0);
        }
    }
    return model;
}

bool classifies_all(const MulticlassLinear& h, const LabeledDataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i)
        if (h.classify(data.point(i)) != data.label(i)) return false;
    return true;
}

LinearClassifier reduce_pair(const MulticlassLinear& h, int k, int l) {
    validate_pair(k, l, h.classes());
    Vec w = sub(h.rows[k - 1], h.rows[l - 1]);
    if (norm2(w) == 0.0)
        throw std::invalid_argument("classes " + std::to_string(k) + " and " +
                                    std::to_string(l) +
                                    " have identical rows; no pair classifier");
    return LinearClassifier(std::move(w), h.bias[k - 1] - h.bias[l - 1]);
}

MulticlassDirection multiclass_adversarial_direction(const LabeledDataset& data,
                                                     int k, int l) {
    validate_multiclass_data(data);
    validate_pair(k, l, data.class_count());
    const LabeledDataset pair = data.slice({k, l}).relabel_binary(k, l);
    if (pair.empty())
        throw std::invalid_argument("no points labeled " + std::to_string(k) +
                                    " or " + std::to_string(l));
    MaxMarginSolution sol = train_max_margin(pair);
    MulticlassDirection out{
        make_direction(scaled(sol.classifier.w, -1.0), Provenance::ThmMulti,
                       data.content_hash(),
                       "pair k=" + std::to_string(k) + ",l=" + std::to_string(l) +
                           "; use -v at a point labeled l"),
        std::move(sol), k, l};
    return out;
}

MulticlassSoftResult multiclass_soft_pipeline(const LabeledDataset& s1,
                                              const LabeledDataset& s2,
                                              int k,
                                              const MulticlassTrainConfig& cfg) {
    validate_multiclass_data(s1);
    validate_multiclass_data(s2);
    if (s1.dim() != s2.dim()) throw std::invalid_argument("dimension mismatch");
    if (s1.class_count() != s2.class_count())
        throw std::invalid_argument("class count mismatch");
    const int classes = s1.class_count();
    if (k < 1 || k > classes)
        throw std::invalid_argument("class index outside 1..K");

    // A sample with no class-k points would make every class-k claim vacuous;
    // report that instead of quietly succeeding.
    if (s1.slice({k}).empty() || s2.slice({k}).empty()) {
        MulticlassSoftResult res;
        res.k = k;
        res.failure_reason = "class " + std::to_string(k) +
                             " has no points in one of the samples";
        return res;
    }

    MulticlassTrainConfig c1 = cfg, c2 = cfg;
    c1.seed = seed_mix(cfg.seed, 1);
    c2.seed = seed_mix(cfg.seed, 2);
    const MulticlassLinear h1 = train_multiclass(s1, MulticlassMode::SoftOvr, c1);
    const MulticlassLinear h2 = train_multiclass(s2, MulticlassMode::SoftOvr, c2);

    // A point of the (k,l) slice counts against rho unless the model both
    // classifies it correctly as a K-way model and gives it unit margin in
    // the reduced binary problem.
    auto rho_of = [&k](const MulticlassLinear& h, const LinearClassifier& red,
                       const LabeledDataset& slice, int l) {
        std::size_t bad = 0;
        for (std::size_t i = 0; i < slice.size(); ++i) {
            const Vec& x = slice.point(i);
            const int y = slice.label(i);  // +-1 after relabeling
            const bool correct = h.classify(x) == (y > 0 ? k : l);
            if (!(correct && y * red.score(x) >= 1.0)) ++bad;
        }
        return slice.empty() ? 1.0 : double(bad) / double(slice.size());
    };

    MulticlassSoftResult res;
    res.k = k;

    // partner class with the smallest worst-model rho
    double best_rho = 2.0;
    int best_l = 0;
    for (int l = 1; l <= classes; ++l) {
        if (l == k) continue;
        LabeledDataset t1 = s1.slice({k, l}).relabel_binary(k, l);
        LabeledDataset t2 = s2.slice({k, l}).relabel_binary(k, l);
        if (t1.empty() || t2.empty()) continue;
        double rho;
        try {
            rho = std::max(rho_of(h1, reduce_pair(h1, k, l), t1, l),
                           rho_of(h2, reduce_pair(h2, k, l), t2, l));
        } catch (const std::invalid_argument&) {
            continue;  // identical rows: pair carries no classifier
        }
        if (rho < best_rho) {
            best_rho = rho;
            best_l = l;
        }
    }
    if (best_l == 0) {
        res.failure_reason = "no partner class shares points with class k";
        return res;
    }
    res.l = best_l;
    if (best_rho >= 0.5) {
        res.failure_reason =
            "every partner class leaves rho >= 1/2 (bound vacuous)";
        return res;
    }

    // equalize the two relabeled slices by uniform truncation of the larger
    LabeledDataset t1 = s1.slice({k, best_l}).relabel_binary(k, best_l);
    LabeledDataset t2 = s2.slice({k, best_l}).relabel_binary(k, best_l);
    const std::size_t n = std::min(t1.size(), t2.size());
    auto truncate = [&](const LabeledDataset& t,
                        std::uint64_t salt) -> LabeledDataset {
        if (t.size() == n) return t;
        std::vector<std::size_t> rows(t.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        std::mt19937_64 rng(seed_mix(cfg.seed, salt));
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(n);
        std::sort(rows.begin(), rows.end());
        return t.take(rows);
    };
    t1 = truncate(t1, 3);
    t2 = truncate(t2, 4);

    LinearClassifier r1 = reduce_pair(h1, k, best_l);
    LinearClassifier r2 = reduce_pair(h2, k, best_l);
    res.reduced_first = r1;
    res.reduced_second = r2;

    res.report.n = n;
    res.report.rho =
        std::max(rho_of(h1, r1, t1, best_l), rho_of(h2, r2, t2, best_l));
    res.report.norm_bound = std::max(norm2(r1.w), norm2(r2.w));
    res.report.radius = std::max(t1.radius(), t2.radius());
    res.size_bound = soft_margin_size_bound(n, res.report.rho,
                                            res.report.norm_bound,
                                            res.report.radius);

    try {
        SoftDirection sd = transferable_direction_soft(r1, r2, t1, t2);
        res.joint = std::move(sd.joint);
        res.direction = make_direction(
            scaled(sd.direction.v, -1.0), Provenance::ThmMulti,
            sd.direction.dataset_hash,
            "pair k=" + std::to_string(k) + ",l=" + std::to_string(best_l) +
                "; moves class-k points out of k; negate for class l");
    } catch (const InfeasibleError& e) {
        res.failure_reason = e.what();
        return res;
    }
    res.assumptions_ok = true;
    return res;
}

}  // namespace advdir
