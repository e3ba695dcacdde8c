#include "advdir/relu.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "advdir/errors.hpp"
#include "advdir/seeding.hpp"

namespace advdir {

namespace {

double relu(double z) { return z > 0.0 ? z : 0.0; }

void validate_shape(const ReluNetwork& net) {
    if (net.W.empty()) throw std::invalid_argument("network has no hidden units");
    const std::size_t d = net.W.front().size();
    if (d == 0) throw std::invalid_argument("network input dim must be >= 1");
    for (const Vec& row : net.W)
        if (row.size() != d)
            throw std::invalid_argument("ragged weight rows");
    if (net.b.size() != net.W.size() || net.v.size() != net.W.size())
        throw std::invalid_argument("bias/output size != width");
}

}  // namespace

Vec ReluNetwork::preactivation(const Vec& x) const {
    Vec z(W.size());
    for (std::size_t i = 0; i < W.size(); ++i) z[i] = dot(W[i], x) + b[i];
    return z;
}

double ReluNetwork::forward(const Vec& x) const {
    double f = 0.0;
    for (std::size_t i = 0; i < W.size(); ++i)
        f += v[i] * relu(dot(W[i], x) + b[i]);
    return f;
}

int ReluClassifier::classify(const Vec& x) const {
    switch (rule) {
        case DecisionRule::OpenThreshold:
            return net.forward(x) > a ? +1 : -1;
        case DecisionRule::ClosedThreshold:
            return net.forward(x) >= a ? +1 : -1;
        case DecisionRule::AllPositive: {
            const Vec z = net.preactivation(x);
            for (double zi : z)
                if (!(zi > 0.0)) return -1;
            return +1;
        }
    }
    return -1;
}

void validate_net_class(const ReluClassifier& clf) {
    validate_shape(clf.net);
    switch (clf.net_class) {
        case NetClass::General:
            break;
        case NetClass::OnesOutput:
            for (double vi : clf.net.v)
                if (vi != 1.0)
                    throw std::invalid_argument(
                        "ones-output class requires v = (1..1)");
            if (clf.rule != DecisionRule::OpenThreshold || clf.a != 0.0)
                throw std::invalid_argument(
                    "ones-output class requires the open rule at a = 0");
            break;
        case NetClass::NonnegOutput:
            for (double vi : clf.net.v)
                if (vi < 0.0)
                    throw std::invalid_argument(
                        "nonneg-output class requires v >= 0");
            if (clf.rule == DecisionRule::AllPositive)
                throw std::invalid_argument(
                    "nonneg-output class uses a threshold rule");
            if (clf.a <= 0.0)
                throw std::invalid_argument(
                    "nonneg-output class requires threshold a > 0");
            break;
        case NetClass::Conjunction:
            if (clf.rule != DecisionRule::AllPositive)
                throw std::invalid_argument(
                    "conjunction class uses the all-positive rule");
            break;
    }
}

ReluTrainResult train_relu_constrained(const LabeledDataset& data,
                                       std::size_t width,
                                       const ReluTrainConfig& cfg) {
    if (data.empty()) throw std::invalid_argument("training on empty dataset");
    if (data.label_kind() != LabelKind::Binary)
        throw std::invalid_argument("network training needs binary labels");
    if (width == 0) throw std::invalid_argument("width must be >= 1");
    if (cfg.threshold <= 0) throw std::invalid_argument("threshold must be > 0");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (cfg.step <= 0) throw std::invalid_argument("step must be > 0");

    const std::size_t d = data.dim();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.5, 1.5);

    ReluNetwork net;
    net.W.assign(width, Vec(d));
    net.b.assign(width, 0.0);
    net.v.assign(width, 0.0);
    const double w_scale = cfg.init_scale / std::sqrt(double(d));
    for (std::size_t i = 0; i < width; ++i) {
        for (double& c : net.W[i]) c = w_scale * gauss(rng);
        net.b[i] = 0.3 * cfg.init_scale * gauss(rng);
        net.v[i] = unif(rng) * 2.0 * cfg.threshold / double(width);
    }

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const Vec& x = data.point(idx);
            const int y = data.label(idx);
            const Vec z = net.preactivation(x);
            double f = 0.0;
            for (std::size_t i = 0; i < width; ++i) f += net.v[i] * relu(z[i]);
            const double m = y * (f - cfg.threshold);
            if (m >= 1.0) continue;
            // squared hinge: ascend y*(f-a) with weight (1-m)
            const double coef = 2.0 * cfg.step * (1.0 - m) * y;
            for (std::size_t i = 0; i < width; ++i) {
                const double vi = net.v[i];
                net.v[i] += coef * relu(z[i]);
                if (net.v[i] < 0.0) net.v[i] = 0.0;
                if (z[i] > 0.0) {
                    axpy(coef * vi, x, net.W[i]);
                    net.b[i] += coef * vi;
                }
            }
        }
    }

    ReluClassifier clf{std::move(net), DecisionRule::OpenThreshold,
                       cfg.threshold, NetClass::NonnegOutput};
    validate_net_class(clf);
    const bool ok = classifies_all(clf, data);
    return ReluTrainResult{std::move(clf), ok};
}

bool classifies_all(const ReluClassifier& clf, const LabeledDataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i)
        if (clf.classify(data.point(i)) != data.label(i)) return false;
    return true;
}

std::vector<ReluClassifier> random_accurate_relu(const LabeledDataset& data,
                                                 std::size_t width,
                                                 std::size_t attempts,
                                                 std::uint64_t seed,
                                                 const ReluTrainConfig& base) {
    std::vector<ReluClassifier> out;
    for (std::size_t t = 0; t < attempts; ++t) {
        ReluTrainConfig cfg = base;
        cfg.seed = seed_mix(seed, t);
        ReluTrainResult r = train_relu_constrained(data, width, cfg);
        if (r.s_accurate) out.push_back(std::move(r.classifier));
    }
    return out;
}

CertificateReport convexity_certificate(const ReluClassifier& clf,
                                        const std::vector<Vec>& trial_points,
                                        double boundary_band,
                                        std::size_t subset_cap,
                                        std::size_t sample_budget,
                                        std::uint64_t sample_seed) {
    validate_net_class(clf);
    if (clf.net_class != NetClass::NonnegOutput &&
        clf.net_class != NetClass::OnesOutput)
        throw std::invalid_argument(
            "certificate applies to nonneg-output threshold classifiers");
    if (boundary_band < 0) throw std::invalid_argument("band must be >= 0");

    const std::size_t width = clf.net.width();
    CertificateReport rep;

    // masks checked per point: every nonempty subset when width permits,
    // otherwise singletons + the point's active set + seeded random masks
    std::vector<std::uint64_t> sampled_masks;
    if (width > subset_cap) {
        rep.sampled_fallback = true;
        std::mt19937_64 rng(sample_seed);
        sampled_masks.reserve(sample_budget);
        const std::uint64_t full =
            width >= 64 ? ~0ull : ((1ull << width) - 1ull);
        for (std::size_t s = 0; s < sample_budget; ++s) {
            const std::uint64_t m = rng() & full;
            if (m != 0) sampled_masks.push_back(m);
        }
    }

    std::vector<double> q;
    if (!rep.sampled_fallback) q.assign(std::size_t{1} << width, 0.0);

    for (std::size_t pi = 0; pi < trial_points.size(); ++pi) {
        const Vec& x = trial_points[pi];
        if (x.size() != clf.net.dim())
            throw std::invalid_argument("trial point dimension mismatch");
        const Vec pre = clf.net.preactivation(x);
        Vec z(width);
        double f = 0.0;
        for (std::size_t i = 0; i < width; ++i) {
            z[i] = clf.net.v[i] * pre[i];
            if (pre[i] > 0.0) f += z[i];
        }
        if (std::abs(f - clf.a) <= boundary_band) {
            ++rep.skipped_boundary;
            continue;
        }

        double best = -std::numeric_limits<double>::infinity();
        if (!rep.sampled_fallback) {
            // subset sums via shared prefixes: drop the lowest set bit
            const std::size_t masks = std::size_t{1} << width;
            for (std::size_t m = 1; m < masks; ++m) {
                q[m] = q[m & (m - 1)] + z[std::countr_zero(m)];
                if (q[m] > best) best = q[m];
            }
            rep.subset_count = masks - 1;
        } else {
            std::uint64_t active = 0;
            for (std::size_t i = 0; i < width && i < 64; ++i)
                if (pre[i] > 0.0) active |= 1ull << i;
            auto mask_sum = [&](std::uint64_t m) {
                double s = 0.0;
                for (std::size_t i = 0; i < width && i < 64; ++i)
                    if (m & (1ull << i)) s += z[i];
                return s;
            };
            for (std::size_t i = 0; i < width && i < 64; ++i)
                best = std::max(best, mask_sum(1ull << i));
            if (active) best = std::max(best, mask_sum(active));
            for (std::uint64_t m : sampled_masks)
                best = std::max(best, mask_sum(m));
            rep.subset_count = sampled_masks.size() + width + 1;
        }

        const bool direct = clf.classify(x) == +1;
        const bool via_union = clf.rule == DecisionRule::OpenThreshold
                                   ? best > clf.a
                                   : best >= clf.a;
        ++rep.checked;
        if (direct != via_union)
            rep.mismatches.push_back(
                CertificateMismatch{pi, f, direct ? +1 : -1, best});
    }
    return rep;
}

namespace {

double radical_inverse(std::size_t i, std::size_t base) {
    double inv = 1.0 / double(base);
    double scale = inv;
    double r = 0.0;
    while (i > 0) {
        r += double(i % base) * scale;
        i /= base;
        scale *= inv;
    }
    return r;
}

constexpr std::size_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                   31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                                   73, 79, 83, 89, 97, 101, 103, 107, 109, 113};

}  // namespace

std::vector<Vec> halton_box(std::size_t count, std::size_t dim, const Vec& lo,
                            const Vec& hi) {
    if (dim == 0 || dim > std::size(kPrimes))
        throw std::invalid_argument("box dimension out of range");
    if (lo.size() != dim || hi.size() != dim)
        throw std::invalid_argument("box corner dimension mismatch");
    for (std::size_t j = 0; j < dim; ++j)
        if (!(lo[j] <= hi[j]))
            throw std::invalid_argument("box corners out of order");
    std::vector<Vec> pts;
    pts.reserve(count);
    for (std::size_t i = 1; i <= count; ++i) {
        Vec x(dim);
        for (std::size_t j = 0; j < dim; ++j)
            x[j] = lo[j] + radical_inverse(i, kPrimes[j]) * (hi[j] - lo[j]);
        pts.push_back(std::move(x));
    }
    return pts;
}

std::vector<Vec> certificate_points(const LabeledDataset& data,
                                    std::size_t count) {
    if (data.empty())
        throw std::invalid_argument("certificate points need a dataset");
    const std::size_t d = data.dim();
    std::vector<Vec> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < data.size() && pts.size() < count; ++i)
        pts.push_back(data.point(i));

    for (std::size_t i = 0; i < data.size() && pts.size() < count; ++i)
        for (std::size_t j = i + 1; j < data.size() && pts.size() < count; ++j) {
            if (data.label(i) == data.label(j)) continue;
            Vec m(d);
            for (std::size_t c = 0; c < d; ++c)
                m[c] = 0.5 * (data.point(i)[c] + data.point(j)[c]);
            pts.push_back(std::move(m));
        }

    if (pts.size() < count) {
        Vec lo(d, std::numeric_limits<double>::infinity());
        Vec hi(d, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < data.size(); ++i)
            for (std::size_t c = 0; c < d; ++c) {
                lo[c] = std::min(lo[c], data.point(i)[c]);
                hi[c] = std::max(hi[c], data.point(i)[c]);
            }
        for (std::size_t c = 0; c < d; ++c) {
            const double center = 0.5 * (lo[c] + hi[c]);
            const double half =
                hi[c] > lo[c] ? (hi[c] - lo[c]) : 1.0;  // inflated 2x
            lo[c] = center - half;
            hi[c] = center + half;
        }
        for (Vec& x : halton_box(count - pts.size(), d, lo, hi))
            pts.push_back(std::move(x));
    }
    return pts;
}

AdversarialDirection convex_region_direction(const LabeledDataset& data,
                                             std::size_t alpha_index,
                                             std::size_t beta_index) {
    if (alpha_index >= data.size() || beta_index >= data.size())
        throw std::invalid_argument("endpoint index out of range");
    if (data.label(alpha_index) == data.label(beta_index))
        throw std::invalid_argument("endpoints must carry different labels");
    Vec v = sub(data.point(beta_index), data.point(alpha_index));
    if (norm2(v) == 0.0)
        throw std::invalid_argument("endpoints coincide; direction is zero");
    return make_direction(
        std::move(v), Provenance::ThmConvex, data.content_hash(),
        "alpha=" + std::to_string(alpha_index) +
            " (label " + std::to_string(data.label(alpha_index)) + "), beta=" +
            std::to_string(beta_index) + " (label " +
            std::to_string(data.label(beta_index)) + ")");
}

namespace {

const char* rule_name(DecisionRule r) {
    switch (r) {
        case DecisionRule::OpenThreshold: return "open";
        case DecisionRule::ClosedThreshold: return "closed";
        case DecisionRule::AllPositive: return "all-positive";
    }
    return "open";
}

DecisionRule rule_from_name(const std::string& s) {
    if (s == "open") return DecisionRule::OpenThreshold;
    if (s == "closed") return DecisionRule::ClosedThreshold;
    if (s == "all-positive") return DecisionRule::AllPositive;
    throw FormatError("unknown decision rule: " + s);
}

const char* class_name(NetClass c) {
    switch (c) {
        case NetClass::General: return "general";
        case NetClass::OnesOutput: return "ones";
        case NetClass::NonnegOutput: return "nonneg";
        case NetClass::Conjunction: return "conjunction";
    }
    return "general";
}

NetClass class_from_name(const std::string& s) {
    if (s == "general") return NetClass::General;
    if (s == "ones") return NetClass::OnesOutput;
    if (s == "nonneg") return NetClass::NonnegOutput;
    if (s == "conjunction") return NetClass::Conjunction;
    throw FormatError("unknown network class: " + s);
}

}  // namespace

std::string network_to_json(const ReluClassifier& clf) {
    validate_shape(clf.net);
    nlohmann::json j;
    j["W"] = clf.net.W;
    j["b"] = clf.net.b;
    j["v"] = clf.net.v;
    j["rule"] = rule_name(clf.rule);
    j["a"] = clf.a;
    j["class"] = class_name(clf.net_class);
    return j.dump(2);
}

ReluClassifier network_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("network json: ") + e.what());
    }
    try {
        ReluClassifier clf;
        clf.net.W = j.at("W").get<std::vector<Vec>>();
        clf.net.b = j.at("b").get<Vec>();
        clf.net.v = j.at("v").get<Vec>();
        clf.rule = rule_from_name(j.at("rule").get<std::string>());
        clf.a = j.at("a").get<double>();
        clf.net_class = class_from_name(j.value("class", "general"));
        validate_shape(clf.net);
        validate_net_class(clf);
        return clf;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("network json: ") + e.what());
    }
}

}  // namespace advdir
