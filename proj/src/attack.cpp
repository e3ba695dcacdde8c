#include "advdir/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "advdir/errors.hpp"
#include "advdir/seeding.hpp"

namespace advdir {

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace

LabelFn label_fn(const LinearClassifier& h) {
    return [h](const Vec& x) { return h.classify(x); };
}

LabelFn label_fn(const ReluClassifier& h) {
    return [h](const Vec& x) { return h.classify(x); };
}

LabelFn label_fn(const MulticlassLinear& h) {
    return [h](const Vec& x) { return h.classify(x); };
}

std::optional<double> flip_search(const LabelFn& label, const Vec& x,
                                  const Vec& v, double cap) {
    if (cap <= 0) throw std::invalid_argument("flip cap must be positive");
    if (norm2(v) == 0.0)
        throw std::invalid_argument("flip direction must be nonzero");

    const int base = label(x);
    auto flips_at = [&](double c) { return label(ray_point(x, c, v)) != base; };

    double lo = 0.0;
    double hi = -1.0;
    double probe = 1e-3;
    bool capped = false;
    while (true) {
        if (probe >= cap) {
            probe = cap;
            capped = true;
        }
        if (flips_at(probe)) {
            hi = probe;
            break;
        }
        lo = probe;
        if (capped) return std::nullopt;
        probe *= 2.0;
    }

    while (hi - lo > 1e-6 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (flips_at(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

AttackableModel as_attackable(const LinearClassifier& h) {
    AttackableModel m;
    m.score = [h](const Vec& x) { return h.score(x); };
    m.score_grad = [h](const Vec&) { return h.w; };
    m.label = [h](const Vec& x) { return h.classify(x); };
    return m;
}

AttackableModel as_attackable(const ReluClassifier& h) {
    AttackableModel m;
    if (h.rule == DecisionRule::AllPositive) {
        // signed score: the smallest preactivation
        m.score = [h](const Vec& x) {
            const Vec z = h.net.preactivation(x);
            return *std::min_element(z.begin(), z.end());
        };
        m.score_grad = [h](const Vec& x) {
            const Vec z = h.net.preactivation(x);
            const std::size_t i =
                std::min_element(z.begin(), z.end()) - z.begin();
            return h.net.W[i];
        };
    } else {
        m.score = [h](const Vec& x) { return h.net.forward(x) - h.a; };
        // relu'(0) = 0: only strictly active units contribute
        m.score_grad = [h](const Vec& x) {
            const Vec z = h.net.preactivation(x);
            Vec g(h.net.dim(), 0.0);
            for (std::size_t i = 0; i < h.net.width(); ++i)
                if (z[i] > 0.0) axpy(h.net.v[i], h.net.W[i], g);
            return g;
        };
    }
    m.label = [h](const Vec& x) { return h.classify(x); };
    return m;
}

Vec pgd_attack(const AttackableModel& model, const Vec& x, int y,
               const AttackConfig& cfg) {
    if (y != 1 && y != -1) throw std::invalid_argument("label must be +-1");
    if (cfg.epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
    if (cfg.step <= 0) throw std::invalid_argument("step must be > 0");
    if (cfg.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    if (cfg.epsilon == 0.0) return x;

    Vec xa = x;
    for (int it = 0; it < cfg.iterations; ++it) {
        const double z = y * model.score(xa);
        double weight = 0.0;
        if (1.0 - z > 0.0)
            weight = cfg.loss == AttackLoss::Hinge ? 1.0 : 2.0 * (1.0 - z);
        if (weight == 0.0) break;  // flat loss: no further movement

        const Vec g = model.score_grad(xa);
        for (std::size_t j = 0; j < xa.size(); ++j) {
            const double gj = -y * g[j] * weight;  // ascend the attack loss
            double d;
            if (cfg.step_rule == AttackStep::SignedGradient)
                d = gj > 0.0 ? 1.0 : (gj < 0.0 ? -1.0 : 0.0);
            else
                d = gj;
            double c = xa[j] + cfg.step * d;
            c = std::clamp(c, x[j] - cfg.epsilon, x[j] + cfg.epsilon);
            if (cfg.clip_unit_box) c = std::clamp(c, 0.0, 1.0);
            xa[j] = c;
        }
    }
    return xa;
}

Vec random_perturbation(const Vec& x, double epsilon, std::uint64_t seed) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be >= 0");
    if (epsilon == 0.0) return x;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-epsilon, epsilon);
    Vec out = x;
    for (double& c : out) c += noise(rng);
    return out;
}

TransferReport transfer_matrix(const std::vector<ModelRef>& attackers,
                               const std::vector<ModelRef>& victims,
                               const LabeledDataset& eval_set,
                               const std::vector<double>& epsilons,
                               const AttackConfig& base_cfg,
                               std::uint64_t noise_seed) {
    if (attackers.empty() || victims.empty())
        throw std::invalid_argument("need at least one attacker and one victim");
    if (eval_set.empty()) throw std::invalid_argument("empty evaluation set");
    if (eval_set.label_kind() != LabelKind::Binary)
        throw std::invalid_argument("transfer evaluation needs binary labels");
    if (epsilons.empty()) throw std::invalid_argument("no epsilons given");

    TransferReport rep;
    rep.epsilons = epsilons;
    const std::size_t n = eval_set.size();

    auto score_victims = [&](const std::vector<Vec>& crafted,
                             const std::string& fam, const std::string& id,
                             double eps) {
        for (const ModelRef& victim : victims) {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (victim.model.label(crafted[i]) == eval_set.label(i))
                    ++correct;
            rep.entries.push_back(TransferEntry{fam, id, victim.family,
                                                victim.id, eps,
                                                double(correct) / double(n)});
        }
    };

    std::vector<Vec> crafted(n);
    for (const ModelRef& attacker : attackers) {
        for (double eps : epsilons) {
            AttackConfig cfg = base_cfg;
            cfg.epsilon = eps;
            for (std::size_t i = 0; i < n; ++i)
                crafted[i] = pgd_attack(attacker.model, eval_set.point(i),
                                        eval_set.label(i), cfg);
            score_victims(crafted, attacker.family, attacker.id, eps);
        }
    }

    // Seeded uniform-noise baseline rides along as its own attacker. The seed
    // depends on the point but not on epsilon, so each point's noise direction
    // is fixed and the grid traces nested rays: growing the ball can never
    // improve the baseline's accuracy against a linear victim.
    for (std::size_t ei = 0; ei < epsilons.size(); ++ei) {
        for (std::size_t i = 0; i < n; ++i) {
            crafted[i] = random_perturbation(eval_set.point(i), epsilons[ei],
                                             seed_mix(noise_seed, i));
            if (base_cfg.clip_unit_box)
                for (double& c : crafted[i]) c = std::clamp(c, 0.0, 1.0);
        }
        score_victims(crafted, "random", "noise", epsilons[ei]);
    }
    return rep;
}

namespace {

// per-victim mean over attackers of `attacker_family` at epsilon
std::map<std::string, double> per_victim_means(
    const TransferReport& rep, const std::string& victim_family,
    const std::string& attacker_family, double epsilon) {
    std::map<std::string, std::pair<double, std::size_t>> acc;
    for (const TransferEntry& e : rep.entries) {
        if (e.victim_family != victim_family ||
            e.attacker_family != attacker_family)
            continue;
        if (std::abs(e.epsilon - epsilon) > 1e-9) continue;
        auto& slot = acc[e.victim_id];
        slot.first += e.accuracy;
        slot.second += 1;
    }
    std::map<std::string, double> out;
    for (auto& [id, slot] : acc) out[id] = slot.first / double(slot.second);
    if (out.empty())
        throw std::invalid_argument("no transfer entries match the query");
    return out;
}

}  // namespace

double TransferReport::mean_accuracy(const std::string& victim_family,
                                     const std::string& attacker_family,
                                     double epsilon) const {
    const auto means =
        per_victim_means(*this, victim_family, attacker_family, epsilon);
    double s = 0.0;
    for (auto& [id, m] : means) s += m;
    return s / double(means.size());
}

double TransferReport::min_accuracy(const std::string& victim_family,
                                    const std::string& attacker_family,
                                    double epsilon) const {
    const auto means =
        per_victim_means(*this, victim_family, attacker_family, epsilon);
    double lo = std::numeric_limits<double>::infinity();
    for (auto& [id, m] : means) lo = std::min(lo, m);
    return lo;
}

double TransferReport::max_accuracy(const std::string& victim_family,
                                    const std::string& attacker_family,
                                    double epsilon) const {
    const auto means =
        per_victim_means(*this, victim_family, attacker_family, epsilon);
    double hi = -std::numeric_limits<double>::infinity();
    for (auto& [id, m] : means) hi = std::max(hi, m);
    return hi;
}

std::string TransferReport::to_csv() const {
    std::string out =
        "attacker_family,attacker_id,victim_family,victim_id,epsilon,accuracy\n";
    for (const TransferEntry& e : entries) {
        out += e.attacker_family + ',' + e.attacker_id + ',' + e.victim_family +
               ',' + e.victim_id + ',' + fmt_double(e.epsilon) + ',' +
               fmt_double(e.accuracy) + '\n';
    }
    return out;
}

std::string TransferReport::summary_json() const {
    std::set<std::string> victim_fams, attacker_fams;
    for (const TransferEntry& e : entries) {
        victim_fams.insert(e.victim_family);
        attacker_fams.insert(e.attacker_family);
    }
    nlohmann::json j;
    j["epsilons"] = epsilons;
    for (const std::string& vf : victim_fams)
        for (const std::string& af : attacker_fams) {
            nlohmann::json curve = nlohmann::json::array();
            for (double eps : epsilons) {
                curve.push_back({{"epsilon", eps},
                                 {"mean", mean_accuracy(vf, af, eps)},
                                 {"min", min_accuracy(vf, af, eps)},
                                 {"max", max_accuracy(vf, af, eps)}});
            }
            j["victims"][vf][af] = std::move(curve);
        }
    return j.dump(2);
}

CounterexampleFixture counterexample_fixture() {
    LabeledDataset data(2,
                        {Vec{-1.0, 1.0}, Vec{1.0, 1.0}, Vec{0.0, -1.0}},
                        {+1, +1, -1}, LabelKind::Binary);
    MaxMarginSolution svm = train_max_margin(data);

    // wedge network: -1 exactly on {|x1| <= x2/4 + 1/2}, which contains the
    // whole ray upward from (0,-1)
    ReluNetwork net;
    net.W = {Vec{1.0, -0.25}, Vec{-1.0, -0.25}};
    net.b = {-0.5, -0.5};
    net.v = {1.0, 1.0};
    ReluClassifier relu{std::move(net), DecisionRule::OpenThreshold, 0.0,
                        NetClass::OnesOutput};
    validate_net_class(relu);
    return CounterexampleFixture{std::move(data), std::move(svm),
                                 std::move(relu)};
}

CrossFamilyReport cross_family_direction_check(
    const LabeledDataset& data, const std::vector<LinearClassifier>& linears,
    const std::vector<ReluClassifier>& relus,
    const AdversarialDirection& direction, int source_label, double cap) {
    if (source_label != 1 && source_label != -1)
        throw std::invalid_argument("source label must be +-1");

    CrossFamilyReport rep;
    auto run = [&](const LabelFn& label, const std::string& family,
                   std::size_t index) {
        CrossFamilyOutcome oc{family, index, 0, 0};
        for (std::size_t i = 0; i < data.size(); ++i) {
            const Vec& x = data.point(i);
            if (label(x) != source_label) continue;
            ++oc.attempted;
            if (flip_search(label, x, direction.v, cap)) ++oc.flipped;
        }
        rep.attempted += oc.attempted;
        rep.flipped += oc.flipped;
        rep.outcomes.push_back(std::move(oc));
    };

    for (std::size_t i = 0; i < linears.size(); ++i)
        run(label_fn(linears[i]), "linear", i);
    for (std::size_t i = 0; i < relus.size(); ++i)
        run(label_fn(relus[i]), "relu", i);
    return rep;
}

}  // namespace advdir
