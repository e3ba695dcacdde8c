#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "advdir/dataset.hpp"
#include "advdir/direction.hpp"
#include "advdir/linear.hpp"
#include "advdir/maxmargin.hpp"
#include "advdir/multiclass.hpp"
#include "advdir/relu.hpp"

namespace advdir {

using LabelFn = std::function<int(const Vec&)>;

LabelFn label_fn(const LinearClassifier& h);
LabelFn label_fn(const ReluClassifier& h);
LabelFn label_fn(const MulticlassLinear& h);

// Smallest c in (0, cap] with label(x + c*v) != label(x): probed by doubling
// from 1e-3, then bisected to 1e-6 relative width. nullopt when no probe up
// to the cap flips. The returned c is guaranteed to flip; for label functions
// monotone along the ray (any linear family) it is the minimal flip scale up
// to the bisection width.
std::optional<double> flip_search(const LabelFn& label, const Vec& x,
                                  const Vec& v, double cap = 1e6);

enum class AttackLoss { Hinge, SquaredHinge };
enum class AttackStep { SignedGradient, RawGradient };

struct AttackConfig {
    double epsilon = 0.1;      // l_inf budget, >= 0
    double step = 0.01;        // gamma > 0
    int iterations = 40;       // >= 1
    AttackLoss loss = AttackLoss::Hinge;
    AttackStep step_rule = AttackStep::SignedGradient;
    bool clip_unit_box = false;  // additionally clamp iterates to [0,1]^d
};

// Binary model exposed to the gradient attack: a signed score (positive
// means label +1) and its input gradient.
struct AttackableModel {
    std::function<double(const Vec&)> score;
    std::function<Vec(const Vec&)> score_grad;
    std::function<int(const Vec&)> label;
};

AttackableModel as_attackable(const LinearClassifier& h);
AttackableModel as_attackable(const ReluClassifier& h);

// Iterated gradient ascent on the attack loss of the true label, each step
// projected onto the l_inf ball around the start point. epsilon = 0 returns
// the input unchanged.
Vec pgd_attack(const AttackableModel& model, const Vec& x, int y,
               const AttackConfig& cfg);

// Per-coordinate uniform noise in [-epsilon, epsilon] added to x.
Vec random_perturbation(const Vec& x, double epsilon, std::uint64_t seed);

// Transfer experiment: every attacker crafts adversarial versions of the
// evaluation points at every epsilon, every victim is scored on each crafted
// set, and a seeded random-noise attacker rides along as the baseline.
struct ModelRef {
    std::string family;  // "linear" | "relu" | "random"
    std::string id;
    AttackableModel model;
};

struct TransferEntry {
    std::string attacker_family, attacker_id;
    std::string victim_family, victim_id;
    double epsilon = 0.0;
    double accuracy = 0.0;
};

struct TransferReport {
    std::vector<TransferEntry> entries;
    std::vector<double> epsilons;

    // Mean over victims of that family of their mean accuracy over attackers
    // of the attacking family at this epsilon; min/max give the per-victim
    // spread (the error bars).
    double mean_accuracy(const std::string& victim_family,
                         const std::string& attacker_family,
                         double epsilon) const;
    double min_accuracy(const std::string& victim_family,
                        const std::string& attacker_family,
                        double epsilon) const;
    double max_accuracy(const std::string& victim_family,
                        const std::string& attacker_family,
                        double epsilon) const;

    std::string to_csv() const;      // long format, one row per entry
    std::string summary_json() const;
};

TransferReport transfer_matrix(const std::vector<ModelRef>& attackers,
                               const std::vector<ModelRef>& victims,
                               const LabeledDataset& eval_set,
                               const std::vector<double>& epsilons,
                               const AttackConfig& base_cfg,
                               std::uint64_t noise_seed);

// Three-point planar dataset whose max-margin direction fails to transfer to
// a wedge-shaped ReLU classifier: the ReLU's -1 region is the convex cone
// |x1| <= x2/4 + 1/2, which contains the entire upward ray from the -1 point,
// so moving along w* = (0,1) never flips it, while both +1 points sit outside
// the cone.
struct CounterexampleFixture {
    LabeledDataset data;
    MaxMarginSolution svm;
    ReluClassifier relu;
};

CounterexampleFixture counterexample_fixture();

// Flip check of one direction against every classifier in a mixed linear/ReLU
// collection at every point the classifier labels like the direction's source
// endpoint.
struct CrossFamilyOutcome {
    std::string family;
    std::size_t index = 0;
    std::size_t attempted = 0;
    std::size_t flipped = 0;
};

struct CrossFamilyReport {
    std::vector<CrossFamilyOutcome> outcomes;
    std::size_t attempted = 0;
    std::size_t flipped = 0;

    bool all_flipped() const { return attempted > 0 && flipped == attempted; }
};

CrossFamilyReport cross_family_direction_check(
    const LabeledDataset& data, const std::vector<LinearClassifier>& linears,
    const std::vector<ReluClassifier>& relus,
    const AdversarialDirection& direction, int source_label,
    double cap = 1e6);

}  // namespace advdir
