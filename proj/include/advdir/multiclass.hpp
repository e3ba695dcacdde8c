#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advdir/dataset.hpp"
#include "advdir/direction.hpp"
#include "advdir/linear.hpp"
#include "advdir/maxmargin.hpp"
#include "advdir/softmargin.hpp"

namespace advdir {

// One-vs-rest linear model: h(x) = argmax_k (Wx + b)_k, ties resolved toward
// the smallest class index. Classes are 1..K.
struct MulticlassLinear {
    std::vector<Vec> rows;  // K weight rows
    Vec bias;               // K intercepts

    int classes() const { return static_cast<int>(rows.size()); }
    Vec scores(const Vec& x) const;
    int classify(const Vec& x) const;
};

enum class MulticlassMode { HardOvr, SoftOvr };

struct MulticlassTrainConfig {
    // hard mode: perceptron restarts per row, filtered to OVR accuracy
    int hard_epoch_cap = 5000;
    std::size_t hard_attempts = 50;
    // soft mode: per-row intercept-free hinge training under the norm cap
    SoftTrainConfig soft;
    std::uint64_t seed = 0;
};

// Train per-class one-vs-rest rows (class k vs all others relabeled +-1).
// Hard mode requires every OVR subproblem separable (InfeasibleError naming
// the class otherwise) and yields an S-accurate model; soft mode trains
// capped rows with no such promise. Deterministic given config.seed.
MulticlassLinear train_multiclass(const LabeledDataset& data,
                                  MulticlassMode mode,
                                  const MulticlassTrainConfig& cfg);

bool classifies_all(const MulticlassLinear& h, const LabeledDataset& data);

// Binary classifier deciding class k against class l: w_k - w_l, b_k - b_l.
LinearClassifier reduce_pair(const MulticlassLinear& h, int k, int l);

// Direction moving class-k points out of class k for every S-accurate OVR
// model: v = -w* of the max-margin separator of the {k,l} slice relabeled
// k->+1, l->-1. For class-l points the negated direction does the job.
struct MulticlassDirection {
    AdversarialDirection direction;
    MaxMarginSolution pair_solution;
    int k = 0, l = 0;
};

MulticlassDirection multiclass_adversarial_direction(const LabeledDataset& data,
                                                     int k, int l);

// Soft-margin transfer pipeline for two independently drawn samples and two
// independently trained soft-OVR models. Picks the partner class l with the
// smallest measured rho, reduces both models to the (k,l) pair, equalizes the
// relabeled slices, and funnels everything through the binary soft pipeline.
// The norm cap doubles (rows are differences), so the size bound runs with
// 2B. If no l keeps rho below 1/2 the result reports failed assumptions
// instead of raising.
struct MulticlassSoftResult {
    bool assumptions_ok = false;
    std::string failure_reason;
    int k = 0, l = 0;
    AdversarialDirection direction;  // v = -w* of the joint subset
    JointSubset joint;
    AssumptionReport report;         // rho = max over the two models, cap = 2B
    double size_bound = 0.0;
    LinearClassifier reduced_first;
    LinearClassifier reduced_second;

    MulticlassSoftResult()
        : direction{}, reduced_first(Vec{1.0}, 0.0),
          reduced_second(Vec{1.0}, 0.0) {}
};

MulticlassSoftResult multiclass_soft_pipeline(const LabeledDataset& s1,
                                              const LabeledDataset& s2,
                                              int k,
                                              const MulticlassTrainConfig& cfg);

}  // namespace advdir
