#pragma once

#include <cstdint>
#include <utility>

#include "advdir/dataset.hpp"
#include "advdir/direction.hpp"
#include "advdir/linear.hpp"
#include "advdir/maxmargin.hpp"

namespace advdir {

// Hinge-loss subgradient training of an intercept-free linear classifier with
// a hard norm cap (projection onto the B-ball after every step).
struct SoftTrainConfig {
    int epochs = 200;
    double step = 0.1;
    double lambda = 0.0;   // optional L2 shrinkage inside each step
    double norm_cap = 1.0; // B
    std::uint64_t seed = 0;
};

LinearClassifier train_soft(const LabeledDataset& data,
                            const SoftTrainConfig& cfg);

// Measured counterparts of the three transfer assumptions: norm cap actually
// attained, data radius, and the fraction of points NOT confidently correct
// (y<w,x> >= 1).
struct AssumptionReport {
    double norm_bound = 0.0;  // max of the two classifier norms
    double radius = 0.0;      // max point norm over both samples
    double rho = 0.0;         // this classifier's violation fraction
    std::size_t n = 0;
};

std::pair<AssumptionReport, AssumptionReport> assess_assumptions(
    const LinearClassifier& h1, const LinearClassifier& h2,
    const LabeledDataset& s1, const LabeledDataset& s2);

// (1-2*rho)*n - 2*B*R*sqrt(n) - 4*sqrt(n*ln n): the guaranteed size of the
// jointly correct subset inside either sample. May be negative (vacuous).
double soft_margin_size_bound(std::size_t n, double rho, double b_cap,
                              double radius);

// Points of s1 then s2 on which both classifiers are correct, with the
// per-origin counts the size bound speaks about.
struct JointSubset {
    LabeledDataset set;
    std::size_t from_first = 0;
    std::size_t from_second = 0;
};

JointSubset joint_correct_subset(const LinearClassifier& h1,
                                 const LinearClassifier& h2,
                                 const LabeledDataset& s1,
                                 const LabeledDataset& s2);

// Max-margin direction of the joint subset (intercept-free mode). For every
// (x,y) in the subset, -y * direction.v flips both classifiers.
struct SoftDirection {
    AdversarialDirection direction;  // v = w* of the joint subset
    JointSubset joint;
    MaxMarginSolution solution;
};

SoftDirection transferable_direction_soft(const LinearClassifier& h1,
                                          const LinearClassifier& h2,
                                          const LabeledDataset& s1,
                                          const LabeledDataset& s2);

}  // namespace advdir
