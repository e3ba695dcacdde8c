#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "advdir/dataset.hpp"
#include "advdir/direction.hpp"
#include "advdir/linear.hpp"

namespace advdir {

// Whether the separating hyperplane carries an intercept. NoBias drops the
// dual equality constraint along with it (used by the soft-margin pipeline,
// where classifiers are trained without intercepts).
enum class MarginMode { Biased, NoBias };

// Normalized maximum-margin solution: ||w||_2 = 1, margin is the achieved
// geometric margin, and the dual coefficients are rescaled along with w so
// that w = sum_i alphas[i] * y_i * x_i still holds exactly. In Biased mode
// sum_i alphas[i] * y_i = 0. sum_i alphas[i] = 1/margin, so the
// data-independent flip constant (sum alpha)^-1 equals the margin.
struct MaxMarginSolution {
    LinearClassifier classifier;
    double margin = 0.0;
    std::vector<double> alphas;
    std::vector<std::size_t> support_indices;
    double kkt_residual = 0.0;
    MarginMode mode = MarginMode::Biased;
};

// Pairwise coordinate ascent on the hard-margin dual (maximal-violating-pair
// selection), stopping when the worst KKT violation drops below tol or the
// pair-update cap is hit. InfeasibleError if the data is not (strictly)
// separable in the requested mode; std::invalid_argument if the data is not
// binary with both labels present.
MaxMarginSolution train_max_margin(const LabeledDataset& data,
                                   double tol = 1e-8,
                                   MarginMode mode = MarginMode::Biased,
                                   std::size_t max_pair_updates = 1'000'000);

// -y * w*: the transferable direction for points labeled y. y must be +-1.
AdversarialDirection svm_adversarial_direction(const MaxMarginSolution& sol,
                                               int y,
                                               std::uint64_t dataset_hash = 0);

// Smallest guaranteed flip scale for classifier h at the correctly classified
// point (x, y): every c above y*(<w,x>+b) / (margin(h,S) * sum alpha) flips h.
// gamma_h must be positive (h separates the data) and so must the classifier's
// own margin at (x, y).
double scaling_bound(const LinearClassifier& h, double gamma_h,
                     const MaxMarginSolution& sol, const Vec& x, int y);

// (sum alpha)^-1: one constant valid for every S-accurate classifier at its
// minimum-margin point.
double universal_constant(const MaxMarginSolution& sol);

std::string solution_to_json(const MaxMarginSolution& sol);
MaxMarginSolution solution_from_json(const std::string& text);

}  // namespace advdir
