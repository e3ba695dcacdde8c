#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advdir/attack.hpp"

namespace advdir {

// One property suite run: per-trial CSV rows plus a failure count judged
// against the allowance appropriate for the suite's probabilistic guarantee
// (0 for the deterministic ones).
struct SuiteResult {
    std::string id;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t failures = 0;
    std::size_t allowed_failures = 0;
    std::vector<std::string> notes;

    bool passed() const { return failures <= allowed_failures; }
    std::string to_csv() const;
};

// Scale knobs shared by the randomized suites. Defaults are the desk-scale
// parameters the acceptance gate runs with.
struct SuiteScale {
    std::size_t classifiers_per_trial = 20;
    std::size_t soft_n = 2000;
    std::size_t relu_nets = 50;
    std::size_t certificate_points = 10000;
    std::size_t ensemble_size = 20;
};

SuiteResult run_svm_hard_suite(std::size_t trials, std::uint64_t seed,
                               const SuiteScale& scale = {});
SuiteResult run_svm_bound_suite(std::size_t trials, std::uint64_t seed,
                                const SuiteScale& scale = {});
SuiteResult run_soft_margin_suite(std::size_t trials, std::uint64_t seed,
                                  const SuiteScale& scale = {});
SuiteResult run_multiclass_hard_suite(std::size_t trials, std::uint64_t seed,
                                      const SuiteScale& scale = {});
SuiteResult run_multiclass_soft_suite(std::size_t trials, std::uint64_t seed,
                                      const SuiteScale& scale = {});
SuiteResult run_relu_convex_suite(std::size_t trials, std::uint64_t seed,
                                  const SuiteScale& scale = {});
SuiteResult run_certificate_suite(std::size_t trials, std::uint64_t seed,
                                  const SuiteScale& scale = {});
SuiteResult run_cross_family_suite(std::size_t trials, std::uint64_t seed,
                                   const SuiteScale& scale = {});

// Dispatch by suite id: svm-hard, svm-bound, soft-margin, multiclass-hard,
// multiclass-soft, relu-convex, certificate, cross-family.
SuiteResult run_theorem_suite(const std::string& id, std::size_t trials,
                              std::uint64_t seed, const SuiteScale& scale = {});

std::vector<std::string> theorem_suite_ids();

// The full transfer experiment (attacker/victim ensembles, epsilon grid,
// random baseline) on synthetic data or an ingested two-label IDX subset.
struct TransferExperimentConfig {
    std::size_t linear_models = 5;
    std::size_t relu_models = 5;
    std::size_t train_per_model = 200;  // per-class points per training draw
    std::size_t eval_points = 400;      // total evaluation points
    std::size_t relu_width = 16;
    double eps_start = 0.01, eps_stop = 0.40, eps_step = 0.01;
    AttackConfig attack;  // step/iterations/loss defaults apply
    std::uint64_t seed = 0;
    // empty -> synthetic two-signal data; otherwise an IDX pair restricted to
    // two digit labels
    std::string idx_images, idx_labels;
    int digit_a = 0, digit_b = 1;
};

struct TransferExperimentResult {
    TransferReport report;
    std::vector<double> epsilons;
    double clean_linear_accuracy = 0.0;  // mean clean accuracy per family
    double clean_relu_accuracy = 0.0;
};

TransferExperimentResult run_transfer_experiment(
    const TransferExperimentConfig& cfg);

}  // namespace advdir
