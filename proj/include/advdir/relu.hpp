#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advdir/dataset.hpp"
#include "advdir/direction.hpp"
#include "advdir/linalg.hpp"

namespace advdir {

// Two-layer network f(x) = v^T relu(Wx + b) with L hidden units.
struct ReluNetwork {
    std::vector<Vec> W;  // L rows of length dim
    Vec b;               // L
    Vec v;               // L

    std::size_t width() const { return W.size(); }
    std::size_t dim() const { return W.empty() ? 0 : W.front().size(); }
    Vec preactivation(const Vec& x) const;  // Wx + b
    double forward(const Vec& x) const;
};

// How the scalar output is turned into a +-1 label.
//   OpenThreshold:   +1 iff f(x) >  a
//   ClosedThreshold: +1 iff f(x) >= a
//   AllPositive:     +1 iff every entry of Wx + b is > 0 (f and a unused)
enum class DecisionRule { OpenThreshold, ClosedThreshold, AllPositive };

// Structural families with provable geometry:
//   OnesOutput:    v = (1..1), OpenThreshold at a = 0    -> -1 region convex
//   NonnegOutput:  v >= 0, threshold rule with a > 0     -> -1 region convex
//   Conjunction:   AllPositive rule                      -> +1 region convex
//   General:       no constraint, no geometric promise
enum class NetClass { General, OnesOutput, NonnegOutput, Conjunction };

struct ReluClassifier {
    ReluNetwork net;
    DecisionRule rule = DecisionRule::OpenThreshold;
    double a = 0.0;
    NetClass net_class = NetClass::General;

    int classify(const Vec& x) const;
};

// Throws std::invalid_argument if the classifier's parameters violate its
// declared class.
void validate_net_class(const ReluClassifier& clf);

// Squared-hinge training of a NonnegOutput classifier (v clipped to >= 0
// after every step, rule OpenThreshold at cfg.threshold). Reports whether the
// final classifier labels every training point correctly.
struct ReluTrainConfig {
    int epochs = 400;
    double step = 0.05;
    double threshold = 0.5;  // a > 0
    double init_scale = 1.0;
    std::uint64_t seed = 0;
};

struct ReluTrainResult {
    ReluClassifier classifier;
    bool s_accurate = false;
};

ReluTrainResult train_relu_constrained(const LabeledDataset& data,
                                       std::size_t width,
                                       const ReluTrainConfig& cfg);

bool classifies_all(const ReluClassifier& clf, const LabeledDataset& data);

// Repeated seeded training runs, keeping the S-accurate survivors.
std::vector<ReluClassifier> random_accurate_relu(const LabeledDataset& data,
                                                 std::size_t width,
                                                 std::size_t attempts,
                                                 std::uint64_t seed,
                                                 const ReluTrainConfig& base = {});

// Membership check of the +1 region done twice: direct classification vs the
// union of the 2^L - 1 halfspaces {<sum_{i in I} v_i w_i, x> + sum v_i b_i
// (>=|>) a} over nonempty unit subsets I. The two must agree everywhere off
// the decision boundary; disagreements are collected. Requires a NonnegOutput
// (or OnesOutput) classifier with a threshold rule. For width > subset_cap
// the subsets are sampled (active set + singletons + random draws) and the
// report carries a warning instead of exhaustive coverage.
struct CertificateMismatch {
    std::size_t point_index = 0;
    double f_value = 0.0;
    int label = 0;
    double best_subset_value = 0.0;
};

struct CertificateReport {
    std::size_t checked = 0;
    std::size_t skipped_boundary = 0;
    std::size_t subset_count = 0;
    bool sampled_fallback = false;
    std::vector<CertificateMismatch> mismatches;

    bool passed() const { return mismatches.empty(); }
};

CertificateReport convexity_certificate(const ReluClassifier& clf,
                                        const std::vector<Vec>& trial_points,
                                        double boundary_band = 1e-9,
                                        std::size_t subset_cap = 20,
                                        std::size_t sample_budget = 4096,
                                        std::uint64_t sample_seed = 0);

// Deterministic low-discrepancy points (radical-inverse sequence, one prime
// base per coordinate) over an axis-aligned box.
std::vector<Vec> halton_box(std::size_t count, std::size_t dim,
                            const Vec& lo, const Vec& hi);

// Trial points for certifying a classifier against a dataset: every training
// point, midpoints of cross-label pairs, and a low-discrepancy fill of the
// bounding box inflated 2x about its center, up to `count` points total.
std::vector<Vec> certificate_points(const LabeledDataset& data,
                                    std::size_t count);

// x_beta - x_alpha for two differently labeled training points; adversarial
// at every point a convex-(-1)-region classifier labels like x_alpha.
AdversarialDirection convex_region_direction(const LabeledDataset& data,
                                             std::size_t alpha_index,
                                             std::size_t beta_index);

std::string network_to_json(const ReluClassifier& clf);
ReluClassifier network_from_json(const std::string& text);

}  // namespace advdir
