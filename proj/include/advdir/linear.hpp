#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "advdir/dataset.hpp"
#include "advdir/linalg.hpp"

namespace advdir {

// Binary halfspace classifier. Score exactly zero labels -1, so that the
// +1 region is the open halfspace {<w,x> + b > 0}.
struct LinearClassifier {
    Vec w;
    double b = 0.0;

    LinearClassifier(Vec w_, double b_);

    double score(const Vec& x) const { return dot(w, x) + b; }
    int classify(const Vec& x) const { return score(x) > 0.0 ? +1 : -1; }
};

// min_i y_i * (<w,x_i> + b); positive iff the classifier strictly separates
// the data. Error on an empty dataset.
double margin(const LinearClassifier& h, const LabeledDataset& data);

bool classifies_all(const LinearClassifier& h, const LabeledDataset& data);

// Seeded perceptron from a random start over a random point order; returns
// a unit-norm classifier once every point is strictly correct, or nullopt if
// the epoch cap runs out. Different seeds give different members of the
// version space, which is how test ensembles of S-accurate classifiers are
// drawn.
std::optional<LinearClassifier> perceptron_fit(const LabeledDataset& data,
                                               std::uint64_t seed,
                                               int epoch_cap = 5000,
                                               bool with_bias = true);

// `count` distinct-seed perceptron survivors; InfeasibleError if the attempt
// budget runs out first.
std::vector<LinearClassifier> sample_accurate_linear(const LabeledDataset& data,
                                                     std::size_t count,
                                                     std::uint64_t seed,
                                                     std::size_t max_attempts = 200,
                                                     bool with_bias = true);

}  // namespace advdir
