#include "advdir/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "advdir/errors.hpp"

namespace advdir {

LinearClassifier::LinearClassifier(Vec w_, double b_) : w(std::move(w_)), b(b_) {
    if (w.empty()) throw std::invalid_argument("classifier weight is empty");
    if (norm2(w) == 0.0)
        throw std::invalid_argument("classifier weight must be nonzero");
}

double margin(const LinearClassifier& h, const LabeledDataset& data) {
    if (data.empty()) throw std::invalid_argument("margin of empty dataset");
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < data.size(); ++i)
        m = std::min(m, data.label(i) * h.score(data.point(i)));
    return m;
}

bool classifies_all(const LinearClassifier& h, const LabeledDataset& data) {
    for (std::size_t i = 0; i < data.size(); ++i)
        if (h.classify(data.point(i)) != data.label(i)) return false;
    return true;
}

std::optional<LinearClassifier> perceptron_fit(const LabeledDataset& data,
                                               std::uint64_t seed, int epoch_cap,
                                               bool with_bias) {
    if (data.empty()) throw std::invalid_argument("perceptron on empty dataset");
    if (data.label_kind() != LabelKind::Binary)
        throw std::invalid_argument("perceptron needs binary labels");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Vec w(data.dim());
    for (double& c : w) c = gauss(rng);
    double wn = norm2(w);
    if (wn > 0) for (double& c : w) c /= wn;
    double b = 0.0;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < epoch_cap; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        std::size_t mistakes = 0;
        for (std::size_t i : order) {
            const Vec& x = data.point(i);
            const int y = data.label(i);
            if (y * (dot(w, x) + b) <= 0.0) {
                axpy(double(y), x, w);
                if (with_bias) b += y;
                ++mistakes;
            }
        }
        if (mistakes == 0) {
            const double n = norm2(w);
            if (n == 0.0) return std::nullopt;
            for (double& c : w) c /= n;
            return LinearClassifier(std::move(w), b / n);
        }
    }
    return std::nullopt;
}

std::vector<LinearClassifier> sample_accurate_linear(const LabeledDataset& data,
                                                     std::size_t count,
                                                     std::uint64_t seed,
                                                     std::size_t max_attempts,
                                                     bool with_bias) {
    std::vector<LinearClassifier> out;
    out.reserve(count);
    for (std::size_t attempt = 0; attempt < max_attempts && out.size() < count;
         ++attempt) {
        auto h = perceptron_fit(data, seed + 0x9e3779b97f4a7c15ull * (attempt + 1),
                                5000, with_bias);
        if (h) out.push_back(std::move(*h));
    }
    if (out.size() < count)
        throw InfeasibleError("could only fit " + std::to_string(out.size()) +
                              " of " + std::to_string(count) +
                              " requested separating classifiers");
    return out;
}

}  // namespace advdir
