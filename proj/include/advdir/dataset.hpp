#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <vector>

#include "advdir/linalg.hpp"

namespace advdir {

enum class LabelKind { Binary, Multiclass };

// Immutable labeled point set. Slices and relabelings are views: they share
// the underlying storage and remember each point's index in the originating
// dataset, so a point can be traced through slice/relabel chains.
class LabeledDataset {
public:
    // Fresh storage. Binary labels must be in {-1,+1}; multiclass labels in
    // {1..K} where K = class_count (inferred from the data when 0).
    LabeledDataset(std::size_t dim, std::vector<Vec> points,
                   std::vector<int> labels, LabelKind kind,
                   int class_count = 0);

    // Empty dataset (dim 0, no points).
    LabeledDataset() = default;

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return index_.size(); }
    bool empty() const { return index_.empty(); }
    LabelKind label_kind() const { return kind_; }
    int class_count() const { return class_count_; }

    const Vec& point(std::size_t i) const;
    int label(std::size_t i) const;
    // Index of point i in the dataset this view was derived from (identity
    // for a freshly constructed dataset).
    std::size_t original_index(std::size_t i) const;

    // View of the points whose label lies in `labels`. Shares storage.
    LabeledDataset slice(const std::set<int>& labels) const;

    // View with label `positive` mapped to +1 and `negative` to -1. Any other
    // label present is an error. Point order is preserved; storage is shared.
    LabeledDataset relabel_binary(int positive, int negative) const;

    // View of the given row positions (in this view's order). Shares storage.
    LabeledDataset take(const std::vector<std::size_t>& rows) const;

    // max_i ||x_i||_2; error on an empty dataset.
    double radius() const;

    // Order-sensitive content hash (FNV-1a over dims, coordinates, labels).
    std::uint64_t content_hash() const;

    // Labels that actually occur, ascending.
    std::vector<int> present_labels() const;

private:
    struct Storage {
        std::size_t dim;
        std::vector<Vec> points;
        std::vector<int> labels;
    };

    friend LabeledDataset merge_views(const std::vector<LabeledDataset>& views);

    std::shared_ptr<const Storage> storage_;
    std::vector<std::size_t> index_;      // view -> storage positions
    std::vector<int> label_override_;     // empty unless relabeled
    std::size_t dim_ = 0;
    LabelKind kind_ = LabelKind::Binary;
    int class_count_ = 2;
};

// Concatenate views of the same storage and sort by original index; with the
// single-label slices of a dataset this reproduces the dataset.
LabeledDataset merge_views(const std::vector<LabeledDataset>& views);

// Seeded synthetic binary sources. All three are deterministic per spec.
enum class GeneratorKind { TwoGaussians, SeparableUniform, MarginPlanted };

struct GeneratorSpec {
    GeneratorKind kind = GeneratorKind::TwoGaussians;
    std::size_t dim = 2;
    std::size_t per_class = 10;
    std::uint64_t seed = 0;
    // two-gaussians: distance between the class means (unit sigma).
    // separable-uniform / margin-planted: width of the empty band around the
    // separating hyperplane, i.e. every point is at distance >= separation/2.
    double separation = 1.0;
};

// The hyperplane a planted generator separated the classes with.
struct WitnessHyperplane {
    Vec w;
    double b = 0.0;
};

LabeledDataset generate(const GeneratorSpec& spec);
WitnessHyperplane planted_witness(const GeneratorSpec& spec);

// K unit-sigma gaussian clusters labeled 1..K, centers `separation` from the
// origin spread over a circle in the first two coordinates (d >= 2).
LabeledDataset make_clusters(int k, std::size_t dim, std::size_t per_class,
                             double separation, std::uint64_t seed);

}  // namespace advdir
