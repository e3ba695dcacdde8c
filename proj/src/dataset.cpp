#include "advdir/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace advdir {

namespace {

void validate_label(int label, LabelKind kind, int class_count) {
    if (kind == LabelKind::Binary) {
        if (label != -1 && label != 1)
            throw std::invalid_argument("binary label must be -1 or +1, got " +
                                        std::to_string(label));
    } else {
        if (label < 1 || label > class_count)
            throw std::invalid_argument("multiclass label " + std::to_string(label) +
                                        " outside 1.." + std::to_string(class_count));
    }
}

}  // namespace

LabeledDataset::LabeledDataset(std::size_t dim, std::vector<Vec> points,
                               std::vector<int> labels, LabelKind kind,
                               int class_count) {
    if (points.size() != labels.size())
        throw std::invalid_argument("point/label count mismatch");
    if (!points.empty() && dim == 0)
        throw std::invalid_argument("dataset dim must be >= 1");
    for (const Vec& p : points)
        if (p.size() != dim)
            throw std::invalid_argument("point dimension != dataset dim");

    if (kind == LabelKind::Multiclass) {
        if (class_count == 0)
            for (int l : labels) class_count = std::max(class_count, l);
        if (class_count < 1 && !labels.empty())
            throw std::invalid_argument("multiclass dataset needs class_count >= 1");
    } else {
        class_count = 2;
    }
    for (int l : labels) validate_label(l, kind, class_count);

    auto st = std::make_shared<Storage>();
    st->dim = dim;
    st->points = std::move(points);
    st->labels = std::move(labels);
    index_.resize(st->points.size());
    for (std::size_t i = 0; i < index_.size(); ++i) index_[i] = i;
    storage_ = std::move(st);
    dim_ = dim;
    kind_ = kind;
    class_count_ = class_count;
}

const Vec& LabeledDataset::point(std::size_t i) const {
    if (i >= index_.size()) throw std::out_of_range("point index out of range");
    return storage_->points[index_[i]];
}

int LabeledDataset::label(std::size_t i) const {
    if (i >= index_.size()) throw std::out_of_range("label index out of range");
    if (!label_override_.empty()) return label_override_[i];
    return storage_->labels[index_[i]];
}

std::size_t LabeledDataset::original_index(std::size_t i) const {
    if (i >= index_.size()) throw std::out_of_range("index out of range");
    return index_[i];
}

LabeledDataset LabeledDataset::slice(const std::set<int>& labels) const {
    if (labels.empty())
        throw std::invalid_argument("slice: empty label set");
    if (empty()) return *this;
    for (int l : labels) validate_label(l, kind_, class_count_);
    LabeledDataset view(*this);
    view.index_.clear();
    view.label_override_.clear();
    for (std::size_t i = 0; i < index_.size(); ++i) {
        if (labels.count(label(i))) {
            view.index_.push_back(index_[i]);
            if (!label_override_.empty())
                view.label_override_.push_back(label_override_[i]);
        }
    }
    if (!label_override_.empty() &&
        view.label_override_.size() != view.index_.size())
        view.label_override_.clear();  // unreachable; defensive
    return view;
}

LabeledDataset LabeledDataset::relabel_binary(int positive, int negative) const {
    if (positive == negative)
        throw std::invalid_argument("relabel_binary: labels must differ");
    LabeledDataset view(*this);
    view.label_override_.assign(index_.size(), 0);
    for (std::size_t i = 0; i < index_.size(); ++i) {
        int l = label(i);
        if (l == positive)
            view.label_override_[i] = +1;
        else if (l == negative)
            view.label_override_[i] = -1;
        else
            throw std::invalid_argument("relabel_binary: label " +
                                        std::to_string(l) +
                                        " is neither requested class");
    }
    view.kind_ = LabelKind::Binary;
    view.class_count_ = 2;
    return view;
}

LabeledDataset LabeledDataset::take(const std::vector<std::size_t>& rows) const {
    LabeledDataset view(*this);
    view.index_.clear();
    view.label_override_.clear();
    for (std::size_t r : rows) {
        if (r >= index_.size())
            throw std::out_of_range("take: row out of range");
        view.index_.push_back(index_[r]);
        if (!label_override_.empty())
            view.label_override_.push_back(label_override_[r]);
    }
    return view;
}

double LabeledDataset::radius() const {
    if (empty()) throw std::invalid_argument("radius of empty dataset");
    double r = 0.0;
    for (std::size_t i = 0; i < size(); ++i) r = std::max(r, norm2(point(i)));
    return r;
}

std::uint64_t LabeledDataset::content_hash() const {
    std::uint64_t h = 14695981039346656037ull;
    auto absorb = [&h](std::uint64_t x) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (x >> (8 * byte)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    absorb(static_cast<std::uint64_t>(dim_));
    absorb(static_cast<std::uint64_t>(size()));
    for (std::size_t i = 0; i < size(); ++i) {
        for (double c : point(i)) absorb(std::bit_cast<std::uint64_t>(c));
        absorb(static_cast<std::uint64_t>(static_cast<std::int64_t>(label(i))));
    }
    return h;
}

std::vector<int> LabeledDataset::present_labels() const {
    std::set<int> seen;
    for (std::size_t i = 0; i < size(); ++i) seen.insert(label(i));
    return {seen.begin(), seen.end()};
}

LabeledDataset merge_views(const std::vector<LabeledDataset>& views) {
    if (views.empty())
        throw std::invalid_argument("merge_views: nothing to merge");
    LabeledDataset merged(views.front());
    for (std::size_t k = 1; k < views.size(); ++k) {
        if (views[k].storage_ != merged.storage_)
            throw std::invalid_argument("merge_views: views of different datasets");
        if (views[k].label_override_.empty() != merged.label_override_.empty())
            throw std::invalid_argument("merge_views: mixed relabeled and plain views");
        merged.index_.insert(merged.index_.end(), views[k].index_.begin(),
                             views[k].index_.end());
        merged.label_override_.insert(merged.label_override_.end(),
                                      views[k].label_override_.begin(),
                                      views[k].label_override_.end());
    }
    // restore original order
    std::vector<std::size_t> perm(merged.index_.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::stable_sort(perm.begin(), perm.end(),
                     [&merged](std::size_t a, std::size_t b) {
                         return merged.index_[a] < merged.index_[b];
                     });
    std::vector<std::size_t> idx;
    std::vector<int> over;
    idx.reserve(perm.size());
    for (std::size_t p : perm) {
        idx.push_back(merged.index_[p]);
        if (!merged.label_override_.empty())
            over.push_back(merged.label_override_[p]);
    }
    merged.index_ = std::move(idx);
    merged.label_override_ = std::move(over);
    return merged;
}

namespace {

void validate_generator(const GeneratorSpec& spec) {
    if (spec.dim < 1) throw std::invalid_argument("generator dim must be >= 1");
    if (spec.per_class < 1)
        throw std::invalid_argument("generator per_class must be >= 1");
    if (spec.kind == GeneratorKind::TwoGaussians) {
        if (spec.separation < 0)
            throw std::invalid_argument("two-gaussians separation must be >= 0");
    } else if (spec.separation <= 0) {
        throw std::invalid_argument("planted separation must be > 0");
    }
}

}  // namespace

LabeledDataset generate(const GeneratorSpec& spec) {
    validate_generator(spec);
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<Vec> points;
    std::vector<int> labels;
    points.reserve(2 * spec.per_class);
    labels.reserve(2 * spec.per_class);

    for (int cls : {+1, -1}) {
        for (std::size_t i = 0; i < spec.per_class; ++i) {
            Vec x(spec.dim, 0.0);
            switch (spec.kind) {
                case GeneratorKind::TwoGaussians:
                    // unit-sigma blobs at +-(separation/2) * e1
                    for (std::size_t j = 0; j < spec.dim; ++j) x[j] = gauss(rng);
                    x[0] += cls * spec.separation / 2.0;
                    break;
                case GeneratorKind::SeparableUniform:
                    // uniform box, first coordinate pushed past the band
                    for (std::size_t j = 0; j < spec.dim; ++j)
                        x[j] = 2.0 * unit(rng) - 1.0;
                    x[0] = cls * (spec.separation / 2.0 + unit(rng));
                    break;
                case GeneratorKind::MarginPlanted:
                    // gaussian body, last coordinate at distance
                    // >= separation/2 from the witness hyperplane x_d = 0
                    for (std::size_t j = 0; j + 1 < spec.dim; ++j)
                        x[j] = gauss(rng);
                    x[spec.dim - 1] =
                        cls * (spec.separation / 2.0 + std::abs(gauss(rng)));
                    break;
            }
            points.push_back(std::move(x));
            labels.push_back(cls);
        }
    }
    return LabeledDataset(spec.dim, std::move(points), std::move(labels),
                          LabelKind::Binary);
}

WitnessHyperplane planted_witness(const GeneratorSpec& spec) {
    validate_generator(spec);
    WitnessHyperplane w;
    w.w.assign(spec.dim, 0.0);
    switch (spec.kind) {
        case GeneratorKind::SeparableUniform:
            w.w[0] = 1.0;
            break;
        case GeneratorKind::MarginPlanted:
            w.w[spec.dim - 1] = 1.0;
            break;
        case GeneratorKind::TwoGaussians:
            throw std::invalid_argument(
                "two-gaussians has no planted witness (classes may overlap)");
    }
    return w;
}

LabeledDataset make_clusters(int k, std::size_t dim, std::size_t per_class,
                             double separation, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("make_clusters: need k >= 2");
    if (dim < 2) throw std::invalid_argument("make_clusters: need dim >= 2");
    if (per_class < 1)
        throw std::invalid_argument("make_clusters: per_class must be >= 1");
    if (separation < 0)
        throw std::invalid_argument("make_clusters: separation must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Vec> points;
    std::vector<int> labels;
    const double tau = 6.283185307179586;
    for (int cls = 1; cls <= k; ++cls) {
        double angle = tau * (cls - 1) / k;
        for (std::size_t i = 0; i < per_class; ++i) {
            Vec x(dim, 0.0);
            for (std::size_t j = 0; j < dim; ++j) x[j] = gauss(rng);
            x[0] += separation * std::cos(angle);
            x[1] += separation * std::sin(angle);
            points.push_back(std::move(x));
            labels.push_back(cls);
        }
    }
    return LabeledDataset(dim, std::move(points), std::move(labels),
                          LabelKind::Multiclass, k);
}

}  // namespace advdir
