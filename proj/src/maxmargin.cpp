#include "advdir/maxmargin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "advdir/errors.hpp"

namespace advdir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_input(const LabeledDataset& data, double tol) {
    if (data.label_kind() != LabelKind::Binary)
        throw std::invalid_argument("max-margin training needs binary labels");
    if (data.size() < 2)
        throw std::invalid_argument("max-margin training needs at least 2 points");
    if (tol <= 0) throw std::invalid_argument("tol must be positive");
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < data.size(); ++i)
        (data.label(i) > 0 ? pos : neg) = true;
    if (!pos || !neg)
        throw std::invalid_argument("max-margin training needs both labels present");
}

// Working copy of the dual state; f[i] caches sum_j alpha_j y_j <x_i, x_j>
// so each pair update costs O(N d) instead of O(N^2).
struct Dual {
    const LabeledDataset& data;
    std::vector<double> alpha;
    std::vector<double> f;

    explicit Dual(const LabeledDataset& d)
        : data(d), alpha(d.size(), 0.0), f(d.size(), 0.0) {}

    double kernel(std::size_t i, std::size_t j) const {
        return dot(data.point(i), data.point(j));
    }
};

// Biased mode: maximize the margin subject to sum alpha_i y_i = 0 via
// maximal-violating-pair updates. Returns the final KKT violation.
double ascend_biased(Dual& st, double tol, std::size_t cap) {
    const std::size_t n = st.data.size();
    double viol = kInf;
    for (std::size_t it = 0; it < cap; ++it) {
        double m = -kInf, big_m = kInf;
        std::size_t i = n, j = n;
        for (std::size_t t = 0; t < n; ++t) {
            const int y = st.data.label(t);
            const double val = -y * (y * st.f[t] - 1.0);
            const bool in_up = (y > 0) || (st.alpha[t] > 0.0);
            const bool in_low = (y < 0) || (st.alpha[t] > 0.0);
            if (in_up && val > m) { m = val; i = t; }
            if (in_low && val < big_m) { big_m = val; j = t; }
        }
        viol = m - big_m;
        if (!(viol >= tol)) return viol;

        const int yi = st.data.label(i), yj = st.data.label(j);
        const double kii = st.kernel(i, i), kjj = st.kernel(j, j),
                     kij = st.kernel(i, j);
        const double curv = kii + kjj - 2.0 * kij;
        double t_max = kInf;
        if (yi < 0) t_max = std::min(t_max, st.alpha[i]);
        if (yj > 0) t_max = std::min(t_max, st.alpha[j]);
        double step;
        if (curv > 1e-14)
            step = std::min(viol / curv, t_max);
        else
            step = std::isfinite(t_max) ? t_max : 1.0 + st.alpha[i] + st.alpha[j];
        if (step <= 0.0) return viol;  // blocked pair; cannot happen for valid sets

        st.alpha[i] += yi * step;
        st.alpha[j] -= yj * step;
        const Vec& xi = st.data.point(i);
        const Vec& xj = st.data.point(j);
        for (std::size_t k = 0; k < n; ++k)
            st.f[k] += step * (dot(xi, st.data.point(k)) -
                               dot(xj, st.data.point(k)));
    }
    return viol;
}

// NoBias mode: no equality constraint, so single-coordinate Newton steps on
// the worst violator suffice.
double ascend_nobias(Dual& st, double tol, std::size_t cap) {
    const std::size_t n = st.data.size();
    double viol = kInf;
    for (std::size_t it = 0; it < cap; ++it) {
        viol = 0.0;
        std::size_t pick = n;
        for (std::size_t t = 0; t < n; ++t) {
            const double g = st.data.label(t) * st.f[t] - 1.0;
            const double v = st.alpha[t] > 0.0 ? std::abs(g) : std::max(0.0, -g);
            if (v > viol) { viol = v; pick = t; }
        }
        if (viol < tol) return viol;

        const double kpp = st.kernel(pick, pick);
        if (kpp <= 1e-300)
            throw InfeasibleError(
                "zero point cannot satisfy a positive margin without an intercept");
        const double g = st.data.label(pick) * st.f[pick] - 1.0;
        const double fresh = std::max(0.0, st.alpha[pick] - g / kpp);
        const double delta = fresh - st.alpha[pick];
        if (delta == 0.0) return viol;  // unreachable: violators can always move
        st.alpha[pick] = fresh;
        const Vec& xp = st.data.point(pick);
        const double scale = delta * st.data.label(pick);
        for (std::size_t k = 0; k < n; ++k)
            st.f[k] += scale * dot(xp, st.data.point(k));
    }
    return viol;
}

}  // namespace

MaxMarginSolution train_max_margin(const LabeledDataset& data, double tol,
                                   MarginMode mode,
                                   std::size_t max_pair_updates) {
    validate_input(data, tol);
    const std::size_t n = data.size();

    Dual st(data);
    const double viol = mode == MarginMode::Biased
                            ? ascend_biased(st, tol, max_pair_updates)
                            : ascend_nobias(st, tol, max_pair_updates);

    Vec w_un(data.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (st.alpha[i] != 0.0) axpy(st.alpha[i] * data.label(i), data.point(i), w_un);
    const double wn = norm2(w_un);
    if (wn <= 1e-300)
        throw InfeasibleError("dual collapsed to w = 0: data is not separable");

    MaxMarginSolution sol{LinearClassifier(scaled(w_un, 1.0 / wn), 0.0),
                          0.0,
                          std::vector<double>(n, 0.0),
                          {},
                          viol,
                          mode};

    double amax = 0.0;
    for (double a : st.alpha) amax = std::max(amax, a);
    const double sv_floor = 1e-8 * amax;
    for (std::size_t i = 0; i < n; ++i) {
        sol.alphas[i] = st.alpha[i] / wn;
        if (st.alpha[i] > sv_floor) sol.support_indices.push_back(i);
    }

    if (mode == MarginMode::Biased) {
        // intercept from the support-vector stationarity conditions
        const double gamma_dual = 1.0 / wn;
        double acc = 0.0;
        for (std::size_t i : sol.support_indices)
            acc += data.label(i) * gamma_dual -
                   dot(sol.classifier.w, data.point(i));
        sol.classifier.b = acc / double(sol.support_indices.size());
    }

    sol.margin = margin(sol.classifier, data);
    if (viol >= tol && sol.margin <= tol)
        throw InfeasibleError(
            "no separating hyperplane found: dual did not converge and the "
            "achieved margin is not positive");
    if (sol.margin <= 0.0)
        throw InfeasibleError("achieved margin is not positive");
    return sol;
}

AdversarialDirection svm_adversarial_direction(const MaxMarginSolution& sol,
                                               int y, std::uint64_t dataset_hash) {
    if (y != 1 && y != -1)
        throw std::invalid_argument("direction label must be +-1");
    return make_direction(scaled(sol.classifier.w, -double(y)),
                          Provenance::ThmSvm, dataset_hash,
                          y > 0 ? "source-label=+1" : "source-label=-1");
}

double scaling_bound(const LinearClassifier& h, double gamma_h,
                     const MaxMarginSolution& sol, const Vec& x, int y) {
    if (y != 1 && y != -1)
        throw std::invalid_argument("scaling bound label must be +-1");
    if (gamma_h <= 0)
        throw std::invalid_argument("scaling bound needs gamma_h > 0");
    double alpha_sum = 0.0;
    for (double a : sol.alphas) alpha_sum += a;
    if (alpha_sum <= 0)
        throw std::invalid_argument("scaling bound needs sum(alpha) > 0");
    const double num = y * h.score(x);
    if (num <= 0)
        throw std::invalid_argument(
            "scaling bound is for points the classifier gets right");
    return num / (gamma_h * alpha_sum);
}

double universal_constant(const MaxMarginSolution& sol) {
    double alpha_sum = 0.0;
    for (double a : sol.alphas) alpha_sum += a;
    if (alpha_sum <= 0)
        throw std::logic_error("solution has sum(alpha) <= 0");
    return 1.0 / alpha_sum;
}

std::string solution_to_json(const MaxMarginSolution& sol) {
    nlohmann::json j;
    j["w"] = sol.classifier.w;
    j["b"] = sol.classifier.b;
    j["margin"] = sol.margin;
    j["alphas"] = sol.alphas;
    j["support_indices"] = sol.support_indices;
    j["kkt_residual"] = sol.kkt_residual;
    j["mode"] = sol.mode == MarginMode::Biased ? "biased" : "no-bias";
    return j.dump(2);
}

MaxMarginSolution solution_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("solution json: ") + e.what());
    }
    try {
        MaxMarginSolution sol{
            LinearClassifier(j.at("w").get<Vec>(), j.at("b").get<double>()),
            j.at("margin").get<double>(),
            j.at("alphas").get<std::vector<double>>(),
            j.at("support_indices").get<std::vector<std::size_t>>(),
            j.at("kkt_residual").get<double>(),
            j.value("mode", "biased") == std::string("no-bias")
                ? MarginMode::NoBias
                : MarginMode::Biased};
        if (sol.alphas.empty())
            throw FormatError("solution json: empty alpha vector");
        for (std::size_t i : sol.support_indices)
            if (i >= sol.alphas.size())
                throw FormatError("solution json: support index out of range");
        return sol;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("solution json: ") + e.what());
    }
}

}  // namespace advdir
