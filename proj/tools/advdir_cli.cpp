// advdir command-line harness: reproducible experiments over the library's
// constructions with serialized CSV/JSON reports and a manifest per run.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "advdir/attack.hpp"
#include "advdir/dataset.hpp"
#include "advdir/errors.hpp"
#include "advdir/idx_io.hpp"
#include "advdir/linear.hpp"
#include "advdir/maxmargin.hpp"
#include "advdir/multiclass.hpp"
#include "advdir/relu.hpp"
#include "advdir/softmargin.hpp"
#include "advdir/seeding.hpp"
#include "advdir/suites.hpp"

namespace {

constexpr const char* kVersion = "1.0.0";

// Exit codes shared by every subcommand.
constexpr int kExitAssertion = 1;
constexpr int kExitParameter = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitFormat = 4;

using advdir::Vec;
using nlohmann::json;

struct CommonOpts {
    std::uint64_t seed = 7;
    std::string out_dir = ".";
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "root random seed");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--format", c.format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::filesystem::path ensure_out(const CommonOpts& c) {
    std::filesystem::path dir(c.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

void write_manifest(const std::filesystem::path& dir, const std::string& command,
                    const CommonOpts& c, json parameters,
                    std::vector<std::string> outputs) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["seed"] = c.seed;
    m["parameters"] = std::move(parameters);
    m["outputs"] = std::move(outputs);
    write_text(dir / "manifest.json", m.dump(2) + "\n");
}

// Shared data-source options: either a synthetic generator or an IDX pair
// restricted to two digits.
struct DataOpts {
    std::string generator = "margin-planted";
    std::size_t dim = 2;
    std::size_t per_class = 20;
    double separation = 1.0;
    std::string idx_images;
    std::string idx_labels;
    int digit_a = 0;
    int digit_b = 1;
    std::size_t limit = 0;
};

void add_data_source(CLI::App* cmd, DataOpts& d) {
    cmd->add_option("--generator", d.generator, "synthetic generator kind")
        ->check(CLI::IsMember({"two-gaussians", "separable-uniform", "margin-planted"}));
    cmd->add_option("--dim", d.dim, "input dimension");
    cmd->add_option("--per-class", d.per_class, "points per class");
    cmd->add_option("--separation", d.separation, "class separation");
    cmd->add_option("--idx-images", d.idx_images, "IDX image file");
    cmd->add_option("--idx-labels", d.idx_labels, "IDX label file");
    cmd->add_option("--digit-a", d.digit_a, "first digit of the binary pair");
    cmd->add_option("--digit-b", d.digit_b, "second digit of the binary pair");
    cmd->add_option("--limit", d.limit, "cap on loaded IDX rows (0 = all)");
}

advdir::GeneratorKind parse_generator(const std::string& name) {
    if (name == "two-gaussians") return advdir::GeneratorKind::TwoGaussians;
    if (name == "separable-uniform") return advdir::GeneratorKind::SeparableUniform;
    return advdir::GeneratorKind::MarginPlanted;
}

advdir::LabeledDataset load_dataset(const DataOpts& d, std::uint64_t seed) {
    if (!d.idx_images.empty() || !d.idx_labels.empty()) {
        if (d.idx_images.empty() || d.idx_labels.empty())
            throw std::invalid_argument("IDX input needs both --idx-images and --idx-labels");
        advdir::LabeledDataset full = advdir::read_idx(d.idx_images, d.idx_labels);
        advdir::LabeledDataset pair =
            full.slice({d.digit_a + 1, d.digit_b + 1})
                .relabel_binary(d.digit_a + 1, d.digit_b + 1);
        if (d.limit > 0 && pair.size() > d.limit) {
            std::vector<std::size_t> rows(d.limit);
            for (std::size_t i = 0; i < d.limit; ++i) rows[i] = i;
            pair = pair.take(rows);
        }
        return pair;
    }
    advdir::GeneratorSpec spec;
    spec.kind = parse_generator(d.generator);
    spec.dim = d.dim;
    spec.per_class = d.per_class;
    spec.seed = seed;
    spec.separation = d.separation;
    return advdir::generate(spec);
}

json direction_json(const advdir::AdversarialDirection& dir) {
    json j;
    j["v"] = dir.v;
    j["provenance"] = advdir::provenance_name(dir.provenance);
    j["dataset_hash"] = dir.dataset_hash;
    j["note"] = dir.note;
    return j;
}

// ---------------------------------------------------------------- commands

int cmd_counterexample(const CommonOpts& c, double cap, double perturb) {
    const auto dir = ensure_out(c);
    advdir::CounterexampleFixture fx = advdir::counterexample_fixture();
    const Vec& w = fx.svm.classifier.w;
    const double b = fx.svm.classifier.b;
    const double w_err = std::hypot(w[0] - 0.0, w[1] - 1.0);
    const double b_err = std::abs(b);
    const bool solver_ok = w_err <= 1e-6 && b_err <= 1e-6;

    bool relu_ok = true;
    for (std::size_t i = 0; i < fx.data.size(); ++i)
        if (fx.relu.classify(fx.data.point(i)) != fx.data.label(i)) relu_ok = false;

    // The flip probe runs along w* (the direction the max-margin construction
    // assigns to the -1 endpoint x3); --perturb-wstar rotates it in the plane
    // to show the no-flip conclusion is specific to the exact direction.
    Vec probe = {w[0], w[1]};
    if (perturb != 0.0) {
        const double cs = std::cos(perturb), sn = std::sin(perturb);
        probe = {cs * probe[0] - sn * probe[1], sn * probe[0] + cs * probe[1]};
    }
    const std::optional<double> flip_c = advdir::flip_search(
        advdir::label_fn(fx.relu), fx.data.point(2), probe, cap);
    const bool no_flip_ok = !flip_c.has_value();
    const bool all_ok = solver_ok && relu_ok && no_flip_ok;

    json rep;
    rep["w_star"] = w;
    rep["b_star"] = b;
    rep["w_error"] = w_err;
    rep["b_error"] = b_err;
    rep["solver_ok"] = solver_ok;
    rep["relu_labels_ok"] = relu_ok;
    rep["probe_direction"] = probe;
    rep["flip_cap"] = cap;
    rep["flip_c"] = flip_c ? json(*flip_c) : json(nullptr);
    rep["no_flip_ok"] = no_flip_ok;
    rep["passed"] = all_ok;

    std::string report_name;
    if (c.format == "json") {
        report_name = "report.json";
        write_text(dir / report_name, rep.dump(2) + "\n");
    } else {
        report_name = "report.csv";
        std::string csv = "quantity,value\n";
        for (auto& [k, v] : rep.items()) csv += k + "," + v.dump() + "\n";
        write_text(dir / report_name, csv);
    }
    write_manifest(dir, "counterexample", c,
                   json{{"cap", cap}, {"perturb_wstar", perturb}}, {report_name});

    if (!solver_ok) std::fprintf(stderr, "solver deviation %.3g exceeds 1e-6\n", std::max(w_err, b_err));
    if (!relu_ok) std::fprintf(stderr, "network mislabels a fixture point\n");
    if (!no_flip_ok) std::fprintf(stderr, "flip found at c=%.6g along the probe direction\n", *flip_c);
    std::printf("counterexample: %s\n", all_ok ? "all checks hold" : "FAILED");
    return all_ok ? 0 : kExitAssertion;
}

int cmd_theorem(const CommonOpts& c, const std::string& id, std::size_t trials) {
    const auto dir = ensure_out(c);
    advdir::SuiteResult suite = advdir::run_theorem_suite(id, trials, c.seed);
    const std::string report_name = id + ".csv";
    write_text(dir / report_name, suite.to_csv());
    json params{{"id", id}, {"trials", trials},
                {"failures", suite.failures},
                {"allowed_failures", suite.allowed_failures}};
    if (!suite.notes.empty()) params["notes"] = suite.notes;
    write_manifest(dir, "theorem", c, params, {report_name});
    std::printf("%s: %zu trials, %zu failures (allowed %zu) -> %s\n", id.c_str(),
                trials, suite.failures, suite.allowed_failures,
                suite.passed() ? "pass" : "FAIL");
    return suite.passed() ? 0 : kExitAssertion;
}

struct TransferOpts {
    advdir::TransferExperimentConfig cfg;
    std::string loss = "hinge";
    std::string step_rule = "signed";
};

int cmd_transfer(const CommonOpts& c, TransferOpts& t) {
    const auto dir = ensure_out(c);
    t.cfg.seed = c.seed;
    t.cfg.attack.loss = t.loss == "squared-hinge" ? advdir::AttackLoss::SquaredHinge
                                                  : advdir::AttackLoss::Hinge;
    t.cfg.attack.step_rule = t.step_rule == "raw" ? advdir::AttackStep::RawGradient
                                                  : advdir::AttackStep::SignedGradient;
    advdir::TransferExperimentResult res = advdir::run_transfer_experiment(t.cfg);

    const std::string csv_name = "transfer.csv";
    write_text(dir / csv_name, res.report.to_csv());
    json summary = json::parse(res.report.summary_json());
    summary["clean_linear_accuracy"] = res.clean_linear_accuracy;
    summary["clean_relu_accuracy"] = res.clean_relu_accuracy;
    summary["epsilons"] = res.epsilons;
    const std::string sum_name = "summary.json";
    write_text(dir / sum_name, summary.dump(2) + "\n");

    json params{{"linear_models", t.cfg.linear_models},
                {"relu_models", t.cfg.relu_models},
                {"train_per_model", t.cfg.train_per_model},
                {"eval_points", t.cfg.eval_points},
                {"relu_width", t.cfg.relu_width},
                {"eps_start", t.cfg.eps_start},
                {"eps_stop", t.cfg.eps_stop},
                {"eps_step", t.cfg.eps_step},
                {"iters", t.cfg.attack.iterations},
                {"step", t.cfg.attack.step},
                {"loss", t.loss},
                {"step_rule", t.step_rule}};
    if (!t.cfg.idx_images.empty()) {
        params["idx_images"] = t.cfg.idx_images;
        params["idx_labels"] = t.cfg.idx_labels;
        params["digit_a"] = t.cfg.digit_a;
        params["digit_b"] = t.cfg.digit_b;
    }
    write_manifest(dir, "transfer", c, params, {csv_name, sum_name});
    std::printf("transfer: clean linear %.3f, clean relu %.3f, %zu epsilons\n",
                res.clean_linear_accuracy, res.clean_relu_accuracy,
                res.epsilons.size());
    return 0;
}

int cmd_train_svm(const CommonOpts& c, const DataOpts& d, const std::string& mode,
                  double tol) {
    const auto dir = ensure_out(c);
    advdir::LabeledDataset data = load_dataset(d, c.seed);
    const advdir::MarginMode mm = mode == "no-bias" ? advdir::MarginMode::NoBias
                                                    : advdir::MarginMode::Biased;
    advdir::MaxMarginSolution sol = advdir::train_max_margin(data, tol, mm);
    const std::string out_name = "solution.json";
    write_text(dir / out_name, advdir::solution_to_json(sol) + "\n");
    write_manifest(dir, "train-svm", c,
                   json{{"mode", mode},
                        {"tol", tol},
                        {"points", data.size()},
                        {"dim", data.dim()},
                        {"dataset_hash", data.content_hash()},
                        {"margin", sol.margin},
                        {"kkt_residual", sol.kkt_residual},
                        {"support_vectors", sol.support_indices.size()}},
                   {out_name});
    std::printf("train-svm: margin %.6g, %zu support vectors, kkt %.3g\n",
                sol.margin, sol.support_indices.size(), sol.kkt_residual);
    return 0;
}

int cmd_train_relu(const CommonOpts& c, const DataOpts& d, std::size_t width,
                   const advdir::ReluTrainConfig& base, std::size_t attempts) {
    const auto dir = ensure_out(c);
    advdir::LabeledDataset data = load_dataset(d, c.seed);
    advdir::ReluTrainResult best;
    for (std::size_t att = 0; att < attempts; ++att) {
        advdir::ReluTrainConfig rc = base;
        rc.seed = advdir::seed_mix(c.seed, 9000 + att);
        best = advdir::train_relu_constrained(data, width, rc);
        if (best.s_accurate) break;
    }
    const std::string out_name = "network.json";
    write_text(dir / out_name, advdir::network_to_json(best.classifier) + "\n");
    write_manifest(dir, "train-relu", c,
                   json{{"width", width},
                        {"epochs", base.epochs},
                        {"step", base.step},
                        {"threshold", base.threshold},
                        {"init_scale", base.init_scale},
                        {"attempts", attempts},
                        {"points", data.size()},
                        {"dataset_hash", data.content_hash()},
                        {"s_accurate", best.s_accurate}},
                   {out_name});
    std::printf("train-relu: width %zu, training accuracy %s\n", width,
                best.s_accurate ? "exact" : "imperfect");
    return 0;
}

struct DirectionOpts {
    std::string kind = "svm";
    int label = -1;
    std::string mode = "biased";
    double tol = 1e-8;
    int class_k = 1;
    int class_l = 2;
    int classes = 3;
    std::size_t alpha_index = 0;
    std::size_t beta_index = 0;
    bool beta_set = false;
};

int cmd_direction(const CommonOpts& c, const DataOpts& d, const DirectionOpts& o) {
    const auto dir = ensure_out(c);
    advdir::AdversarialDirection out_dir_v;
    json params{{"kind", o.kind}};
    if (o.kind == "svm") {
        advdir::LabeledDataset data = load_dataset(d, c.seed);
        const advdir::MarginMode mm = o.mode == "no-bias"
                                          ? advdir::MarginMode::NoBias
                                          : advdir::MarginMode::Biased;
        advdir::MaxMarginSolution sol = advdir::train_max_margin(data, o.tol, mm);
        out_dir_v = advdir::svm_adversarial_direction(sol, o.label, data.content_hash());
        params["label"] = o.label;
        params["mode"] = o.mode;
    } else if (o.kind == "multiclass") {
        advdir::LabeledDataset data = advdir::make_clusters(
            std::size_t(o.classes), d.dim, d.per_class, d.separation, c.seed);
        advdir::MulticlassDirection md =
            advdir::multiclass_adversarial_direction(data, o.class_k, o.class_l);
        out_dir_v = md.direction;
        params["class_k"] = o.class_k;
        params["class_l"] = o.class_l;
        params["classes"] = o.classes;
    } else {  // convex
        advdir::LabeledDataset data = load_dataset(d, c.seed);
        std::size_t alpha = o.alpha_index, beta = o.beta_index;
        if (!o.beta_set) {
            // default endpoints: first -1 point and first +1 point
            bool have_a = false, have_b = false;
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (!have_a && data.label(i) < 0) { alpha = i; have_a = true; }
                if (!have_b && data.label(i) > 0) { beta = i; have_b = true; }
            }
            if (!have_a || !have_b)
                throw advdir::InfeasibleError("dataset lacks one of the two classes");
        }
        out_dir_v = advdir::convex_region_direction(data, alpha, beta);
        params["alpha_index"] = alpha;
        params["beta_index"] = beta;
    }
    const std::string out_name = "direction.json";
    write_text(dir / out_name, direction_json(out_dir_v).dump(2) + "\n");
    write_manifest(dir, "direction", c, params, {out_name});
    std::printf("direction: %s, dim %zu\n",
                advdir::provenance_name(out_dir_v.provenance), out_dir_v.v.size());
    return 0;
}

int cmd_certify(const CommonOpts& c, const std::string& network_path,
                std::size_t count, double lo, double hi, double band,
                std::size_t subset_cap, std::size_t sample_budget) {
    const auto dir = ensure_out(c);
    std::ifstream f(network_path, std::ios::binary);
    if (!f) throw advdir::FormatError("cannot open network file " + network_path);
    std::string text((std::istreambuf_iterator<char>(f)),
                     std::istreambuf_iterator<char>());
    advdir::ReluClassifier clf = advdir::network_from_json(text);
    const std::size_t net_dim = clf.net.dim();
    const std::vector<Vec> points = advdir::halton_box(
        count, net_dim, Vec(net_dim, lo), Vec(net_dim, hi));
    advdir::CertificateReport rep = advdir::convexity_certificate(
        clf, points, band, subset_cap, sample_budget, c.seed);

    const std::string report_name = "certificate.csv";
    std::string csv = "point_id,f_value,label,best_subset_value,match\n";
    for (const advdir::CertificateMismatch& m : rep.mismatches) {
        char line[160];
        std::snprintf(line, sizeof line, "%zu,%.17g,%d,%.17g,0\n", m.point_index,
                      m.f_value, m.label, m.best_subset_value);
        csv += line;
    }
    write_text(dir / report_name, csv);
    write_manifest(dir, "certify", c,
                   json{{"network", network_path},
                        {"points", count},
                        {"lo", lo},
                        {"hi", hi},
                        {"boundary_band", band},
                        {"subset_cap", subset_cap},
                        {"sample_budget", sample_budget},
                        {"checked", rep.checked},
                        {"skipped_boundary", rep.skipped_boundary},
                        {"subset_count", rep.subset_count},
                        {"sampled_fallback", rep.sampled_fallback},
                        {"mismatches", rep.mismatches.size()},
                        {"passed", rep.passed()}},
                   {report_name});
    std::printf("certify: %zu checked, %zu boundary-skipped, %zu mismatches -> %s\n",
                rep.checked, rep.skipped_boundary, rep.mismatches.size(),
                rep.passed() ? "pass" : "FAIL");
    return rep.passed() ? 0 : kExitAssertion;
}

int cmd_ingest_idx(const CommonOpts& c, const std::string& images,
                   const std::string& labels) {
    const auto dir = ensure_out(c);
    advdir::LabeledDataset data = advdir::read_idx(images, labels);
    json counts = json::object();
    for (int lab : data.present_labels()) {
        std::size_t n = 0;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (data.label(i) == lab) ++n;
        counts[std::to_string(lab)] = n;
    }
    json rep{{"points", data.size()},
             {"dim", data.dim()},
             {"radius", data.radius()},
             {"content_hash", data.content_hash()},
             {"label_counts", counts}};
    std::string report_name;
    if (c.format == "csv") {
        report_name = "ingest.csv";
        std::string csv = "quantity,value\n";
        for (auto& [k, v] : rep.items()) csv += k + "," + v.dump() + "\n";
        write_text(dir / report_name, csv);
    } else {
        report_name = "ingest.json";
        write_text(dir / report_name, rep.dump(2) + "\n");
    }
    write_manifest(dir, "ingest-idx", c,
                   json{{"images", images}, {"labels", labels}}, {report_name});
    std::printf("ingest-idx: %zu points, dim %zu\n", data.size(), data.dim());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"adversarial-direction experiment harness"};
    app.require_subcommand(1);
    CommonOpts common;

    auto* cx = app.add_subcommand("counterexample",
                                  "run the planar fixture's assertion set");
    double cx_cap = 1e6, cx_perturb = 0.0;
    cx->add_option("--cap", cx_cap, "flip search scaling cap");
    cx->add_option("--perturb-wstar", cx_perturb,
                   "rotate the probe direction by this many radians");
    add_common(cx, common);

    auto* th = app.add_subcommand("theorem", "run a property suite");
    std::string th_id;
    std::size_t th_trials = 10;
    th->add_option("--id", th_id, "suite id")->required();
    th->add_option("--trials", th_trials, "trial count");
    add_common(th, common);

    auto* tr = app.add_subcommand("transfer", "ensemble transfer experiment");
    TransferOpts topts;
    tr->add_option("--linear-models", topts.cfg.linear_models, "linear ensemble size");
    tr->add_option("--relu-models", topts.cfg.relu_models, "network ensemble size");
    tr->add_option("--train-per-model", topts.cfg.train_per_model,
                   "training points per class per model");
    tr->add_option("--eval-points", topts.cfg.eval_points, "evaluation set size");
    tr->add_option("--width", topts.cfg.relu_width, "network hidden width");
    tr->add_option("--eps-start", topts.cfg.eps_start, "first epsilon");
    tr->add_option("--eps-stop", topts.cfg.eps_stop, "last epsilon");
    tr->add_option("--eps-step", topts.cfg.eps_step, "epsilon increment");
    tr->add_option("--iters", topts.cfg.attack.iterations, "attack iterations");
    tr->add_option("--step", topts.cfg.attack.step, "attack step size");
    tr->add_option("--loss", topts.loss, "attack loss")
        ->check(CLI::IsMember({"hinge", "squared-hinge"}));
    tr->add_option("--step-rule", topts.step_rule, "gradient step rule")
        ->check(CLI::IsMember({"signed", "raw"}));
    tr->add_option("--idx-images", topts.cfg.idx_images, "IDX image file");
    tr->add_option("--idx-labels", topts.cfg.idx_labels, "IDX label file");
    tr->add_option("--digit-a", topts.cfg.digit_a, "first digit");
    tr->add_option("--digit-b", topts.cfg.digit_b, "second digit");
    add_common(tr, common);

    auto* ts = app.add_subcommand("train-svm", "fit the max-margin separator");
    DataOpts ts_data;
    std::string ts_mode = "biased";
    double ts_tol = 1e-8;
    add_data_source(ts, ts_data);
    ts->add_option("--mode", ts_mode, "margin mode")
        ->check(CLI::IsMember({"biased", "no-bias"}));
    ts->add_option("--tol", ts_tol, "KKT tolerance");
    add_common(ts, common);

    auto* tn = app.add_subcommand("train-relu", "fit a constrained two-layer network");
    DataOpts tn_data;
    std::size_t tn_width = 8, tn_attempts = 10;
    advdir::ReluTrainConfig tn_cfg;
    add_data_source(tn, tn_data);
    tn->add_option("--width", tn_width, "hidden width");
    tn->add_option("--epochs", tn_cfg.epochs, "training epochs");
    tn->add_option("--step", tn_cfg.step, "training step size");
    tn->add_option("--threshold", tn_cfg.threshold, "decision threshold");
    tn->add_option("--init-scale", tn_cfg.init_scale, "weight init scale");
    tn->add_option("--attempts", tn_attempts, "restarts until exact fit");
    add_common(tn, common);

    auto* dr = app.add_subcommand("direction", "construct an adversarial direction");
    DataOpts dr_data;
    DirectionOpts dr_opts;
    add_data_source(dr, dr_data);
    dr->add_option("--kind", dr_opts.kind, "construction")
        ->check(CLI::IsMember({"svm", "multiclass", "convex"}));
    dr->add_option("--label", dr_opts.label, "source label for the svm kind")
        ->check(CLI::IsMember({-1, 1}));
    dr->add_option("--mode", dr_opts.mode, "margin mode for the svm kind")
        ->check(CLI::IsMember({"biased", "no-bias"}));
    dr->add_option("--tol", dr_opts.tol, "KKT tolerance for the svm kind");
    dr->add_option("--class-k", dr_opts.class_k, "attacked class");
    dr->add_option("--class-l", dr_opts.class_l, "target class");
    dr->add_option("--classes", dr_opts.classes, "cluster count for multiclass data");
    dr->add_option("--alpha-index", dr_opts.alpha_index, "convex-class endpoint");
    auto* beta_opt =
        dr->add_option("--beta-index", dr_opts.beta_index, "other-class endpoint");
    add_common(dr, common);

    auto* cf = app.add_subcommand("certify", "validate a network's half-space form");
    std::string cf_network;
    std::size_t cf_points = 10000, cf_subset_cap = 20, cf_budget = 4096;
    double cf_lo = -6.0, cf_hi = 6.0, cf_band = 1e-9;
    cf->add_option("--network", cf_network, "network.json to certify")->required();
    cf->add_option("--points", cf_points, "trial point count");
    cf->add_option("--lo", cf_lo, "box lower corner");
    cf->add_option("--hi", cf_hi, "box upper corner");
    cf->add_option("--band", cf_band, "boundary exclusion band");
    cf->add_option("--subset-cap", cf_subset_cap,
                   "max hidden width for exhaustive subsets");
    cf->add_option("--sample-budget", cf_budget, "sampled subsets past the cap");
    add_common(cf, common);

    auto* ix = app.add_subcommand("ingest-idx", "summarize an IDX pair");
    std::string ix_images, ix_labels;
    ix->add_option("--images", ix_images, "IDX image file")->required();
    ix->add_option("--labels", ix_labels, "IDX label file")->required();
    add_common(ix, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitParameter;
    }

    try {
        if (cx->parsed()) return cmd_counterexample(common, cx_cap, cx_perturb);
        if (th->parsed()) return cmd_theorem(common, th_id, th_trials);
        if (tr->parsed()) return cmd_transfer(common, topts);
        if (ts->parsed()) return cmd_train_svm(common, ts_data, ts_mode, ts_tol);
        if (tn->parsed())
            return cmd_train_relu(common, tn_data, tn_width, tn_cfg, tn_attempts);
        if (dr->parsed()) {
            dr_opts.beta_set = beta_opt->count() > 0;
            return cmd_direction(common, dr_data, dr_opts);
        }
        if (cf->parsed())
            return cmd_certify(common, cf_network, cf_points, cf_lo, cf_hi,
                               cf_band, cf_subset_cap, cf_budget);
        if (ix->parsed()) return cmd_ingest_idx(common, ix_images, ix_labels);
    } catch (const advdir::FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitFormat;
    } catch (const advdir::InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "parameter error: %s\n", e.what());
        return kExitParameter;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAssertion;
    }
    return 0;
}
