// ilh: train/encode/search/eval/ortho/synth/bench for independent-bit hashing.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ilh/affinity.hpp"
#include "ilh/baselines.hpp"
#include "ilh/diagnostics.hpp"
#include "ilh/ensemble.hpp"
#include "ilh/io.hpp"
#include "ilh/model_io.hpp"
#include "ilh/retrieval.hpp"
#include "ilh/rng.hpp"
#include "ilh/synth.hpp"
#include "ilh/types.hpp"

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// One manifest next to every output: <output>.manifest.json. Holds the full
// argv plus resolved config, so any run can be reproduced bit-exactly.
struct Manifest {
    json j;

    Manifest(const std::string& command, const std::vector<std::string>& argv) {
        j["command"] = command;
        j["argv"] = argv;
        j["config"] = json::object();
        j["inputs"] = json::object();
        j["outputs"] = json::array();
    }

    void input(const std::string& path) { j["inputs"][path] = ilh::fnv1a_digest(path); }
    void output(const std::string& path) { j["outputs"].push_back(path); }

    void write(double wall_seconds) {
        j["wall_seconds"] = wall_seconds;
        for (const auto& out : j["outputs"]) {
            const auto path = out.get<std::string>() + ".manifest.json";
            std::ofstream os(path);
            os << j.dump(2) << '\n';
            if (!os) throw std::runtime_error(path + ": cannot write manifest");
        }
    }
};

ilh::FeatureMatrix load_features(const std::string& path) {
    if (path.size() > 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
        return ilh::read_features_csv(path);
    return ilh::read_features(path);
}

void write_matrix_tsv(const std::string& path, const ilh::Matrix& m) {
    auto os = ilh::detail::open_out(path, std::ios::out);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j)
            os << (j ? "\t" : "") << ilh::detail::g17(m(i, j));
        os << '\n';
    }
    if (!os) ilh::detail::io_fail(path, "write failed");
}

void write_histogram_tsv(const std::string& path, const ilh::Histogram& h,
                         const ilh::Histogram& control) {
    ilh::require(h.counts.size() == control.counts.size(), "histogram/control bin mismatch");
    auto os = ilh::detail::open_out(path, std::ios::out);
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        os << ilh::detail::g17(h.edges[i]) << '\t' << ilh::detail::g17(h.edges[i + 1]) << '\t'
           << h.counts[i] << '\t' << control.counts[i] << '\n';
    if (!os) ilh::detail::io_fail(path, "write failed");
}

void report_warnings(const ilh::HashEnsemble& e) {
    for (const auto& w : e.warnings) std::cerr << "warning: " << w << '\n';
}

struct TrainArgs {
    std::string features, labels, affinities, out;
    std::string method = "ilh", hash = "linear", loss = "lap", diversity;
    std::string sampling = "auto", centers_mode = "shared";
    std::size_t bits = 32, train_size = 0, kernel_centers = 500, member_bits = 8;
    std::size_t s_pos = 100, s_neg = 100, k_pos = 50;
    std::size_t sweeps = 5, iters = 1, jobs = 1, dim = 0;
    std::size_t svm_epochs = 1000;
    double feature_fraction = 0.0, svm_c = 1.0, svm_tol = 1e-4;
    bool unsupervised = false;
    std::uint64_t seed = 0;
};

ilh::AffinitySet make_affinities(const TrainArgs& a, const ilh::FeatureMatrix& data,
                                 Manifest& man) {
    const std::uint64_t aseed = ilh::mix_seed(a.seed, 0xAFFu);
    if (!a.affinities.empty()) {
        man.input(a.affinities);
        auto aff = ilh::read_affinities(a.affinities);
        for (const auto& p : aff.pairs)
            ilh::require(static_cast<std::size_t>(p.n) < data.n_points() &&
                             static_cast<std::size_t>(p.m) < data.n_points(),
                         "affinity index out of range for feature file");
        return aff;
    }
    if (a.unsupervised) {
        auto built = ilh::build_affinities_unsupervised(data, a.k_pos, a.s_neg, aseed);
        if (built.conflict_pairs)
            std::cerr << "warning: " << built.conflict_pairs << " conflicting pairs dropped\n";
        return std::move(built.affinities);
    }
    ilh::require(!a.labels.empty(), "train: need --labels, --affinities, or --unsupervised");
    man.input(a.labels);
    const auto labels = ilh::read_labels(a.labels);
    auto built = ilh::build_affinities_supervised(data, labels, a.s_pos, a.s_neg, aseed);
    if (built.conflict_pairs)
        std::cerr << "warning: " << built.conflict_pairs << " conflicting pairs dropped\n";
    if (built.lonely_points)
        std::cerr << "warning: " << built.lonely_points << " points in singleton classes\n";
    return std::move(built.affinities);
}

template <typename T>
T parse_enum(const std::string& s, const std::map<std::string, T>& table, const char* what) {
    const auto it = table.find(s);
    if (it == table.end()) throw std::runtime_error(std::string("unknown ") + what + " '" + s + "'");
    return it->second;
}

ilh::TrainOptions assemble_options(const TrainArgs& a) {
    ilh::TrainOptions opts;
    opts.family = parse_enum<ilh::HashFamily>(
        a.hash, {{"linear", ilh::HashFamily::linear}, {"kernel", ilh::HashFamily::kernel}},
        "hash family");
    opts.loss = parse_enum<ilh::LossKind>(
        a.loss,
        {{"lap", ilh::LossKind::lap}, {"ksh", ilh::LossKind::ksh}, {"bre", ilh::LossKind::bre}},
        "loss");
    opts.kernel.centers = a.kernel_centers;
    opts.kernel.mode = parse_enum<ilh::CentersMode>(
        a.centers_mode, {{"shared", ilh::CentersMode::shared}, {"private", ilh::CentersMode::priv}},
        "centers mode");
    opts.svm.C = a.svm_c;
    opts.svm.tolerance = a.svm_tol;
    opts.svm.max_epochs = a.svm_epochs;
    opts.max_sweeps = a.sweeps;

    auto& div = opts.diversity;
    div.master_seed = a.seed;
    for (char c : a.diversity) {
        switch (c) {
            case 'i': div.init_mode = ilh::InitMode::random; break;
            case 't': break;  // resolved with --sampling below
            case 'f': break;  // resolved with --feature-fraction below
            default: throw std::runtime_error(std::string("unknown diversity letter '") + c + "'");
        }
    }
    const bool wants_t = a.diversity.find('t') != std::string::npos;
    if (a.sampling == "auto")
        div.sampling = wants_t ? ilh::SamplingMode::disjoint : ilh::SamplingMode::none;
    else
        div.sampling = parse_enum<ilh::SamplingMode>(a.sampling,
                                                     {{"none", ilh::SamplingMode::none},
                                                      {"disjoint", ilh::SamplingMode::disjoint},
                                                      {"random", ilh::SamplingMode::random},
                                                      {"bootstrap", ilh::SamplingMode::bootstrap}},
                                                     "sampling mode");
    div.sample_size = a.train_size;
    if (a.train_size > 0 && div.sampling == ilh::SamplingMode::none)
        throw std::runtime_error("train: --train-size needs --sampling (or --diversity t)");

    const bool wants_f = a.diversity.find('f') != std::string::npos;
    if (a.feature_fraction > 0.0)
        div.feature_fraction = a.feature_fraction;
    else
        div.feature_fraction = wants_f ? 0.5 : 1.0;
    return opts;
}

json config_json(const TrainArgs& a) {
    json c;
    c["method"] = a.method;
    c["bits"] = a.bits;
    c["hash"] = a.hash;
    c["loss"] = a.loss;
    c["diversity"] = a.diversity;
    c["sampling"] = a.sampling;
    c["train_size"] = a.train_size;
    c["feature_fraction"] = a.feature_fraction;
    c["kernel_centers"] = a.kernel_centers;
    c["centers_mode"] = a.centers_mode;
    c["member_bits"] = a.member_bits;
    c["s_pos"] = a.s_pos;
    c["s_neg"] = a.s_neg;
    c["k_pos"] = a.k_pos;
    c["unsupervised"] = a.unsupervised;
    c["sweeps"] = a.sweeps;
    c["iters"] = a.iters;
    c["jobs"] = a.jobs;
    c["svm_c"] = a.svm_c;
    c["svm_tol"] = a.svm_tol;
    c["svm_epochs"] = a.svm_epochs;
    c["seed"] = a.seed;
    c["dim"] = a.dim;
    return c;
}

int run_train(const TrainArgs& a, const std::vector<std::string>& argv) {
    const auto t0 = Clock::now();
    Manifest man("train", argv);
    man.j["config"] = config_json(a);
    man.j["seed"] = a.seed;

    ilh::HashEnsemble model;
    if (a.method == "lsh" && a.features.empty()) {
        ilh::require(a.dim > 0, "train: lsh without --features needs --dim");
        model = ilh::lsh_train(a.dim, a.bits, a.seed);
    } else {
        ilh::require(!a.features.empty(), "train: --features is required");
        man.input(a.features);
        const auto data = load_features(a.features);
        if (a.method == "ilh") {
            const auto aff = make_affinities(a, data, man);
            model = ilh::train_ensemble(data, aff, a.bits, assemble_options(a), a.jobs);
        } else if (a.method == "kshcut") {
            ilh::KshcutConfig cfg;
            cfg.outer_iterations = a.iters;
            cfg.seed = a.seed;
            auto opts = assemble_options(a);
            opts.diversity = {};  // kshcut trains all bits on one shared set
            if (a.train_size > 0 && a.train_size < data.n_points()) {
                // Shared subset: restrict both features and pairs up front.
                std::vector<std::int32_t> subset(data.n_points());
                std::iota(subset.begin(), subset.end(), 0);
                auto rng = ilh::make_rng(ilh::stream_seed(a.seed, ilh::Stream::subset));
                std::shuffle(subset.begin(), subset.end(), rng);
                subset.resize(a.train_size);
                std::sort(subset.begin(), subset.end());
                const auto sub_data = data.gather_rows(subset);
                ilh::AffinitySet aff;
                if (!a.affinities.empty()) {
                    aff = ilh::restrict_affinities(make_affinities(a, data, man), subset,
                                                   data.n_points());
                } else if (a.unsupervised) {
                    aff = make_affinities(a, sub_data, man);
                } else {
                    ilh::require(!a.labels.empty(),
                                 "train: need --labels, --affinities, or --unsupervised");
                    man.input(a.labels);
                    const auto labels = ilh::read_labels(a.labels);
                    ilh::LabelVector sub_labels(subset.size());
                    for (std::size_t i = 0; i < subset.size(); ++i)
                        sub_labels[i] = labels[static_cast<std::size_t>(subset[i])];
                    auto built = ilh::build_affinities_supervised(
                        sub_data, sub_labels, a.s_pos, a.s_neg, ilh::mix_seed(a.seed, 0xAFFu));
                    aff = std::move(built.affinities);
                }
                model = ilh::kshcut_train(sub_data, aff, a.bits, cfg, opts);
            } else {
                const auto aff = make_affinities(a, data, man);
                model = ilh::kshcut_train(data, aff, a.bits, cfg, opts);
            }
        } else if (a.method == "lsh") {
            model = ilh::lsh_train(data.dim(), a.bits, a.seed);
        } else if (a.method == "tpca") {
            model = ilh::tpca_train(data, a.bits, a.seed);
        } else if (a.method == "tpca-bag") {
            model = ilh::tpca_bagging_train(data, a.bits, a.member_bits, a.seed);
        } else {
            throw std::runtime_error("unknown method '" + a.method + "'");
        }
    }

    report_warnings(model);
    ilh::write_model(a.out, model);
    man.output(a.out);
    json per_bit = json::array();
    for (const auto& bit : model.bits) per_bit.push_back(bit.train_seconds);
    man.j["per_bit_seconds"] = per_bit;
    man.write(seconds_since(t0));
    std::cout << "trained " << model.n_bits() << " bits -> " << a.out << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_all(argv, argv + argc);
    CLI::App app{"independent-bit hashing toolkit"};
    app.require_subcommand(1);

    // ---- synth ----
    struct {
        std::size_t clusters = 10, dim = 32, points = 1000;
        double spread = 0.1;
        std::uint64_t seed = 0;
        std::string out, labels_out;
    } sy;
    auto* synth = app.add_subcommand("synth", "generate clustered Gaussian data");
    synth->add_option("--clusters", sy.clusters)->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
    synth->add_option("--dim", sy.dim);
    synth->add_option("--points", sy.points);
    synth->add_option("--spread", sy.spread);
    synth->add_option("--seed", sy.seed);
    synth->add_option("--out", sy.out)->required();
    synth->add_option("--labels-out", sy.labels_out);
    synth->callback([&] {
        const auto t0 = Clock::now();
        Manifest man("synth", argv_all);
        man.j["config"] = {{"clusters", sy.clusters}, {"dim", sy.dim},   {"points", sy.points},
                           {"spread", sy.spread},     {"seed", sy.seed}};
        const auto ds = ilh::synth_dataset(sy.clusters, sy.dim, sy.points, sy.spread, sy.seed);
        ilh::write_features(sy.out, ds.features);
        man.output(sy.out);
        if (!sy.labels_out.empty()) {
            ilh::write_labels(sy.labels_out, ds.labels);
            man.output(sy.labels_out);
        }
        man.write(seconds_since(t0));
    });

    // ---- train ----
    TrainArgs tr;
    auto* train = app.add_subcommand("train", "train a hashing model");
    train->add_option("--features", tr.features, "feature file (.csv or binary)");
    train->add_option("--labels", tr.labels);
    train->add_option("--affinities", tr.affinities, "precomputed pair file");
    train->add_flag("--unsupervised", tr.unsupervised, "neighbor-based affinities");
    train->add_option("--method", tr.method)
        ->check(CLI::IsMember({"ilh", "kshcut", "lsh", "tpca", "tpca-bag"}));
    train->add_option("--bits", tr.bits)->required();
    train->add_option("--hash", tr.hash)->check(CLI::IsMember({"linear", "kernel"}));
    train->add_option("--loss", tr.loss)->check(CLI::IsMember({"lap", "ksh", "bre"}));
    train->add_option("--diversity", tr.diversity, "any of: i (init), t (subsets), f (features)");
    train->add_option("--sampling", tr.sampling,
                      "disjoint/random draw per-bit subsets; bootstrap bags one shared subset")
        ->check(CLI::IsMember({"auto", "none", "disjoint", "random", "bootstrap"}));
    train->add_option("--train-size", tr.train_size, "per-bit subset size");
    train->add_option("--feature-fraction", tr.feature_fraction);
    train->add_option("--kernel-centers", tr.kernel_centers);
    train->add_option("--centers-mode", tr.centers_mode)
        ->check(CLI::IsMember({"shared", "private"}));
    train->add_option("--member-bits", tr.member_bits, "bits per bagged spectral member");
    train->add_option("--s-pos", tr.s_pos);
    train->add_option("--s-neg", tr.s_neg);
    train->add_option("--k-pos", tr.k_pos, "neighbors for unsupervised positives");
    train->add_option("--sweeps", tr.sweeps, "max alternating sweeps");
    train->add_option("--iters", tr.iters, "outer iterations (kshcut)");
    train->add_option("--svm-c", tr.svm_c);
    train->add_option("--svm-tol", tr.svm_tol);
    train->add_option("--svm-epochs", tr.svm_epochs);
    train->add_option("--dim", tr.dim, "input dimension (lsh without features)");
    train->add_option("--seed", tr.seed);
    train->add_option("--jobs", tr.jobs)->envname("ILH_JOBS");
    train->add_option("--out", tr.out)->required();
    train->callback([&] { run_train(tr, argv_all); });

    // ---- encode ----
    struct {
        std::string model, features, out, dump;
    } en;
    auto* enc = app.add_subcommand("encode", "hash features into binary codes");
    enc->add_option("--model", en.model)->required();
    enc->add_option("--features", en.features)->required();
    enc->add_option("--out", en.out)->required();
    enc->add_option("--dump", en.dump, "also write codes as +-1 text");
    enc->callback([&] {
        const auto t0 = Clock::now();
        Manifest man("encode", argv_all);
        man.input(en.model);
        man.input(en.features);
        const auto model = ilh::read_model(en.model);
        const auto data = load_features(en.features);
        const auto codes = ilh::encode(model, data);
        ilh::write_codes(en.out, codes);
        man.output(en.out);
        if (!en.dump.empty()) {
            auto os = ilh::detail::open_out(en.dump, std::ios::out);
            for (std::size_t i = 0; i < codes.n_points(); ++i) {
                for (std::size_t j = 0; j < codes.n_bits(); ++j)
                    os << (j ? " " : "") << static_cast<int>(codes.get(i, j));
                os << '\n';
            }
            man.output(en.dump);
        }
        man.write(seconds_since(t0));
        std::cout << "encoded " << codes.n_points() << " points x " << codes.n_bits()
                  << " bits -> " << en.out << '\n';
    });

    // ---- search ----
    struct {
        std::string db, queries, out;
        std::size_t k = 100;
    } se;
    auto* search = app.add_subcommand("search", "Hamming k-NN over code files");
    search->add_option("--db", se.db)->required();
    search->add_option("--queries", se.queries)->required();
    search->add_option("--k", se.k);
    search->add_option("--out", se.out)->required();
    search->callback([&] {
        const auto t0 = Clock::now();
        Manifest man("search", argv_all);
        man.input(se.db);
        man.input(se.queries);
        const auto db = ilh::read_codes(se.db);
        const auto queries = ilh::read_codes(se.queries);
        const auto result = ilh::hamming_knn(queries, db, se.k);
        ilh::write_results_tsv(se.out, result);
        man.output(se.out);
        man.write(seconds_since(t0));
        std::cout << "searched " << queries.n_points() << " queries, k=" << se.k << " -> "
                  << se.out << '\n';
    });

    // ---- eval ----
    struct {
        std::string results, query_labels, db_labels, out;
        std::vector<std::size_t> ks;
    } ev;
    auto* eval = app.add_subcommand("eval", "precision/recall against label ground truth");
    eval->add_option("--results", ev.results)->required();
    eval->add_option("--query-labels", ev.query_labels)->required();
    eval->add_option("--db-labels", ev.db_labels)->required();
    eval->add_option("--k", ev.ks, "prefix sizes to evaluate (default: full list)");
    eval->add_option("--out", ev.out)->required();
    eval->callback([&] {
        const auto t0 = Clock::now();
        Manifest man("eval", argv_all);
        man.input(ev.results);
        man.input(ev.query_labels);
        man.input(ev.db_labels);
        const auto result = ilh::read_results_tsv(ev.results);
        const auto ql = ilh::read_labels(ev.query_labels);
        const auto dl = ilh::read_labels(ev.db_labels);
        ilh::require(ql.size() == result.neighbors.size(),
                     "eval: query label count != query count in results");
        const auto gt = ilh::ground_truth_labels(ql, dl);
        auto ks = ev.ks;
        if (ks.empty()) ks.push_back(result.k);
        auto os = ilh::detail::open_out(ev.out, std::ios::out);
        for (auto k : ks) {
            ilh::RetrievalResult prefix;
            prefix.k = k;
            prefix.neighbors.reserve(result.neighbors.size());
            for (const auto& row : result.neighbors) {
                auto cut = row;
                if (cut.size() > k) cut.resize(k);
                prefix.neighbors.push_back(std::move(cut));
            }
            const auto pr = ilh::precision_recall(prefix, gt);
            os << k << '\t' << ilh::detail::g17(pr.mean_precision) << '\t'
               << ilh::detail::g17(pr.mean_recall) << '\n';
            std::cout << "k=" << k << " precision=" << pr.mean_precision
                      << " recall=" << pr.mean_recall << " (evaluated " << pr.evaluated
                      << ", skipped " << pr.skipped_empty << ")\n";
        }
        if (!os) ilh::detail::io_fail(ev.out, "write failed");
        man.output(ev.out);
        man.write(seconds_since(t0));
    });

    // ---- ortho ----
    struct {
        std::string model, features, prefix;
        std::uint64_t seed = 0;
    } ort;
    auto* ortho = app.add_subcommand("ortho", "code/weight correlation diagnostics");
    ortho->add_option("--model", ort.model)->required();
    ortho->add_option("--features", ort.features)->required();
    ortho->add_option("--seed", ort.seed, "seed for the random-vector control");
    ortho->add_option("--out", ort.prefix, "output path prefix")->required();
    ortho->callback([&] {
        const auto t0 = Clock::now();
        Manifest man("ortho", argv_all);
        man.input(ort.model);
        man.input(ort.features);
        const auto model = ilh::read_model(ort.model);
        const auto data = load_features(ort.features);
        const auto codes = ilh::encode(model, data);
        const auto rep = ilh::make_ortho_report(model, codes, ort.seed);
        write_matrix_tsv(ort.prefix + ".codes_gram.tsv", rep.c_codes);
        man.output(ort.prefix + ".codes_gram.tsv");
        write_histogram_tsv(ort.prefix + ".hist_codes.tsv", rep.hist_codes, rep.control_codes);
        man.output(ort.prefix + ".hist_codes.tsv");
        const bool have_w = rep.c_weights.rows > 0;
        if (have_w) {
            write_matrix_tsv(ort.prefix + ".weights_gram.tsv", rep.c_weights);
            man.output(ort.prefix + ".weights_gram.tsv");
            write_histogram_tsv(ort.prefix + ".hist_weights.tsv", rep.hist_weights,
                                rep.control_weights);
            man.output(ort.prefix + ".hist_weights.tsv");
        }
        {
            const auto path = ort.prefix + ".measures.tsv";
            auto os = ilh::detail::open_out(path, std::ios::out);
            os << "measure_codes\t" << ilh::detail::g17(rep.measure_codes) << '\n';
            if (have_w) os << "measure_weights\t" << ilh::detail::g17(rep.measure_weights) << '\n';
            if (!os) ilh::detail::io_fail(path, "write failed");
            man.output(path);
        }
        man.write(seconds_since(t0));
        std::cout << "measure_codes=" << rep.measure_codes;
        if (have_w) std::cout << " measure_weights=" << rep.measure_weights;
        std::cout << '\n';
    });

    // ---- bench ----
    struct {
        std::size_t bits = 1, clusters = 10, dim = 32, s_pos = 50, s_neg = 50, jobs = 1;
        double spread = 0.1;
        std::uint64_t seed = 0;
        std::vector<std::size_t> sizes{2000, 5000, 10000, 20000};
        std::string out;
    } be;
    auto* bench = app.add_subcommand("bench", "per-bit training time vs data size");
    bench->add_option("--bits", be.bits);
    bench->add_option("--clusters", be.clusters);
    bench->add_option("--dim", be.dim);
    bench->add_option("--spread", be.spread);
    bench->add_option("--s-pos", be.s_pos);
    bench->add_option("--s-neg", be.s_neg);
    bench->add_option("--sizes", be.sizes);
    bench->add_option("--seed", be.seed);
    bench->add_option("--jobs", be.jobs)->envname("ILH_JOBS");
    bench->add_option("--out", be.out)->required();
    bench->callback([&] {
        const auto t0 = Clock::now();
        Manifest man("bench", argv_all);
        man.j["config"] = {{"bits", be.bits},   {"clusters", be.clusters}, {"dim", be.dim},
                           {"spread", be.spread}, {"sizes", be.sizes},       {"seed", be.seed}};
        auto os = ilh::detail::open_out(be.out, std::ios::out);
        for (auto n : be.sizes) {
            const auto ds = ilh::synth_dataset(be.clusters, be.dim, n, be.spread, be.seed);
            auto built = ilh::build_affinities_supervised(ds.features, ds.labels, be.s_pos,
                                                          be.s_neg, ilh::mix_seed(be.seed, 0xAFFu));
            ilh::TrainOptions opts;
            opts.diversity.master_seed = be.seed;
            const auto bt0 = Clock::now();
            const auto model =
                ilh::train_ensemble(ds.features, built.affinities, be.bits, opts, be.jobs);
            const double wall = seconds_since(bt0);
            const double per_bit = wall / static_cast<double>(be.bits);
            os << n << '\t' << ilh::detail::g17(per_bit) << '\n';
            os.flush();
            std::cout << "N=" << n << " seconds_per_bit=" << per_bit << '\n';
            (void)model;
        }
        if (!os) ilh::detail::io_fail(be.out, "write failed");
        man.output(be.out);
        man.write(seconds_since(t0));
    });

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
