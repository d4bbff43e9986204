#include "planeguard/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "planeguard/bitplane.hpp"
#include "planeguard/classifier.hpp"
#include "planeguard/dataset.hpp"
#include "planeguard/error.hpp"
#include "planeguard/experiment.hpp"
#include "planeguard/feature_io.hpp"
#include "planeguard/features.hpp"
#include "planeguard/image_io.hpp"
#include "planeguard/parallel.hpp"
#include "planeguard/residuals.hpp"
#include "planeguard/rng.hpp"

namespace planeguard::cli {
namespace fs = std::filesystem;
namespace {

struct Options {
    std::size_t workers = 0;
    bool quiet = false;

    // shared
    int s = 0;
    std::string in, out;

    // encrypt
    std::string key_hex, nonce_hex;

    // residual dump
    std::string kind;

    // extract / train / evaluate
    std::string preprocess = "zero";
    std::string manifest, features, labels, model, csv;
    double lambda = 1.0;
    bool cv = false;

    // experiment
    std::string s_range = "0..8";
    std::uint64_t seed = 0;
    std::string report;
    double ratio = 0.8;
    bool force = false;

    // synth
    std::size_t n = 200;
    std::size_t size = 256;
    std::string out_dir;

    // tradeoff
    std::string forensics, recognizability;
};

std::string roster_digest() {
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << roster_hash();
    return ss.str();
}

std::vector<int> parse_s_range(const std::string& text) {
    std::vector<int> out;
    auto parse_one = [&](const std::string& t) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            check_plane_count(v);
            return v;
        } catch (const InvalidArgument&) {
            throw;
        } catch (const std::exception&) {
            throw UsageError("invalid --s-range '" + text + "' (expected e.g. 0..8 or 1,3,5)");
        }
    };
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const int lo = parse_one(text.substr(0, dots));
        const int hi = parse_one(text.substr(dots + 2));
        if (lo > hi) throw UsageError("empty --s-range '" + text + "'");
        for (int s = lo; s <= hi; ++s) out.push_back(s);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_one(item));
    if (out.empty()) throw UsageError("empty --s-range");
    return out;
}

Key resolve_key(const std::string& flag, bool required, std::uint64_t seed) {
    if (!flag.empty()) return parse_key_hex(flag);
    if (const char* env = std::getenv(kKeyEnv); env && *env) return parse_key_hex(env);
    if (required) throw UsageError("an encryption key is required: pass --key HEX or set " + std::string(kKeyEnv));
    Rng rng(seed ^ 0x6b65797374726561ull);
    Key key{};
    for (auto& b : key) b = static_cast<std::uint8_t>(rng.next() >> 56);
    return key;
}

std::vector<Label> load_labels_for(const std::string& features, const std::string& labels_flag) {
    const std::string path = labels_flag.empty() ? features + ".labels" : labels_flag;
    std::ifstream in(path);
    if (!in) throw IoError("cannot open labels file " + path + " (pass --labels)");
    return read_labels(in);
}

LabeledFeatureSet load_feature_set(const std::string& features, const std::string& labels_flag) {
    if (fs::path(features).extension() == ".csv") {
        std::ifstream in(features);
        if (!in) throw IoError("cannot open " + features);
        return read_feature_csv(in);
    }
    std::ifstream in(features, std::ios::binary);
    if (!in) throw IoError("cannot open " + features);
    LabeledFeatureSet data;
    data.features = read_feature_file(in);
    data.labels = load_labels_for(features, labels_flag);
    if (data.labels.size() != static_cast<std::size_t>(data.features.rows())) {
        throw InvalidInput("label count " + std::to_string(data.labels.size()) + " does not match feature rows " +
                           std::to_string(data.features.rows()));
    }
    return data;
}

Stencil parse_stencil(const std::string& kind) {
    static const std::map<std::string, KernelKind> kernels = {
        {"SQUARE3", KernelKind::Square3}, {"SQUARE5", KernelKind::Square5}, {"EDGE3_N", KernelKind::Edge3N},
        {"EDGE3_S", KernelKind::Edge3S},  {"EDGE3_E", KernelKind::Edge3E},  {"EDGE3_W", KernelKind::Edge3W}};
    if (auto it = kernels.find(kind); it != kernels.end()) return kernel_stencil(it->second);
    // orderN_DIR, e.g. order1_E, order2_h, order3_SW
    static const std::map<std::string, Direction> dirs = {
        {"E", Direction::E},   {"W", Direction::W},   {"N", Direction::N},   {"S", Direction::S},
        {"NE", Direction::NE}, {"NW", Direction::NW}, {"SE", Direction::SE}, {"SW", Direction::SW}};
    static const std::map<std::string, Axis> axes = {{"h", Axis::H}, {"v", Axis::V}, {"d", Axis::D}, {"m", Axis::M}};
    if (kind.size() > 7 && kind.rfind("order", 0) == 0 && kind[6] == '_') {
        const int order = kind[5] - '0';
        const std::string dir = kind.substr(7);
        if (order == 2) {
            if (auto it = axes.find(dir); it != axes.end()) return axial_stencil(it->second);
        } else if (order == 1 || order == 3) {
            if (auto it = dirs.find(dir); it != dirs.end()) return directional_stencil(order, it->second);
        }
    }
    throw UsageError("unknown residual kind '" + kind + "'");
}

class Progress {
public:
    Progress(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}

    ProgressFn fn() {
        if (quiet_) return {};
        return [this](std::string_view stage, std::size_t done, std::size_t total) {
            std::lock_guard lock(mutex_);
            const std::size_t step = std::max<std::size_t>(1, total / 10);
            if (done % step == 0 || done == total) {
                err_ << "progress stage=" << stage << " done=" << done << " total=" << total << '\n';
            }
        };
    }

private:
    std::ostream& err_;
    bool quiet_;
    std::mutex mutex_;
};

int run(CLI::App& app, const Options& o, std::ostream& out, std::ostream& err) {
    Progress progress(err, o.quiet);
    const auto* sub = app.get_subcommands().front();
    const std::string cmd = sub->get_name();

    if (cmd == "encrypt") {
        const Key key = resolve_key(o.key_hex, true, 0);
        Nonce nonce{};
        if (!o.nonce_hex.empty()) {
            nonce = parse_nonce_hex(o.nonce_hex);
        } else if (!o.quiet) {
            err << "warning: no --nonce given, using the all-zero nonce (index 0)\n";
        }
        const GrayImage img = read_image(o.in);
        write_image(o.out, encrypt_planes(img, EncryptionParams{{key, nonce}, o.s}));
    } else if (cmd == "zero") {
        write_image(o.out, zero_planes(read_image(o.in), o.s));
    } else if (cmd == "shift") {
        write_image(o.out, shift_planes(read_image(o.in), o.s));
    } else if (cmd == "residual") {
        const Stencil st = parse_stencil(o.kind);
        const auto map = apply_stencil(read_image(o.in), st);
        write_file_atomic(o.out, [&](std::ostream& os) { write_residual_text(os, map); });
    } else if (cmd == "extract") {
        const DatasetManifest manifest = ingest_manifest(o.manifest);
        const int s_extract = o.preprocess == "zero" ? o.s : 0;
        LabeledFeatureSet data;
        data.features.resize(static_cast<Eigen::Index>(manifest.size()), static_cast<Eigen::Index>(kFeatureDim));
        data.labels.resize(manifest.size());
        auto report = progress.fn();
        std::atomic<std::size_t> done{0};
        parallel_for(manifest.size(), o.workers, [&](std::size_t i) {
            const auto& e = manifest.entries[i];
            FeatureVector fv;
            try {
                fv = extract_features(read_image(e.path), s_extract);
            } catch (const Error& ex) {
                throw InvalidInput(std::string(ex.what()) + " [image " + e.path.string() + "]");
            }
            data.features.row(static_cast<Eigen::Index>(i)) =
                Eigen::Map<const Eigen::RowVectorXd>(fv.values.data(), static_cast<Eigen::Index>(fv.values.size()));
            data.labels[i] = e.label;
            if (report) report("extract", ++done, manifest.size());
        });
        write_file_atomic(o.features, [&](std::ostream& os) { write_feature_file(os, data.features); });
        write_file_atomic(o.features + ".labels", [&](std::ostream& os) { write_labels(os, data.labels); });
        if (!o.csv.empty()) write_file_atomic(o.csv, [&](std::ostream& os) { write_feature_csv(os, data); });
        out << "rows " << data.size() << " dim " << data.dim() << " roster " << roster_digest() << '\n';
    } else if (cmd == "train") {
        const LabeledFeatureSet data = load_feature_set(o.features, o.labels);
        double lambda = o.lambda;
        if (o.cv) {
            lambda = select_lambda_cv(data, kLambdaGrid, 5, o.seed);
            if (!o.quiet) err << "cv selected lambda=" << format_double(lambda) << '\n';
        }
        TrainReport tr;
        const RidgeModel model = train(data, lambda, {}, &tr);
        if (!o.quiet) {
            err << "lsmr iterations=" << tr.iterations << " stop=\"" << describe(tr.stop) << "\"\n";
        }
        write_file_atomic(o.model, [&](std::ostream& os) { write_model(os, model); });
        out << "trained rows " << data.size() << " dim " << data.dim() << " lambda " << format_double(lambda) << '\n';
    } else if (cmd == "evaluate") {
        std::ifstream in(o.model);
        if (!in) throw IoError("cannot open model " + o.model);
        const RidgeModel model = read_model(in);
        const LabeledFeatureSet data = load_feature_set(o.features, o.labels);
        out << "accuracy " << format_double(evaluate(model, data)) << '\n';
    } else if (cmd == "experiment") {
        const std::vector<int> grid = parse_s_range(o.s_range);
        std::vector<Preprocess> modes;
        if (o.preprocess == "none" || o.preprocess == "both") modes.push_back(Preprocess::None);
        if (o.preprocess == "zero" || o.preprocess == "both") modes.push_back(Preprocess::ZeroPlanes);
        if (fs::exists(o.report) && !o.force) {
            throw UsageError("report " + o.report + " already exists; pass --force to overwrite");
        }
        ExperimentConfig cfg;
        cfg.key = resolve_key(o.key_hex, false, o.seed);
        cfg.seed = o.seed;
        cfg.ratio = o.ratio;
        cfg.lambda = o.lambda;
        cfg.cross_validate = o.cv;
        cfg.workers = o.workers;
        cfg.progress = progress.fn();
        const ForensicsExperiment exp(ingest_manifest(o.manifest), cfg);
        std::vector<ReportRow> rows;
        for (Preprocess p : modes) {
            for (int s : grid) {
                rows.push_back(exp.run(s, p));
                const auto& r = rows.back();
                if (!o.quiet) {
                    err << "result s=" << r.s << " task=" << name(r.task) << " accuracy=" << format_double(r.accuracy)
                        << '\n';
                }
            }
        }
        write_file_atomic(o.report, [&](std::ostream& os) {
            write_report_header(os);
            for (const auto& r : rows) write_report_row(os, r);
        });
        out << "rows " << rows.size() << " report " << o.report << '\n';
    } else if (cmd == "synth") {
        const auto data = synthesize_dataset(o.seed, o.n, o.size);
        write_synthetic_dataset(data, o.out_dir);
        out << "images " << data.images.size() << " manifest " << (fs::path(o.out_dir) / "manifest.csv").string()
            << '\n';
    } else if (cmd == "tradeoff") {
        std::ifstream fin(o.forensics);
        if (!fin) throw IoError("cannot open " + o.forensics);
        const auto forensics = read_report(fin);
        std::vector<ReportRow> recog;
        if (!o.recognizability.empty()) {
            std::ifstream rin(o.recognizability);
            if (rin) {
                recog = read_report(rin);
            } else if (!o.quiet) {
                err << "warning: recognizability report " << o.recognizability
                    << " not found; privacy column left empty\n";
            }
        }
        const auto rows = tradeoff_report(forensics, recog);
        write_file_atomic(o.out, [&](std::ostream& os) { write_tradeoff(os, rows); });
        out << "rows " << rows.size() << '\n';
    }
    return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Selective bitplane encryption with residual-based tampering detection", "planeguard"};
    app.set_version_flag("--version", std::string("planeguard ") + kVersion + " roster " + roster_digest());
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    Options o;
    app.add_option("--workers", o.workers, "Worker threads (0 = all cores)");
    app.add_flag("--quiet", o.quiet, "Suppress progress output");

    auto plane_count = [&o](CLI::App* sub) {
        sub->add_option("--s", o.s, "Number of most significant bitplanes")->required()->check(CLI::Range(0, 8));
    };
    auto in_out = [&o](CLI::App* sub) {
        sub->add_option("--in", o.in, "Input image (PGM or PNG)")->required();
        sub->add_option("--out", o.out, "Output image (.png or PGM)")->required();
    };

    auto* enc = app.add_subcommand("encrypt", "Encrypt the s most significant bitplanes");
    enc->add_option("--key", o.key_hex, "256-bit key as 64 hex characters (or $PLANEGUARD_KEY)");
    enc->add_option("--nonce", o.nonce_hex, "96-bit nonce as 24 hex characters");
    plane_count(enc);
    in_out(enc);

    auto* zero = app.add_subcommand("zero", "Clear the s most significant bitplanes");
    plane_count(zero);
    in_out(zero);

    auto* shift = app.add_subcommand("shift", "Left-shift pixels by s bits");
    plane_count(shift);
    in_out(shift);

    auto* res = app.add_subcommand("residual", "Dump a residual map as text");
    res->add_option("--kind", o.kind, "SQUARE3, SQUARE5, EDGE3_{N,S,E,W}, order{1,3}_{E,...}, order2_{h,v,d,m}")
        ->required();
    in_out(res);

    auto* ext = app.add_subcommand("extract", "Extract rich-model features for every manifest entry");
    plane_count(ext);
    ext->add_option("--preprocess", o.preprocess, "Zero the s MSB planes first (zero) or not (none)")
        ->check(CLI::IsMember({"none", "zero"}));
    ext->add_option("--manifest", o.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
    ext->add_option("--out-features", o.features, "Binary feature file; labels go to <file>.labels")->required();
    ext->add_option("--csv", o.csv, "Also export features as CSV");

    auto* tr = app.add_subcommand("train", "Fit the ridge classifier");
    tr->add_option("--features", o.features, "Binary feature file or .csv export")->required()->check(CLI::ExistingFile);
    tr->add_option("--labels", o.labels, "Labels file (default <features>.labels)");
    tr->add_option("--lambda", o.lambda, "Ridge regularization")->check(CLI::NonNegativeNumber);
    tr->add_flag("--cv", o.cv, "Choose lambda by 5-fold cross-validation");
    tr->add_option("--seed", o.seed, "Seed for cross-validation folds");
    tr->add_option("--out-model", o.model, "Model file")->required();

    auto* ev = app.add_subcommand("evaluate", "Score a model on labeled features");
    ev->add_option("--model", o.model, "Model file")->required()->check(CLI::ExistingFile);
    ev->add_option("--features", o.features, "Binary feature file or .csv export")->required()->check(CLI::ExistingFile);
    ev->add_option("--labels", o.labels, "Labels file (default <features>.labels)");

    auto* ex = app.add_subcommand("experiment", "Encrypt, extract, split, train and evaluate over an s grid");
    ex->add_option("--manifest", o.manifest, "Manifest CSV")->required()->check(CLI::ExistingFile);
    ex->add_option("--s-range", o.s_range, "Plane counts, e.g. 0..8 or 1,3,5");
    ex->add_option("--preprocess", o.preprocess, "none, zero or both")->check(CLI::IsMember({"none", "zero", "both"}));
    ex->add_option("--seed", o.seed, "Split and default-key seed");
    ex->add_option("--report", o.report, "Report CSV")->required();
    ex->add_option("--key", o.key_hex, "64 hex characters (or $PLANEGUARD_KEY; default derived from --seed)");
    ex->add_option("--lambda", o.lambda, "Ridge regularization")->check(CLI::NonNegativeNumber);
    ex->add_flag("--cv", o.cv, "Choose lambda by 5-fold cross-validation");
    ex->add_option("--ratio", o.ratio, "Training fraction")->check(CLI::Range(0.0, 1.0));
    ex->add_flag("--force", o.force, "Overwrite an existing report");

    auto* sy = app.add_subcommand("synth", "Generate a synthetic authentic/tampered dataset");
    sy->add_option("--seed", o.seed, "Generator seed");
    sy->add_option("--n", o.n, "Images per class")->check(CLI::Range(std::size_t{10}, std::size_t{1000000}));
    sy->add_option("--size", o.size, "Image side in pixels")->check(CLI::Range(std::size_t{64}, std::size_t{8192}));
    sy->add_option("--out-dir", o.out_dir, "Output directory")->required();

    auto* to = app.add_subcommand("tradeoff", "Join forensics and recognizability reports");
    to->add_option("--forensics", o.forensics, "Forensics report CSV")->required()->check(CLI::ExistingFile);
    to->add_option("--recognizability", o.recognizability, "Recognizability report CSV (optional)");
    to->add_option("--out", o.out, "Trade-off CSV")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        return run(app, o, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << app.get_subcommands().front()->help();
        return kExitUsage;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace planeguard::cli
