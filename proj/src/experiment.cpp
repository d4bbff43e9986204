#include "planeguard/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "planeguard/bitplane.hpp"
#include "planeguard/error.hpp"
#include "planeguard/features.hpp"
#include "planeguard/image_io.hpp"
#include "planeguard/parallel.hpp"

namespace planeguard {
namespace fs = std::filesystem;
namespace {

LabeledFeatureSet take_rows(const LabeledFeatureSet& all, const std::vector<std::size_t>& rows) {
    LabeledFeatureSet out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), all.features.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = all.features.row(static_cast<Eigen::Index>(rows[r]));
        out.labels.push_back(all.labels[rows[r]]);
    }
    return out;
}

std::vector<std::string> cells_of(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

template <typename T>
T parse_number(const std::string& text, std::size_t line_no, const char* what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError(std::string("invalid ") + what + " '" + text + "'", line_no);
    }
    return v;
}

}  // namespace

std::string_view name(Preprocess p) { return p == Preprocess::None ? "none" : "zero"; }

std::string_view name(Task t) {
    switch (t) {
        case Task::ForensicsRaw: return "forensics_raw";
        case Task::ForensicsZeroed: return "forensics_zeroed";
        case Task::Recognizability: return "recognizability";
    }
    return "?";
}

Task parse_task(std::string_view text) {
    if (text == "forensics_raw") return Task::ForensicsRaw;
    if (text == "forensics_zeroed") return Task::ForensicsZeroed;
    if (text == "recognizability") return Task::Recognizability;
    throw InvalidInput("unknown task '" + std::string(text) + "'");
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

ForensicsExperiment::ForensicsExperiment(DatasetManifest manifest, ExperimentConfig config)
    : manifest_(std::move(manifest)), config_(std::move(config)) {
    images_.resize(manifest_.size());
    std::atomic<std::size_t> done{0};
    parallel_for(manifest_.size(), config_.workers, [&](std::size_t i) {
        try {
            images_[i] = read_image(manifest_.entries[i].path);
        } catch (const Error& e) {
            throw InvalidInput(std::string(e.what()) + " [image " + manifest_.entries[i].path.string() + "]");
        }
        if (config_.progress) config_.progress("load", ++done, manifest_.size());
    });
    split_ = split(manifest_, config_.ratio, config_.seed);
}

ForensicsExperiment::ForensicsExperiment(DatasetManifest manifest, std::vector<GrayImage> images,
                                         ExperimentConfig config)
    : manifest_(std::move(manifest)), images_(std::move(images)), config_(std::move(config)) {
    if (images_.size() != manifest_.size()) throw InvalidInput("image count does not match manifest size");
    split_ = split(manifest_, config_.ratio, config_.seed);
}

LabeledFeatureSet ForensicsExperiment::features(int s, Preprocess preprocess) const {
    check_plane_count(s);
    LabeledFeatureSet out;
    out.features.resize(static_cast<Eigen::Index>(images_.size()), static_cast<Eigen::Index>(kFeatureDim));
    out.labels.resize(images_.size());
    std::atomic<std::size_t> done{0};
    parallel_for(images_.size(), config_.workers, [&](std::size_t i) {
        const EncryptionParams params{{config_.key, nonce_from_index(i)}, s};
        const GrayImage enc = encrypt_planes(images_[i], params);
        FeatureVector fv;
        try {
            fv = extract_features(enc, preprocess == Preprocess::ZeroPlanes ? s : 0);
        } catch (const Error& e) {
            throw DegenerateInput(std::string(e.what()) + " [image " + manifest_.entries[i].path.string() + "]");
        }
        out.features.row(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::RowVectorXd>(fv.values.data(), static_cast<Eigen::Index>(fv.values.size()));
        out.labels[i] = manifest_.entries[i].label;
        if (config_.progress) config_.progress("extract", ++done, images_.size());
    });
    return out;
}

ReportRow ForensicsExperiment::run(int s, Preprocess preprocess) const {
    const LabeledFeatureSet all = features(s, preprocess);
    const LabeledFeatureSet train_set = take_rows(all, split_.train);
    const LabeledFeatureSet test_set = take_rows(all, split_.test);

    double lambda = config_.lambda;
    if (config_.cross_validate) lambda = select_lambda_cv(train_set, kLambdaGrid, 5, config_.seed, config_.lsmr);
    const RidgeModel model = train(train_set, lambda, config_.lsmr);

    ReportRow row;
    row.s = s;
    row.task = preprocess == Preprocess::ZeroPlanes ? Task::ForensicsZeroed : Task::ForensicsRaw;
    row.accuracy = evaluate(model, test_set);
    row.n_train = train_set.size();
    row.n_test = test_set.size();
    row.seed = config_.seed;
    return row;
}

ReportRow run_forensics_experiment(const DatasetManifest& manifest, int s, Preprocess preprocess,
                                   const ExperimentConfig& config) {
    check_plane_count(s);
    return ForensicsExperiment(manifest, config).run(s, preprocess);
}

double privacy_index(double recognizability_accuracy) {
    if (!(recognizability_accuracy >= 0.0 && recognizability_accuracy <= 1.0)) {
        throw InvalidInput("recognizability accuracy must lie in [0, 1]");
    }
    return 1.0 - recognizability_accuracy;
}

void write_report_header(std::ostream& os, bool with_privacy) {
    os << kReportHeader << (with_privacy ? ",privacy_index" : "") << '\n';
}

void write_report_row(std::ostream& os, const ReportRow& row, bool with_privacy) {
    os << row.s << ',' << name(row.task) << ',' << format_double(row.accuracy) << ',' << row.n_train << ','
       << row.n_test << ',' << row.seed;
    if (with_privacy) os << ',' << (row.privacy_index ? format_double(*row.privacy_index) : "");
    os << '\n';
}

std::vector<ReportRow> read_report(std::istream& is) {
    std::vector<ReportRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    bool with_privacy = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line == kReportHeader) {
            } else if (line == std::string(kReportHeader) + ",privacy_index") {
                with_privacy = true;
            } else {
                throw ParseError("expected report header '" + std::string(kReportHeader) + "'", line_no);
            }
            header = true;
            continue;
        }
        const auto cells = cells_of(line);
        if (cells.size() != (with_privacy ? 7u : 6u)) {
            throw ParseError("expected " + std::to_string(with_privacy ? 7 : 6) + " columns, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        ReportRow row;
        row.s = parse_number<int>(cells[0], line_no, "s");
        if (row.s < 0 || row.s > 8) throw ParseError("s out of range [0, 8]", line_no);
        try {
            row.task = parse_task(cells[1]);
        } catch (const InvalidInput& e) {
            throw ParseError(e.what(), line_no);
        }
        row.accuracy = parse_number<double>(cells[2], line_no, "accuracy");
        if (!(row.accuracy >= 0.0 && row.accuracy <= 1.0)) throw ParseError("accuracy outside [0, 1]", line_no);
        row.n_train = parse_number<std::size_t>(cells[3], line_no, "n_train");
        row.n_test = parse_number<std::size_t>(cells[4], line_no, "n_test");
        row.seed = parse_number<std::uint64_t>(cells[5], line_no, "seed");
        if (with_privacy && !cells[6].empty()) {
            row.privacy_index = parse_number<double>(cells[6], line_no, "privacy_index");
            if (row.task != Task::Recognizability) throw ParseError("privacy_index on a forensics row", line_no);
            if (std::abs(*row.privacy_index - privacy_index(row.accuracy)) > 1e-12) {
                throw ParseError("privacy_index is not 1 - accuracy", line_no);
            }
        }
        rows.push_back(row);
    }
    if (!header) throw ParseError("report is empty", line_no + 1);
    return rows;
}

void append_report_row(const fs::path& path, const ReportRow& row) {
    const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
    // New files get a privacy column only when the first row carries one;
    // existing files keep the layout their header declares.
    bool with_privacy = row.privacy_index.has_value();
    if (!fresh) {
        std::ifstream in(path);
        std::string first;
        std::getline(in, first);
        if (!first.empty() && first.back() == '\r') first.pop_back();
        with_privacy = first == std::string(kReportHeader) + ",privacy_index";
        if (!with_privacy && first != kReportHeader) throw ParseError("existing report has an unexpected header", 1);
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open report " + path.string());
    if (fresh) write_report_header(out, with_privacy);
    write_report_row(out, row, with_privacy);
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<TradeoffRow> tradeoff_report(const std::vector<ReportRow>& forensics,
                                         const std::vector<ReportRow>& recognizability) {
    std::map<int, const ReportRow*> zeroed, raw, recog;
    auto place = [](std::map<int, const ReportRow*>& m, const ReportRow& r) {
        if (!m.emplace(r.s, &r).second) {
            throw InvalidInput("duplicate " + std::string(name(r.task)) + " row for s=" + std::to_string(r.s));
        }
    };
    for (const auto& r : forensics) {
        if (r.task == Task::ForensicsZeroed) place(zeroed, r);
        else if (r.task == Task::ForensicsRaw) place(raw, r);
        else throw InvalidInput("forensics report contains a recognizability row");
    }
    for (const auto& r : recognizability) {
        if (r.task != Task::Recognizability) throw InvalidInput("recognizability report contains a forensics row");
        place(recog, r);
    }

    std::set<int> grid;
    for (const auto& [s, _] : zeroed) grid.insert(s);
    for (const auto& [s, _] : raw) grid.insert(s);
    for (const auto& [s, _] : recog) {
        if (!grid.count(s)) throw InvalidInput("recognizability row for s=" + std::to_string(s) + " has no forensics row");
    }

    std::vector<TradeoffRow> out;
    for (int s : grid) {
        TradeoffRow row;
        row.s = s;
        row.forensics_accuracy = zeroed.count(s) ? zeroed[s]->accuracy : raw[s]->accuracy;
        if (auto it = recog.find(s); it != recog.end()) {
            row.recognizability_accuracy = it->second->accuracy;
            row.privacy_index = privacy_index(it->second->accuracy);
        }
        out.push_back(row);
    }
    return out;
}

void write_tradeoff(std::ostream& os, const std::vector<TradeoffRow>& rows) {
    os << kTradeoffHeader << '\n';
    for (const auto& r : rows) {
        os << r.s << ',' << format_double(r.forensics_accuracy) << ','
           << (r.recognizability_accuracy ? format_double(*r.recognizability_accuracy) : "") << ','
           << (r.privacy_index ? format_double(*r.privacy_index) : "") << '\n';
    }
}

}  // namespace planeguard
