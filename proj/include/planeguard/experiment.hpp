#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "planeguard/classifier.hpp"
#include "planeguard/dataset.hpp"
#include "planeguard/keystream.hpp"
#include "planeguard/lsmr.hpp"

namespace planeguard {

enum class Preprocess { None, ZeroPlanes };
enum class Task { ForensicsRaw, ForensicsZeroed, Recognizability };

std::string_view name(Preprocess p);
std::string_view name(Task t);
Task parse_task(std::string_view text);

struct ReportRow {
    int s = 0;
    Task task = Task::ForensicsZeroed;
    double accuracy = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::uint64_t seed = 0;
    std::optional<double> privacy_index;  // recognizability rows only
};

/// Progress callback: (stage, done, total).
using ProgressFn = std::function<void(std::string_view, std::size_t, std::size_t)>;

struct ExperimentConfig {
    Key key{};
    std::uint64_t seed = 0;
    double ratio = 0.8;
    double lambda = 1.0;
    bool cross_validate = false;  // pick lambda from kLambdaGrid by 5-fold CV
    std::size_t workers = 0;      // 0 = all cores
    LsmrOptions lsmr{};
    ProgressFn progress;
};

/// Holds the decoded images and the fixed train/test split so several
/// (s, preprocessing) settings can run over one dataset. Image k is
/// encrypted with nonce_from_index(k).
class ForensicsExperiment {
public:
    ForensicsExperiment(DatasetManifest manifest, ExperimentConfig config);
    ForensicsExperiment(DatasetManifest manifest, std::vector<GrayImage> images, ExperimentConfig config);

    ReportRow run(int s, Preprocess preprocess) const;

    /// Encrypted, preprocessed feature rows for every manifest entry.
    LabeledFeatureSet features(int s, Preprocess preprocess) const;

    const SplitIndices& split_indices() const { return split_; }
    const DatasetManifest& manifest() const { return manifest_; }

private:
    DatasetManifest manifest_;
    std::vector<GrayImage> images_;
    ExperimentConfig config_;
    SplitIndices split_;
};

ReportRow run_forensics_experiment(const DatasetManifest& manifest, int s, Preprocess preprocess,
                                   const ExperimentConfig& config);

/// 1 - recognizability accuracy.
double privacy_index(double recognizability_accuracy);

// Report CSV: s,task,accuracy,n_train,n_test,seed[,privacy_index]
inline constexpr std::string_view kReportHeader = "s,task,accuracy,n_train,n_test,seed";

void write_report_header(std::ostream& os, bool with_privacy = false);
/// With `with_privacy` the 7th column holds privacy_index (empty if unset).
void write_report_row(std::ostream& os, const ReportRow& row, bool with_privacy = false);
std::vector<ReportRow> read_report(std::istream& is);
/// Appends to an existing report or creates it with a header.
void append_report_row(const std::filesystem::path& path, const ReportRow& row);

struct TradeoffRow {
    int s = 0;
    double forensics_accuracy = 0.0;
    std::optional<double> recognizability_accuracy;
    std::optional<double> privacy_index;
};

/// One row per forensics s value, preferring zeroed-preprocessing rows over
/// raw ones. Recognizability rows are optional.
std::vector<TradeoffRow> tradeoff_report(const std::vector<ReportRow>& forensics,
                                         const std::vector<ReportRow>& recognizability);

inline constexpr std::string_view kTradeoffHeader = "s,forensics_accuracy,recognizability_accuracy,privacy_index";
void write_tradeoff(std::ostream& os, const std::vector<TradeoffRow>& rows);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace planeguard
