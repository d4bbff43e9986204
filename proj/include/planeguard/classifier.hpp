#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "planeguard/lsmr.hpp"

namespace planeguard {

enum class Label { Authentic, Tampered };

std::string_view name(Label label);
Label parse_label(std::string_view text);
inline double label_value(Label l) { return l == Label::Tampered ? 1.0 : -1.0; }

/// One feature row per sample; labels map authentic -> -1, tampered -> +1.
struct LabeledFeatureSet {
    Eigen::MatrixXd features;
    std::vector<Label> labels;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

inline constexpr double kStdFloor = 1e-8;

struct RidgeModel {
    Eigen::VectorXd weights;
    Eigen::VectorXd feature_means;
    Eigen::VectorXd feature_stds;
    double label_offset = 0.0;
    double lambda = 1.0;

    std::size_t dim() const { return static_cast<std::size_t>(weights.size()); }
};

struct TrainReport {
    LsmrStop stop = LsmrStop::ZeroSolution;
    std::size_t iterations = 0;
};

/// Ridge regression on z-scored features with centered +-1 labels, solved by
/// LSMR with damp = sqrt(lambda). `lsmr.damp` is ignored.
RidgeModel train(const LabeledFeatureSet& data, double lambda, const LsmrOptions& lsmr = {},
                 TrainReport* report = nullptr);

struct Prediction {
    double score;
    Label label;  // tampered iff score >= 0
};

Prediction predict(const RidgeModel& model, std::span<const double> features);
Prediction predict(const RidgeModel& model, const Eigen::Ref<const Eigen::VectorXd>& features);

/// Fraction of correctly labeled rows.
double evaluate(const RidgeModel& model, const LabeledFeatureSet& test);

inline constexpr double kLambdaGrid[] = {0.01, 0.1, 1.0, 10.0, 100.0};

/// k-fold cross-validated choice of lambda (stratified folds, seeded).
/// Ties resolve to the smaller lambda.
double select_lambda_cv(const LabeledFeatureSet& data, std::span<const double> grid, std::size_t folds,
                        std::uint64_t seed, const LsmrOptions& lsmr = {});

void write_model(std::ostream& os, const RidgeModel& model);
RidgeModel read_model(std::istream& is);

}  // namespace planeguard
