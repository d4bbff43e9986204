#include "planeguard/classifier.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "planeguard/error.hpp"
#include "planeguard/rng.hpp"

namespace planeguard {

std::string_view name(Label label) { return label == Label::Tampered ? "tampered" : "authentic"; }

Label parse_label(std::string_view text) {
    if (text == "authentic") return Label::Authentic;
    if (text == "tampered") return Label::Tampered;
    throw InvalidInput("unknown label '" + std::string(text) + "' (expected authentic or tampered)");
}

RidgeModel train(const LabeledFeatureSet& data, double lambda, const LsmrOptions& lsmr, TrainReport* report) {
    const auto n = static_cast<Eigen::Index>(data.size());
    if (data.features.rows() != n) throw InvalidTrainingSet("feature row count does not match label count");
    if (data.features.cols() < 1) throw InvalidTrainingSet("feature dimension is zero");
    if (!(lambda >= 0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be a finite value >= 0");
    std::size_t tampered = 0;
    for (Label l : data.labels) tampered += l == Label::Tampered;
    const std::size_t authentic = data.size() - tampered;
    if (tampered < 2 || authentic < 2) {
        throw InvalidTrainingSet("training needs at least 2 samples per class (authentic " + std::to_string(authentic) +
                                 ", tampered " + std::to_string(tampered) + ")");
    }
    if (!data.features.allFinite()) throw InvalidTrainingSet("non-finite feature values");

    RidgeModel model;
    model.lambda = lambda;
    model.feature_means = data.features.colwise().mean().transpose();
    Eigen::MatrixXd z = data.features.rowwise() - model.feature_means.transpose();
    model.feature_stds = (z.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();
    model.feature_stds = model.feature_stds.cwiseMax(kStdFloor);
    z.array().rowwise() /= model.feature_stds.transpose().array();

    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = label_value(data.labels[static_cast<std::size_t>(i)]);
    model.label_offset = y.mean();
    y.array() -= model.label_offset;

    LsmrOptions opts = lsmr;
    opts.damp = std::sqrt(lambda);
    const auto res = lsmr_solve(z, y, opts);
    model.weights = res.x;
    if (report) *report = {res.stop, res.iterations};
    return model;
}

Prediction predict(const RidgeModel& model, const Eigen::Ref<const Eigen::VectorXd>& features) {
    if (static_cast<std::size_t>(features.size()) != model.dim()) {
        throw InvalidInput("feature dimension " + std::to_string(features.size()) + " does not match model dimension " +
                           std::to_string(model.dim()));
    }
    const double score =
        ((features - model.feature_means).array() / model.feature_stds.array()).matrix().dot(model.weights) +
        model.label_offset;
    return {score, score >= 0 ? Label::Tampered : Label::Authentic};
}

Prediction predict(const RidgeModel& model, std::span<const double> features) {
    return predict(model, Eigen::Map<const Eigen::VectorXd>(features.data(), static_cast<Eigen::Index>(features.size())));
}

double evaluate(const RidgeModel& model, const LabeledFeatureSet& test) {
    if (test.size() == 0) throw InvalidInput("cannot evaluate on an empty test set");
    if (static_cast<std::size_t>(test.features.rows()) != test.size()) {
        throw InvalidInput("feature row count does not match label count");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
        const Eigen::VectorXd row = test.features.row(static_cast<Eigen::Index>(i)).transpose();
        correct += predict(model, row).label == test.labels[i];
    }
    return static_cast<double>(correct) / static_cast<double>(test.size());
}

namespace {

LabeledFeatureSet subset(const LabeledFeatureSet& data, const std::vector<std::size_t>& rows) {
    LabeledFeatureSet out;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
    out.labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.features.row(static_cast<Eigen::Index>(r)) = data.features.row(static_cast<Eigen::Index>(rows[r]));
        out.labels.push_back(data.labels[rows[r]]);
    }
    return out;
}

}  // namespace

double select_lambda_cv(const LabeledFeatureSet& data, std::span<const double> grid, std::size_t folds,
                        std::uint64_t seed, const LsmrOptions& lsmr) {
    if (grid.empty()) throw InvalidArgument("lambda grid is empty");
    if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");

    // Stratified fold assignment: shuffle each class, deal round-robin.
    std::vector<std::size_t> fold_of(data.size());
    Rng rng(seed);
    for (Label cls : {Label::Authentic, Label::Tampered}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (data.labels[i] == cls) idx.push_back(i);
        }
        if (idx.size() < 2 * folds) {
            throw InvalidTrainingSet("too few " + std::string(name(cls)) + " samples for " + std::to_string(folds) +
                                     "-fold cross-validation");
        }
        rng.shuffle(idx);
        for (std::size_t k = 0; k < idx.size(); ++k) fold_of[idx[k]] = k % folds;
    }

    double best_lambda = grid.front();
    double best_acc = -1.0;
    for (double lambda : grid) {
        double acc_sum = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
            std::vector<std::size_t> tr, te;
            for (std::size_t i = 0; i < data.size(); ++i) (fold_of[i] == f ? te : tr).push_back(i);
            const auto model = train(subset(data, tr), lambda, lsmr);
            acc_sum += evaluate(model, subset(data, te));
        }
        const double acc = acc_sum / static_cast<double>(folds);
        if (acc > best_acc) {
            best_acc = acc;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

void write_model(std::ostream& os, const RidgeModel& model) {
    os << std::setprecision(17);
    os << "dim " << model.dim() << '\n';
    os << "lambda " << model.lambda << '\n';
    os << "label_offset " << model.label_offset << '\n';
    auto section = [&os](const char* title, const Eigen::VectorXd& v) {
        os << title << '\n';
        for (Eigen::Index i = 0; i < v.size(); ++i) os << v[i] << '\n';
    };
    section("means", model.feature_means);
    section("stds", model.feature_stds);
    section("weights", model.weights);
}

RidgeModel read_model(std::istream& is) {
    std::size_t line_no = 0;
    std::string line;
    auto next_line = [&]() -> std::string {
        if (!std::getline(is, line)) throw ParseError("unexpected end of model file", line_no + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    auto parse_double = [&](const std::string& text) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw ParseError("expected a number, got '" + text + "'", line_no);
        }
        if (used != text.size()) throw ParseError("trailing characters after number '" + text + "'", line_no);
        return v;
    };
    auto keyed = [&](const std::string& key) {
        const std::string l = next_line();
        if (l.rfind(key + ' ', 0) != 0) throw ParseError("expected '" + key + " <value>'", line_no);
        return l.substr(key.size() + 1);
    };

    RidgeModel model;
    const std::string dim_text = keyed("dim");
    std::size_t dim = 0;
    try {
        dim = std::stoul(dim_text);
    } catch (const std::exception&) {
        throw ParseError("invalid dimension '" + dim_text + "'", line_no);
    }
    if (dim == 0) throw ParseError("model dimension must be positive", line_no);
    model.lambda = parse_double(keyed("lambda"));
    model.label_offset = parse_double(keyed("label_offset"));
    auto section = [&](const char* title) {
        if (next_line() != title) throw ParseError(std::string("expected section '") + title + "'", line_no);
        Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) v[static_cast<Eigen::Index>(i)] = parse_double(next_line());
        return v;
    };
    model.feature_means = section("means");
    model.feature_stds = section("stds");
    model.weights = section("weights");
    if ((model.feature_stds.array() < kStdFloor).any()) {
        throw ParseError("model contains a standard deviation below the floor", line_no);
    }
    return model;
}

}  // namespace planeguard
