#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "planeguard/classifier.hpp"

namespace planeguard {

// Binary layout, little-endian: "RM1F", u16 version, u32 dim, u32 rows,
// then rows * dim float32 values.
inline constexpr std::uint16_t kFeatureFileVersion = 1;

void write_feature_file(std::ostream& os, const Eigen::MatrixXd& rows);
Eigen::MatrixXd read_feature_file(std::istream& is);

/// CSV with header "label,f0,f1,..." and the label in the first column.
void write_feature_csv(std::ostream& os, const LabeledFeatureSet& data);
LabeledFeatureSet read_feature_csv(std::istream& is);

/// One label per line, in feature-row order.
void write_labels(std::ostream& os, const std::vector<Label>& labels);
std::vector<Label> read_labels(std::istream& is);

}  // namespace planeguard
