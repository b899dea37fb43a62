#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "plltk/candidate_set.hpp"
#include "plltk/rng.hpp"

namespace pll {

enum class Provenance { kSyntheticId, kSyntheticUniform, kRealWorld };

/// Training examples with candidate label sets. True labels, when
/// present, are hidden from training and used only for evaluation.
struct PartialLabelDataset {
  Eigen::MatrixXd features;             // n x q
  std::vector<CandidateSet> candidates; // length n
  int num_classes = 0;
  std::vector<int> true_labels;         // empty when truth is unavailable
  Provenance provenance = Provenance::kRealWorld;

  int size() const { return static_cast<int>(features.rows()); }
  int feature_dim() const { return static_cast<int>(features.cols()); }
  bool has_truth() const { return !true_labels.empty(); }

  // Checks structural consistency plus the generation-time invariant
  // that every hidden true label lies inside its candidate set.
  void validate() const;
};

double avg_candidate_labels(const PartialLabelDataset& ds);

// PLLD v1 container. Header line "PLLD 1 <n> <q> <c> <has_truth>", then
// little-endian binary payload: features as 8-byte doubles row-major,
// candidate masks as ceil(c/8)-byte bitmaps, optional 4-byte unsigned
// true labels. Round-trips are bit-exact.
void save_plld(const PartialLabelDataset& ds, const std::string& path);
PartialLabelDataset load_plld(const std::string& path);

// Disjoint (train, validation) partition with |validation| =
// n - floor(n * (1 - fraction)); deterministic under the given rng.
std::pair<PartialLabelDataset, PartialLabelDataset> split_dataset(
    const PartialLabelDataset& ds, double fraction, Rng& rng);

// Row subset in the given index order.
PartialLabelDataset take_rows(const PartialLabelDataset& ds,
                              const std::vector<int>& indices);

}  // namespace pll
