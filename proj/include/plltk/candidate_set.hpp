#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pll {

/// Non-empty subset of the label space {0, ..., c-1}, stored as a fixed
/// width bitmask. Built once at generation time; afterwards labels can
/// only be removed, and removing the last label is a hard error.
class CandidateSet {
 public:
  static CandidateSet full(int num_labels) {
    CandidateSet s(num_labels);
    for (int j = 0; j < num_labels; ++j) s.set_bit(j);
    s.count_ = num_labels;
    return s;
  }

  static CandidateSet singleton(int num_labels, int label) {
    return from_labels(num_labels, {label});
  }

  static CandidateSet from_labels(int num_labels, const std::vector<int>& labels) {
    CandidateSet s(num_labels);
    for (int j : labels) {
      if (j < 0 || j >= num_labels)
        throw std::invalid_argument("candidate label out of range");
      if (!s.contains(j)) {
        s.set_bit(j);
        ++s.count_;
      }
    }
    if (s.count_ == 0)
      throw std::invalid_argument("candidate set must not be empty");
    return s;
  }

  bool contains(int label) const {
    return (bits_[label >> 6] >> (label & 63)) & 1ull;
  }

  // Removes a present label; refuses to empty the set.
  void remove(int label) {
    if (label < 0 || label >= num_labels_ || !contains(label))
      throw std::logic_error("removing a label that is not a candidate");
    if (count_ == 1)
      throw std::logic_error("removal would empty the candidate set");
    bits_[label >> 6] &= ~(1ull << (label & 63));
    --count_;
  }

  int count() const { return count_; }
  int num_labels() const { return num_labels_; }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(count_);
    for (int j = 0; j < num_labels_; ++j)
      if (contains(j)) out.push_back(j);
    return out;
  }

  // Byte image for serialization: label j lives at bit (j % 8) of byte
  // (j / 8), least significant bit first.
  std::vector<std::uint8_t> mask_bytes() const {
    std::vector<std::uint8_t> out((num_labels_ + 7) / 8, 0);
    for (int j = 0; j < num_labels_; ++j)
      if (contains(j)) out[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7));
    return out;
  }

  static CandidateSet from_mask_bytes(int num_labels,
                                      const std::vector<std::uint8_t>& bytes) {
    CandidateSet s(num_labels);
    int total_bits = static_cast<int>(bytes.size()) * 8;
    for (int j = 0; j < total_bits; ++j) {
      if (!((bytes[j >> 3] >> (j & 7)) & 1u)) continue;
      if (j >= num_labels)
        throw std::invalid_argument("candidate mask references label >= c");
      s.set_bit(j);
      ++s.count_;
    }
    if (s.count_ == 0)
      throw std::invalid_argument("candidate set must not be empty");
    return s;
  }

  bool operator==(const CandidateSet& other) const {
    return num_labels_ == other.num_labels_ && bits_ == other.bits_;
  }

 private:
  explicit CandidateSet(int num_labels)
      : num_labels_(num_labels), count_(0), bits_((num_labels + 63) / 64, 0) {
    if (num_labels <= 0)
      throw std::invalid_argument("label space must be non-empty");
  }

  void set_bit(int j) { bits_[j >> 6] |= 1ull << (j & 63); }

  int num_labels_;
  int count_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace pll
