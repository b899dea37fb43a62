#include "plltk/dataset.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include "plltk/errors.hpp"

namespace pll {

void PartialLabelDataset::validate() const {
  const int n = size();
  if (static_cast<int>(candidates.size()) != n)
    throw DataError("candidate list length does not match feature rows");
  if (num_classes <= 0) throw DataError("class count must be positive");
  for (int i = 0; i < n; ++i)
    if (candidates[i].num_labels() != num_classes)
      throw DataError("candidate mask width does not match class count");
  if (has_truth()) {
    if (static_cast<int>(true_labels.size()) != n)
      throw DataError("true label list length does not match feature rows");
    for (int i = 0; i < n; ++i) {
      if (true_labels[i] < 0 || true_labels[i] >= num_classes)
        throw DataError("true label out of range");
      if (!candidates[i].contains(true_labels[i])) {
        std::ostringstream msg;
        msg << "true label of example " << i << " is not in its candidate set";
        throw DataError(msg.str());
      }
    }
  }
}

double avg_candidate_labels(const PartialLabelDataset& ds) {
  if (ds.size() == 0) return 0.0;
  long total = 0;
  for (const auto& s : ds.candidates) total += s.count();
  return static_cast<double>(total) / ds.size();
}

void save_plld(const PartialLabelDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << "PLLD 1 " << ds.size() << " " << ds.feature_dim() << " "
      << ds.num_classes << " " << (ds.has_truth() ? 1 : 0) << "\n";
  for (int i = 0; i < ds.size(); ++i)
    for (int j = 0; j < ds.feature_dim(); ++j) {
      double v = ds.features(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  for (const auto& s : ds.candidates) {
    auto bytes = s.mask_bytes();
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
  }
  if (ds.has_truth())
    for (int y : ds.true_labels) {
      std::uint32_t v = static_cast<std::uint32_t>(y);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  if (!out) throw DataError("write failed: " + path);
}

PartialLabelDataset load_plld(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);

  std::string header;
  if (!std::getline(in, header))
    throw DataError("malformed header: missing header line in " + path);
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  long n = -1, q = -1, c = -1;
  int has_truth = -1;
  hs >> magic >> version >> n >> q >> c >> has_truth;
  if (!hs || magic != "PLLD" || version != 1 || n < 0 || q <= 0 || c <= 0 ||
      (has_truth != 0 && has_truth != 1)) {
    std::string extra;
    if (hs >> extra) {
    }  // tolerate nothing: any parse failure above already rejects
    throw DataError("malformed header: expected 'PLLD 1 <n> <q> <c> <0|1>', got '" +
                    header + "'");
  }

  PartialLabelDataset ds;
  ds.num_classes = static_cast<int>(c);
  ds.features.resize(n, q);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < q; ++j) {
      double v;
      in.read(reinterpret_cast<char*>(&v), sizeof(double));
      if (!in) throw DataError("truncated payload: feature block ends early");
      ds.features(i, j) = v;
    }

  const int mask_bytes = static_cast<int>((c + 7) / 8);
  std::vector<std::uint8_t> buf(mask_bytes);
  ds.candidates.reserve(n);
  for (long i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(buf.data()), mask_bytes);
    if (!in) throw DataError("truncated payload: candidate block ends early");
    try {
      ds.candidates.push_back(CandidateSet::from_mask_bytes(ds.num_classes, buf));
    } catch (const std::invalid_argument& e) {
      std::ostringstream msg;
      msg << "invalid candidate set for example " << i << ": " << e.what();
      throw DataError(msg.str());
    }
  }

  if (has_truth) {
    ds.true_labels.resize(n);
    for (long i = 0; i < n; ++i) {
      std::uint32_t v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      if (!in) throw DataError("truncated payload: true label block ends early");
      ds.true_labels[i] = static_cast<int>(v);
    }
  }
  char extra;
  if (in.read(&extra, 1))
    throw DataError("trailing bytes after payload in " + path);

  ds.validate();
  return ds;
}

PartialLabelDataset take_rows(const PartialLabelDataset& ds,
                              const std::vector<int>& indices) {
  PartialLabelDataset out;
  out.num_classes = ds.num_classes;
  out.provenance = ds.provenance;
  out.features.resize(static_cast<long>(indices.size()), ds.feature_dim());
  out.candidates.reserve(indices.size());
  if (ds.has_truth()) out.true_labels.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.features.row(static_cast<long>(k)) = ds.features.row(indices[k]);
    out.candidates.push_back(ds.candidates[indices[k]]);
    if (ds.has_truth()) out.true_labels.push_back(ds.true_labels[indices[k]]);
  }
  return out;
}

std::pair<PartialLabelDataset, PartialLabelDataset> split_dataset(
    const PartialLabelDataset& ds, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw DataError("split fraction must lie strictly between 0 and 1");
  const int n = ds.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  const int train_n =
      static_cast<int>(std::floor(n * (1.0 - fraction) + 1e-9));
  std::vector<int> train_idx(order.begin(), order.begin() + train_n);
  std::vector<int> val_idx(order.begin() + train_n, order.end());
  return {take_rows(ds, train_idx), take_rows(ds, val_idx)};
}

}  // namespace pll
