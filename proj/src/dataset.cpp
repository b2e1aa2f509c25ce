#include "cica/dataset.hpp"

#include <algorithm>
#include <string>

#include "cica/error.hpp"

namespace cica {

std::vector<ClassId> unique_sorted(std::span<const ClassId> labels) {
  std::vector<ClassId> ids(labels.begin(), labels.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

LabeledDataset LabeledDataset::make(Matrix x, std::vector<ClassId> labels, std::vector<ClassId> class_ids) {
  if (x.cols() != labels.size())
    fail(ErrorKind::Contract, "LabeledDataset: " + std::to_string(labels.size()) + " labels for " +
                                  std::to_string(x.cols()) + " samples");
  if (class_ids.empty()) {
    class_ids = unique_sorted(labels);
  } else {
    class_ids = unique_sorted(class_ids);
    for (ClassId l : labels)
      if (!std::binary_search(class_ids.begin(), class_ids.end(), l))
        fail(ErrorKind::MissingClass, "LabeledDataset: label " + std::to_string(l) + " is not a declared class");
  }
  return LabeledDataset{std::move(x), std::move(labels), std::move(class_ids)};
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> idx) const {
  std::vector<ClassId> sub(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) sub[i] = labels[idx[i]];
  return LabeledDataset{select_columns(x, idx), std::move(sub), class_ids};
}

std::vector<std::vector<std::size_t>> LabeledDataset::class_members() const {
  std::vector<std::vector<std::size_t>> members(class_ids.size());
  for (std::size_t j = 0; j < labels.size(); ++j) members[class_index(labels[j])].push_back(j);
  return members;
}

std::size_t LabeledDataset::class_index(ClassId id) const {
  const auto it = std::lower_bound(class_ids.begin(), class_ids.end(), id);
  if (it == class_ids.end() || *it != id) fail(ErrorKind::MissingClass, "unknown class " + std::to_string(id));
  return static_cast<std::size_t>(it - class_ids.begin());
}

LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b) {
  if (a.size() == 0 && a.x.rows() == 0) return b;
  if (b.size() == 0 && b.x.rows() == 0) return a;
  require(a.features() == b.features(), "concat: feature counts differ");
  std::vector<ClassId> labels = a.labels;
  labels.insert(labels.end(), b.labels.begin(), b.labels.end());
  std::vector<ClassId> ids = a.class_ids;
  ids.insert(ids.end(), b.class_ids.begin(), b.class_ids.end());
  return LabeledDataset{hstack(a.x, b.x), std::move(labels), unique_sorted(ids)};
}

}  // namespace cica
