#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cica/linalg.hpp"

namespace cica {

using ClassId = std::int64_t;

/// Feature matrix (p x n, one column per sample) with one label per column.
struct LabeledDataset {
  Matrix x;
  std::vector<ClassId> labels;
  std::vector<ClassId> class_ids;  // sorted, unique; every label is one of these

  /// Validates the pairing. An empty `class_ids` is derived from the labels.
  static LabeledDataset make(Matrix x, std::vector<ClassId> labels, std::vector<ClassId> class_ids = {});

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t features() const noexcept { return x.rows(); }

  LabeledDataset subset(std::span<const std::size_t> idx) const;
  /// Column indices of each declared class, in class_ids order.
  std::vector<std::vector<std::size_t>> class_members() const;
  /// Position of `id` inside class_ids; throws ErrorKind::MissingClass.
  std::size_t class_index(ClassId id) const;
};

std::vector<ClassId> unique_sorted(std::span<const ClassId> labels);

/// Appends the columns and labels of b to a. Declared classes are merged.
LabeledDataset concat(const LabeledDataset& a, const LabeledDataset& b);

}  // namespace cica
