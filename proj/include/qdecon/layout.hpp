#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qdecon {

using Labels = std::vector<std::string>;

/// Ordered list of labeled subsystems. Linear indices are big-endian in the
/// label order: the first label varies slowest.
class SystemLayout {
 public:
  SystemLayout() = default;
  SystemLayout(Labels labels, std::vector<int> dims);

  const Labels& labels() const { return labels_; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  long total_dim() const;

  std::optional<std::size_t> index_of(const std::string& label) const;
  bool contains(const std::string& label) const;
  int dim_of(const std::string& label) const;
  /// Product of the dimensions of `labels` (all must be present).
  long dim_of(std::span<const std::string> labels) const;

  /// Sub-layout with the given labels, in the given order.
  SystemLayout select(std::span<const std::string> labels) const;
  /// Layout without the given labels; remaining order preserved.
  SystemLayout without(std::span<const std::string> labels) const;
  /// Concatenation; throws on label collision.
  SystemLayout concat(const SystemLayout& other) const;

  bool operator==(const SystemLayout&) const = default;

 private:
  Labels labels_;
  std::vector<int> dims_;
};

/// Splits a linear index of `layout` into per-system digits.
std::vector<int> unravel(long index, const std::vector<int>& dims);
long ravel(const std::vector<int>& digits, const std::vector<int>& dims);

/// For the permutation `order` (new position -> old position) of `dims`,
/// returns for each new linear index the old linear index.
std::vector<long> permutation_index_map(const std::vector<int>& dims,
                                        const std::vector<std::size_t>& order);

std::string join_labels(const Labels& labels);

}  // namespace qdecon
