#include "qdecon/layout.hpp"

#include <algorithm>
#include <unordered_set>

#include "qdecon/linalg.hpp"

namespace qdecon {

SystemLayout::SystemLayout(Labels labels, std::vector<int> dims)
    : labels_(std::move(labels)), dims_(std::move(dims)) {
  if (labels_.size() != dims_.size()) {
    throw Error("SystemLayout: label and dimension counts differ");
  }
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw Error("SystemLayout: empty label");
    if (!seen.insert(labels_[i]).second) {
      throw Error("SystemLayout: duplicate label '" + labels_[i] + "'");
    }
    if (dims_[i] < 1) {
      throw Error("SystemLayout: dimension of '" + labels_[i] + "' must be >= 1");
    }
  }
}

long SystemLayout::total_dim() const {
  long d = 1;
  for (int x : dims_) d *= x;
  return d;
}

std::optional<std::size_t> SystemLayout::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

bool SystemLayout::contains(const std::string& label) const {
  return index_of(label).has_value();
}

int SystemLayout::dim_of(const std::string& label) const {
  auto i = index_of(label);
  if (!i) throw Error("unknown label '" + label + "'");
  return dims_[*i];
}

long SystemLayout::dim_of(std::span<const std::string> labels) const {
  long d = 1;
  for (const auto& l : labels) d *= dim_of(l);
  return d;
}

SystemLayout SystemLayout::select(std::span<const std::string> labels) const {
  Labels ls;
  std::vector<int> ds;
  for (const auto& l : labels) {
    ls.push_back(l);
    ds.push_back(dim_of(l));
  }
  return SystemLayout(std::move(ls), std::move(ds));
}

SystemLayout SystemLayout::without(std::span<const std::string> labels) const {
  for (const auto& l : labels) {
    if (!contains(l)) throw Error("unknown label '" + l + "'");
  }
  Labels ls;
  std::vector<int> ds;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (std::find(labels.begin(), labels.end(), labels_[i]) == labels.end()) {
      ls.push_back(labels_[i]);
      ds.push_back(dims_[i]);
    }
  }
  return SystemLayout(std::move(ls), std::move(ds));
}

SystemLayout SystemLayout::concat(const SystemLayout& other) const {
  Labels ls = labels_;
  std::vector<int> ds = dims_;
  ls.insert(ls.end(), other.labels_.begin(), other.labels_.end());
  ds.insert(ds.end(), other.dims_.begin(), other.dims_.end());
  return SystemLayout(std::move(ls), std::move(ds));
}

std::vector<int> unravel(long index, const std::vector<int>& dims) {
  std::vector<int> digits(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % dims[i]);
    index /= dims[i];
  }
  return digits;
}

long ravel(const std::vector<int>& digits, const std::vector<int>& dims) {
  long index = 0;
  for (std::size_t i = 0; i < dims.size(); ++i) index = index * dims[i] + digits[i];
  return index;
}

std::vector<long> permutation_index_map(const std::vector<int>& dims,
                                        const std::vector<std::size_t>& order) {
  const std::size_t k = dims.size();
  std::vector<long> old_strides(k, 1);
  for (std::size_t i = k; i-- > 1;) old_strides[i - 1] = old_strides[i] * dims[i];
  std::vector<int> new_dims(k);
  for (std::size_t i = 0; i < k; ++i) new_dims[i] = dims[order[i]];
  long total = 1;
  for (int d : dims) total *= d;
  std::vector<long> map(static_cast<std::size_t>(total));
  std::vector<int> digits(k, 0);
  for (long n = 0; n < total; ++n) {
    long old = 0;
    for (std::size_t i = 0; i < k; ++i) old += digits[i] * old_strides[order[i]];
    map[static_cast<std::size_t>(n)] = old;
    for (std::size_t i = k; i-- > 0;) {
      if (++digits[i] < new_dims[i]) break;
      digits[i] = 0;
    }
  }
  return map;
}

std::string join_labels(const Labels& labels) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += ",";
    s += labels[i];
  }
  return s;
}

}  // namespace qdecon
