#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace uqcm {

/// Factor structure of a composite Hilbert space. Factor 0 is the most
/// significant index; by convention atom factors (dimension 2, |g>=0, |e>=1)
/// come first and a cavity Fock factor (index n <-> |n>), if present, is last.
class BasisLayout {
 public:
  BasisLayout() = default;

  explicit BasisLayout(std::vector<int> factor_dims) : dims_(std::move(factor_dims)) {
    if (dims_.empty()) throw std::invalid_argument("BasisLayout: no factors");
    for (int d : dims_) {
      if (d < 2) throw std::invalid_argument("BasisLayout: factor dimension < 2");
    }
  }

  int n_factors() const { return static_cast<int>(dims_.size()); }
  int dim(int factor) const { return dims_.at(static_cast<std::size_t>(factor)); }
  const std::vector<int>& dims() const { return dims_; }

  int total_dim() const {
    return std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<int>());
  }

  // Stride of a factor: how far the flat index moves when this factor's
  // digit increments by one (factor 0 is most significant).
  int stride(int factor) const {
    check_factor(factor);
    int s = 1;
    for (int f = static_cast<int>(dims_.size()) - 1; f > factor; --f) s *= dims_[static_cast<std::size_t>(f)];
    return s;
  }

  int digit(int flat_index, int factor) const {
    return (flat_index / stride(factor)) % dim(factor);
  }

  // Replaces one factor's digit inside a flat index.
  int with_digit(int flat_index, int factor, int value) const {
    const int s = stride(factor);
    const int old = (flat_index / s) % dim(factor);
    return flat_index + (value - old) * s;
  }

  BasisLayout concat(const BasisLayout& other) const {
    std::vector<int> d = dims_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    return BasisLayout(d);
  }

  bool operator==(const BasisLayout& other) const { return dims_ == other.dims_; }
  bool operator!=(const BasisLayout& other) const { return !(*this == other); }

  std::string to_string() const {
    std::string s = "[";
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(dims_[i]);
    }
    return s + "]";
  }

  void check_factor(int factor) const {
    if (factor < 0 || factor >= n_factors())
      throw std::invalid_argument("BasisLayout: factor index " + std::to_string(factor) +
                                  " out of range for layout " + to_string());
  }

  static BasisLayout atoms(int n) { return BasisLayout(std::vector<int>(static_cast<std::size_t>(n), 2)); }

  static BasisLayout atoms_and_cavity(int n_atoms, int n_max) {
    std::vector<int> d(static_cast<std::size_t>(n_atoms), 2);
    d.push_back(n_max + 1);
    return BasisLayout(d);
  }

 private:
  std::vector<int> dims_;
};

}  // namespace uqcm
