#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "swr/core/matrix.hpp"

namespace swr {

// One learnable tensor: a value and a gradient buffer of identical shape.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Ordered collection of named parameters. Insertion order is the canonical
// order everywhere (optimizer walk, serialization), so identical construction
// gives bit-identical behaviour.
class ParamStore {
 public:
  Matrix& add(const std::string& name, Matrix value) {
    if (index_.count(name))
      throw std::invalid_argument("ParamStore: duplicate parameter \"" + name +
                                  "\"");
    index_[name] = entries_.size();
    Param p;
    p.name = name;
    p.grad = Matrix(value.rows, value.cols);
    p.value = std::move(value);
    entries_.push_back(std::move(p));
    return entries_.back().value;
  }

  Param& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end())
      throw std::invalid_argument("ParamStore: unknown parameter \"" + name +
                                  "\"");
    return entries_[it->second];
  }
  const Param& at(const std::string& name) const {
    return const_cast<ParamStore*>(this)->at(name);
  }
  bool has(const std::string& name) const { return index_.count(name) != 0; }

  std::vector<Param>& entries() { return entries_; }
  const std::vector<Param>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  void zero_grads() {
    for (auto& p : entries_) p.grad.zero();
  }

  std::size_t total_values() const {
    std::size_t n = 0;
    for (const auto& p : entries_) n += p.value.size();
    return n;
  }

 private:
  std::vector<Param> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace swr
