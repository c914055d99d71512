// Copyright (c) 2026 the cyclir authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.

#ifndef CYCLIR_CORE_PARAM_HPP
#define CYCLIR_CORE_PARAM_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cyclir/core/rng.hpp"
#include "cyclir/core/tensor.hpp"

namespace cyclir {

/// One learnable tensor. grad/m/v are sized lazily by backward passes and
/// the optimizer.
template <typename T>
struct Param {
  std::string name;
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;
  std::vector<T> m, v;  // optimizer moments
  bool trainable = true;

  std::size_t size() const { return value.size(); }
  void zero_grad() {
    grad.assign(value.size(), T(0));
  }
};

/// Owns all parameters of a model. Initialization draws from an rng derived
/// from (seed, parameter name) so creation order never affects values.
template <typename T>
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed) : seed_(seed) {}

  enum class Init { Zeros, Ones, Normal, FanIn };

  Param<T>& create(const std::string& name, Shape shape, Init init,
                   double arg = 0.0) {
    if (by_name_.count(name))
      throw Error("duplicate parameter name: " + name);
    auto p = std::make_unique<Param<T>>();
    p->name = name;
    p->shape = std::move(shape);
    p->value.resize(numel(p->shape));
    Rng rng = Rng(seed_).derive("param:" + name);
    switch (init) {
      case Init::Zeros:
        break;
      case Init::Ones:
        std::fill(p->value.begin(), p->value.end(), T(1));
        break;
      case Init::Normal:
        for (auto& x : p->value) x = static_cast<T>(rng.normal(0.0, arg));
        break;
      case Init::FanIn: {
        // arg = fan_in
        const double std = std::sqrt(1.0 / std::max(1.0, arg));
        for (auto& x : p->value) x = static_cast<T>(rng.normal(0.0, std));
        break;
      }
    }
    Param<T>* raw = p.get();
    by_name_[name] = raw;
    order_.push_back(std::move(p));
    return *raw;
  }

  Param<T>* find(const std::string& name) {
    auto it = by_name_.find(name);
    return it == by_name_.end() ? nullptr : it->second;
  }

  Param<T>& at(const std::string& name) {
    Param<T>* p = find(name);
    if (!p) throw Error("no such parameter: " + name);
    return *p;
  }

  const std::vector<std::unique_ptr<Param<T>>>& all() const { return order_; }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& p : order_) n += p->size();
    return n;
  }

  void zero_grads() {
    for (auto& p : order_) p->zero_grad();
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<std::unique_ptr<Param<T>>> order_;
  std::map<std::string, Param<T>*> by_name_;
};

}  // namespace cyclir

#endif  // CYCLIR_CORE_PARAM_HPP
