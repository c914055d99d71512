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

#include <atomic>
#include <cstdlib>
#include <string>

#include "cyclir/core/error.hpp"
#include "cyclir/kernels/kernels.hpp"

namespace cyclir::kernels {
namespace {

std::atomic<const KernelSet<float>*> g_float_set{nullptr};

Choice env_choice() {
  const char* env = std::getenv("CYCLIR_KERNELS");
  if (!env) return Choice::Auto;
  return parse_choice(env);
}

const KernelSet<float>* resolve(Choice choice) {
  if (choice == Choice::Auto) choice = env_choice();
  switch (choice) {
    case Choice::Scalar:
      return &scalar_set<float>();
    case Choice::Avx2:
      if (!cpu_supports_avx2())
        throw ConfigError("avx2 kernels requested but the CPU lacks AVX2/FMA");
      return &avx2_set();
    case Choice::Auto:
    default:
      return cpu_supports_avx2() ? &avx2_set() : &scalar_set<float>();
  }
}

}  // namespace

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Choice parse_choice(const std::string& name) {
  if (name == "auto" || name.empty()) return Choice::Auto;
  if (name == "scalar") return Choice::Scalar;
  if (name == "avx2") return Choice::Avx2;
  throw ConfigError("unknown kernel choice '" + name + "' (auto|scalar|avx2)");
}

void select(Choice choice) { g_float_set.store(resolve(choice)); }

template <>
const KernelSet<float>& active<float>() {
  const KernelSet<float>* ks = g_float_set.load();
  if (!ks) {
    ks = resolve(Choice::Auto);
    g_float_set.store(ks);
  }
  return *ks;
}

// doubles are only used by the 64-bit verification paths; always scalar
template <>
const KernelSet<double>& active<double>() {
  return scalar_set<double>();
}

const char* active_name() { return active<float>().name; }

}  // namespace cyclir::kernels
