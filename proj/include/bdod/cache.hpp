// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef BDOD_CACHE_HPP
#define BDOD_CACHE_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "bdod/operators.hpp"

namespace bdod {

// FNV-1a over raw bytes; content keys hash exact double bit patterns.
uint64_t fnv1a(const void* data, size_t n, uint64_t seed = 1469598103934665603ULL);
uint64_t hash_double(uint64_t seed, double v);
uint64_t hash_string(uint64_t seed, const std::string& s);
std::string hash_hex(uint64_t h);

// Content hash of a mesh (vertices + panel indices, exact bits).
uint64_t mesh_content_hash(const SurfaceMesh& mesh);

// Binary matrix cache: <key>.bin holds little-endian complex-double entries
// row-major plus the weight vector; <key>.json is a parameter sidecar.
class OperatorCache {
 public:
  explicit OperatorCache(std::string dir);
  std::optional<DenseOperator> load(const std::string& key) const;
  void store(const std::string& key, const DenseOperator& op,
             const std::string& sidecar_json) const;
  static std::string key_for(uint64_t mesh_hash, double omega, int deriv_order,
                             int quad_degree, double c, double omega0);

 private:
  std::string dir_;
};

// Per-frequency sweep solution cache (densities + scalar diagnostics).
struct SweepRecord {
  Eigen::VectorXcd density;
  double omega = 0.0;
  double resolvent_norm = 0.0;
  double rhs_norm = 0.0;
  double solve_residual = 0.0;
};

class SweepCache {
 public:
  explicit SweepCache(std::string dir);
  bool enabled() const { return !dir_.empty(); }
  std::optional<SweepRecord> load(const std::string& key) const;
  void store(const std::string& key, const SweepRecord& rec) const;

 private:
  std::string dir_;
};

}  // namespace bdod

#endif
