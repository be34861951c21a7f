// Copyright (c) the bdod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "bdod/cache.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace bdod {

uint64_t fnv1a(const void* data, size_t n, uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

uint64_t hash_double(uint64_t seed, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  return fnv1a(&bits, 8, seed);
}

uint64_t hash_string(uint64_t seed, const std::string& s) {
  return fnv1a(s.data(), s.size(), seed);
}

std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

uint64_t mesh_content_hash(const SurfaceMesh& mesh) {
  uint64_t h = fnv1a("mesh", 4);
  for (const auto& v : mesh.vertices)
    for (int d = 0; d < 3; ++d) h = hash_double(h, v[d]);
  for (const auto& p : mesh.panels) h = fnv1a(p.data(), sizeof(int) * 3, h);
  return h;
}

OperatorCache::OperatorCache(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string OperatorCache::key_for(uint64_t mesh_hash, double omega, int deriv_order,
                                   int quad_degree, double c, double omega0) {
  uint64_t h = mesh_hash;
  h = hash_double(h, omega);
  h = fnv1a(&deriv_order, sizeof(int), h);
  h = fnv1a(&quad_degree, sizeof(int), h);
  h = hash_double(h, c);
  h = hash_double(h, omega0);
  return "op_" + hash_hex(h);
}

std::optional<DenseOperator> OperatorCache::load(const std::string& key) const {
  std::ifstream in(dir_ + "/" + key + ".bin", std::ios::binary);
  if (!in) return std::nullopt;
  int64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), 8);
  if (!in || n <= 0) return std::nullopt;
  DenseOperator op;
  op.entries.resize(n, n);
  // entries stored row-major: read into a temporary buffer.
  std::vector<Complex> buf(static_cast<size_t>(n) * n);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(16 * buf.size()));
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) op.entries(i, j) = buf[i * n + j];
  op.weight.resize(n);
  in.read(reinterpret_cast<char*>(op.weight.data()), 8 * n);
  if (!in) return std::nullopt;
  return op;
}

void OperatorCache::store(const std::string& key, const DenseOperator& op,
                          const std::string& sidecar_json) const {
  const int64_t n = op.size();
  std::ofstream out(dir_ + "/" + key + ".bin", std::ios::binary);
  out.write(reinterpret_cast<const char*>(&n), 8);
  std::vector<Complex> buf(static_cast<size_t>(n) * n);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) buf[i * n + j] = op.entries(i, j);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(16 * buf.size()));
  out.write(reinterpret_cast<const char*>(op.weight.data()), 8 * n);
  std::ofstream side(dir_ + "/" + key + ".json");
  side << sidecar_json << "\n";
}

SweepCache::SweepCache(std::string dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::optional<SweepRecord> SweepCache::load(const std::string& key) const {
  if (dir_.empty()) return std::nullopt;
  std::ifstream in(dir_ + "/" + key + ".bin", std::ios::binary);
  if (!in) return std::nullopt;
  int64_t n = 0;
  SweepRecord rec;
  in.read(reinterpret_cast<char*>(&n), 8);
  if (!in || n <= 0) return std::nullopt;
  in.read(reinterpret_cast<char*>(&rec.omega), 8);
  in.read(reinterpret_cast<char*>(&rec.resolvent_norm), 8);
  in.read(reinterpret_cast<char*>(&rec.rhs_norm), 8);
  in.read(reinterpret_cast<char*>(&rec.solve_residual), 8);
  rec.density.resize(n);
  in.read(reinterpret_cast<char*>(rec.density.data()), 16 * n);
  if (!in) return std::nullopt;
  return rec;
}

void SweepCache::store(const std::string& key, const SweepRecord& rec) const {
  if (dir_.empty()) return;
  std::ofstream out(dir_ + "/" + key + ".bin", std::ios::binary);
  int64_t n = rec.density.size();
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&rec.omega), 8);
  out.write(reinterpret_cast<const char*>(&rec.resolvent_norm), 8);
  out.write(reinterpret_cast<const char*>(&rec.rhs_norm), 8);
  out.write(reinterpret_cast<const char*>(&rec.solve_residual), 8);
  out.write(reinterpret_cast<const char*>(rec.density.data()), 16 * n);
}

}  // namespace bdod
