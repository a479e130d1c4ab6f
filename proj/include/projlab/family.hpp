// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "projlab/normed_space.hpp"
#include "projlab/projector.hpp"

namespace projlab {

// Positive weights summing to 1 (to 1e-12).
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> alphas);
  static WeightVector uniform(std::size_t n);

  std::size_t size() const noexcept { return alphas_.size(); }
  double operator[](std::size_t j) const { return alphas_[j]; }
  const std::vector<double>& values() const noexcept { return alphas_; }

 private:
  std::vector<double> alphas_;
};

// P_1..P_n on a common space, with their pair projectors and (optionally) a
// consistency certificate.
class ProjectorFamily {
 public:
  ProjectorFamily(NormedSpace space, std::vector<Projector> projectors);

  std::size_t size() const noexcept { return projectors_.size(); }
  const NormedSpace& space() const noexcept { return space_; }
  const Projector& operator[](std::size_t j) const { return projectors_.at(j); }
  const std::vector<Projector>& projectors() const noexcept { return projectors_; }

  // Builds P_{j1,j2} for every unordered pair; pairs listed in
  // explicit_kernels use that kernel, the rest the l2-orthogonal candidate.
  // Throws CompatibilityError naming the first failing pair.
  void build_pairs(const std::map<std::pair<std::size_t, std::size_t>, SubspaceBasis>&
                       explicit_kernels = {});
  void set_pair(PairProjector pair);
  bool has_pair(std::size_t j1, std::size_t j2) const;
  const PairProjector& pair(std::size_t j1, std::size_t j2) const;
  bool pairs_complete() const;

  const std::optional<ConsistencyCertificate>& consistency() const noexcept { return consistency_; }
  void set_consistency(ConsistencyCertificate cert) { consistency_ = std::move(cert); }

  const std::optional<WeightVector>& alphas() const noexcept { return alphas_; }
  void set_alphas(WeightVector w);
  WeightVector alphas_or_uniform() const;

  // max_j of the upper norm certificates.
  double norm_bound() const;

 private:
  static std::pair<std::size_t, std::size_t> key(std::size_t j1, std::size_t j2);

  NormedSpace space_;
  std::vector<Projector> projectors_;
  std::map<std::pair<std::size_t, std::size_t>, PairProjector> pairs_;
  std::optional<ConsistencyCertificate> consistency_;
  std::optional<WeightVector> alphas_;
};

// Orthonormal basis of the intersection of the ranges of the listed projectors.
SubspaceBasis common_range(const ProjectorFamily& family, const std::vector<std::size_t>& subset);

// Certifies a P_{1..n} onto the common range with P_{1..n} P_j = P_{1..n}.
// Candidates: the supplied kernel if any; otherwise the l2-orthogonal
// projector, then the projector whose kernel contains every ker P_j.
// Throws CompatibilityError when no candidate passes.
ConsistencyCertificate check_weak_consistency(const ProjectorFamily& family,
                                              const std::optional<SubspaceBasis>& kernel = {});

// Same test for every subset of size >= 2; reports the first violating subset.
ConsistencyCertificate check_full_consistency(const ProjectorFamily& family);

}  // namespace projlab
