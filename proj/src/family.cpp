// SPDX-License-Identifier: Apache-2.0
#include "projlab/family.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "projlab/error.hpp"
#include "projlab/linalg.hpp"

namespace projlab {
namespace {

std::string subset_label(const std::vector<std::size_t>& subset) {
  std::string s = "{";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(subset[i] + 1);
  }
  return s + "}";
}

struct Candidate {
  Matrix op;
  std::vector<double> residuals;
  double worst = 0.0;
};

Candidate evaluate(const ProjectorFamily& family, const std::vector<std::size_t>& subset, Matrix op) {
  Candidate c{std::move(op), {}, 0.0};
  for (std::size_t j : subset) {
    c.residuals.push_back(compatibility_residual(c.op, family[j].op()));
    c.worst = std::max(c.worst, c.residuals.back());
  }
  return c;
}

// Projector onto `meet` whose kernel contains sum_j ker P_j, completed by the
// orthogonal complement of (sum ker + meet). Empty when the sum of kernels
// meets the intersection, in which case no compatible projector exists.
std::optional<Matrix> kernel_sum_candidate(const ProjectorFamily& family,
                                           const std::vector<std::size_t>& subset,
                                           const SubspaceBasis& meet) {
  const std::size_t d = family.space().dim();
  Matrix kernels(d, 0);
  for (std::size_t j : subset) kernels = hstack(kernels, family[j].kernel().orthonormal());
  const Matrix ksum = kernels.cols() ? orthonormal_columns(kernels) : Matrix(d, 0);
  const Matrix both = hstack(ksum, meet.orthonormal());
  const Matrix both_basis = both.cols() ? orthonormal_columns(both) : Matrix(d, 0);
  if (both_basis.cols() != ksum.cols() + meet.size()) return std::nullopt;
  const Matrix extension = both_basis.cols() ? null_space(both_basis.transpose()) : Matrix::identity(d);
  const SubspaceBasis kernel = SubspaceBasis::from_columns(hstack(ksum, extension));
  try {
    return make_oblique_projector(meet, kernel, family.space()).op();
  } catch (const ComplementError&) {
    return std::nullopt;
  }
}

Candidate certify_subset(const ProjectorFamily& family, const std::vector<std::size_t>& subset,
                         const std::optional<SubspaceBasis>& kernel) {
  const SubspaceBasis meet = common_range(family, subset);
  const std::size_t d = family.space().dim();

  if (kernel) {
    Candidate c = evaluate(family, subset, make_oblique_projector(meet, *kernel, family.space()).op());
    if (c.worst > kCompatibilityTolerance)
      throw CompatibilityError("subset " + subset_label(subset) +
                                   ": supplied intersection projector violates Q P_j = Q",
                               subset, c.worst);
    return c;
  }

  Matrix orth(d, d);
  if (!meet.empty()) {
    const Matrix& q = meet.orthonormal();
    orth = q * q.transpose();
    orth = (orth + orth.transpose()) * 0.5;
  }
  Candidate c = evaluate(family, subset, std::move(orth));
  if (c.worst <= kCompatibilityTolerance) return c;

  if (auto alt = kernel_sum_candidate(family, subset, meet)) {
    Candidate k = evaluate(family, subset, std::move(*alt));
    if (k.worst <= kCompatibilityTolerance) return k;
  }
  throw CompatibilityError("subset " + subset_label(subset) +
                               ": no projector onto the common range satisfies Q P_j = Q "
                               "(orthogonal candidate residual " +
                               std::to_string(c.worst) + ")",
                           subset, c.worst);
}

}  // namespace

WeightVector::WeightVector(std::vector<double> alphas) : alphas_(std::move(alphas)) {
  if (alphas_.empty()) throw ValidationError("alphas", "must not be empty");
  double sum = 0.0;
  for (double a : alphas_) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ValidationError("alphas", "weights must be positive");
    sum += a;
  }
  if (std::fabs(sum - 1.0) > 1e-12) throw ValidationError("alphas", "weights must sum to 1");
}

WeightVector WeightVector::uniform(std::size_t n) {
  return WeightVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ProjectorFamily::ProjectorFamily(NormedSpace space, std::vector<Projector> projectors)
    : space_(std::move(space)), projectors_(std::move(projectors)) {
  if (projectors_.empty()) throw ValidationError("projectors", "family must not be empty");
  for (const auto& p : projectors_)
    if (!(p.space() == space_)) throw DimensionError("projector built over a different space");
}

std::pair<std::size_t, std::size_t> ProjectorFamily::key(std::size_t j1, std::size_t j2) {
  return {std::min(j1, j2), std::max(j1, j2)};
}

void ProjectorFamily::build_pairs(
    const std::map<std::pair<std::size_t, std::size_t>, SubspaceBasis>& explicit_kernels) {
  for (const auto& [k, basis] : explicit_kernels)
    if (k.first >= size() || k.second >= size() || k.first == k.second)
      throw ValidationError("pair_projectors", "pair (" + std::to_string(k.first + 1) + "," +
                                                   std::to_string(k.second + 1) + ") out of range");
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = a + 1; b < size(); ++b) {
      PairMode mode = AutoOrthogonal{};
      if (auto it = explicit_kernels.find({a, b}); it != explicit_kernels.end())
        mode = ExplicitKernel{it->second};
      set_pair(make_pair_projector(projectors_[a], projectors_[b], mode, {a, b}));
    }
  }
}

void ProjectorFamily::set_pair(PairProjector pair) {
  const auto k = key(pair.first, pair.second);
  pairs_.insert_or_assign(k, std::move(pair));
}

bool ProjectorFamily::has_pair(std::size_t j1, std::size_t j2) const {
  return pairs_.contains(key(j1, j2));
}

const PairProjector& ProjectorFamily::pair(std::size_t j1, std::size_t j2) const {
  auto it = pairs_.find(key(j1, j2));
  if (it == pairs_.end())
    throw Error("no pair projector for (" + std::to_string(j1 + 1) + "," + std::to_string(j2 + 1) + ")");
  return it->second;
}

bool ProjectorFamily::pairs_complete() const { return pairs_.size() == size() * (size() - 1) / 2; }

void ProjectorFamily::set_alphas(WeightVector w) {
  if (w.size() != size())
    throw ValidationError("alphas", "expected " + std::to_string(size()) + " entries, got " +
                                        std::to_string(w.size()));
  alphas_ = std::move(w);
}

WeightVector ProjectorFamily::alphas_or_uniform() const {
  return alphas_ ? *alphas_ : WeightVector::uniform(size());
}

double ProjectorFamily::norm_bound() const {
  double b = 0.0;
  for (const auto& p : projectors_) b = std::max(b, p.norm().upper);
  return b;
}

SubspaceBasis common_range(const ProjectorFamily& family, const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw Error("common_range of an empty subset");
  SubspaceBasis meet = family[subset.front()].range();
  for (std::size_t i = 1; i < subset.size() && !meet.empty(); ++i)
    meet = intersect_ranges(meet, family[subset[i]].range());
  return meet;
}

ConsistencyCertificate check_weak_consistency(const ProjectorFamily& family,
                                              const std::optional<SubspaceBasis>& kernel) {
  std::vector<std::size_t> all(family.size());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  Candidate c = certify_subset(family, all, kernel);
  ConsistencyCertificate cert;
  cert.global_op = std::move(c.op);
  cert.residuals = std::move(c.residuals);
  cert.level = ConsistencyLevel::weak;
  return cert;
}

ConsistencyCertificate check_full_consistency(const ProjectorFamily& family) {
  const std::size_t n = family.size();
  if (n > 20) throw Error("full consistency enumerates 2^n subsets; n is too large");
  std::vector<std::vector<std::size_t>> subsets;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (std::size_t{1} << j)) s.push_back(j);
    if (s.size() >= 2) subsets.push_back(std::move(s));
  }
  std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });

  ConsistencyCertificate cert;
  cert.level = ConsistencyLevel::full;
  for (const auto& s : subsets) {
    Candidate c = certify_subset(family, s, std::nullopt);
    if (s.size() == n) cert.residuals = c.residuals;
    cert.subset_table.emplace(s, std::move(c.op));
  }
  if (n == 1) {
    Candidate c = certify_subset(family, {0}, std::nullopt);
    cert.residuals = c.residuals;
    cert.global_op = c.op;
  } else {
    std::vector<std::size_t> all(n);
    for (std::size_t j = 0; j < n; ++j) all[j] = j;
    cert.global_op = cert.subset_table.at(all);
  }
  return cert;
}

}  // namespace projlab
