#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spamfilter/corpus.hpp"
#include "spamfilter/features.hpp"

namespace spamfilter {

struct Kernel {
  enum class Type { Linear, Rbf };
  Type type = Type::Linear;
  double gamma = 0.0;  ///< RBF width, exp(-gamma * |x - y|^2)

  static Kernel linear() { return {}; }
  static Kernel rbf(double gamma) { return {Type::Rbf, gamma}; }

  bool operator==(const Kernel&) const = default;
};

double kernel_eval(const Kernel& kernel, const SparseVector& x, const SparseVector& y);

struct TrainConfig {
  double c = 1.0;
  Kernel kernel;
  double kkt_tolerance = 1e-3;
  double alpha_epsilon = 1e-8;
  std::size_t max_passes = 10000;
  std::size_t cache_bytes = std::size_t{256} << 20;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct Prediction {
  double score = 0.0;
  Label label = Label::Legitimate;  ///< Spam iff score > 0
};

struct SupportVectorRef {
  std::string doc_id;
  double alpha;
  int label;
};

/// Decision function sum_i alpha_i y_i k(x_i, x) + b over the stored support
/// vectors (alpha_i > alpha_epsilon). Immutable once trained.
class SvmModel {
 public:
  SvmModel() = default;
  SvmModel(TrainConfig config, double bias, std::uint64_t space, std::size_t dimension,
           std::vector<double> alphas, std::vector<int> labels, std::vector<SparseVector> vectors,
           std::vector<std::string> doc_ids);

  const TrainConfig& config() const { return config_; }
  double bias() const { return bias_; }
  std::uint64_t space() const { return space_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return alphas_.size(); }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<SparseVector>& vectors() const { return vectors_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }

  double decision_value(const SparseVector& x) const;

  /// Versioned text dump; `from_text(to_text())` reproduces the model and
  /// its dump bit for bit.
  std::string to_text() const;
  static SvmModel from_text(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static SvmModel load(const std::filesystem::path& path);

  bool operator==(const SvmModel&) const = default;

 private:
  TrainConfig config_;
  double bias_ = 0.0;
  std::uint64_t space_ = 0;
  std::size_t dimension_ = 0;
  std::vector<double> alphas_;
  std::vector<int> labels_;
  std::vector<SparseVector> vectors_;
  std::vector<std::string> doc_ids_;
};

struct SmoStats {
  std::size_t passes = 0;
  std::size_t steps = 0;             ///< successful joint updates
  bool converged = false;            ///< false: stopped by max_passes
  std::vector<double> alphas;        ///< every multiplier, training order
  std::vector<double> objective_trace;  ///< dual objective after each step, if requested
};

struct SmoResult {
  SvmModel model;
  SmoStats stats;
};

/// Platt's SMO on the soft-margin dual
///   max sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j k(x_i, x_j),
///   0 <= a_i <= C, sum_i a_i y_i = 0.
/// First choice cycles over non-bound multipliers with periodic full sweeps;
/// the second maximizes |E1 - E2|. No randomness is used. Labels are +1/-1;
/// `doc_ids` may be empty (ids become the example indices).
SmoResult train_smo(std::span<const SparseVector> vectors, std::span<const int> labels, const TrainConfig& config,
                    std::span<const std::string> doc_ids = {}, bool record_objective = false);

/// Throws InvalidArgument when `x` was built against a different space.
Prediction predict(const SvmModel& model, const SparseVector& x);

/// w = sum_i a_i y_i x_i (linear kernel only).
std::vector<double> weight_vector(const SvmModel& model);

std::vector<SupportVectorRef> support_vectors(const SvmModel& model);

/// Dual objective of the full multiplier vector.
double dual_objective(std::span<const SparseVector> vectors, std::span<const int> labels,
                      std::span<const double> alphas, const Kernel& kernel);

}  // namespace spamfilter
