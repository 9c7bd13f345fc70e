#include "spamfilter/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>

#include "spamfilter/error.hpp"
#include "spamfilter/text_format.hpp"

namespace spamfilter {

double kernel_eval(const Kernel& kernel, const SparseVector& x, const SparseVector& y) {
  switch (kernel.type) {
    case Kernel::Type::Linear:
      return dot(x, y);
    case Kernel::Type::Rbf: {
      const double d2 = std::max(0.0, squared_norm(x) + squared_norm(y) - 2.0 * dot(x, y));
      return std::exp(-kernel.gamma * d2);
    }
  }
  return 0.0;
}

void TrainConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("c", "must be a positive finite number");
  if (!(kkt_tolerance > 0.0)) throw ConfigError("kkt_tolerance", "must be positive");
  if (!(alpha_epsilon > 0.0)) throw ConfigError("alpha_epsilon", "must be positive");
  if (max_passes < 1) throw ConfigError("max_passes", "must be at least 1");
  if (kernel.type == Kernel::Type::Rbf && !(kernel.gamma > 0.0))
    throw ConfigError("gamma", "RBF kernel needs gamma > 0");
}

namespace {

/// Kernel rows computed on demand and kept in a least-recently-used cache.
class KernelRows {
 public:
  KernelRows(std::span<const SparseVector> x, const Kernel& kernel, std::size_t budget_bytes)
      : x_(x), kernel_(kernel), rows_(x.size()), where_(x.size()), diag_(x.size()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
    for (std::size_t i = 0; i < x.size(); ++i) diag_[i] = kernel_eval(kernel_, x_[i], x_[i]);
  }

  double diag(std::size_t i) const { return diag_[i]; }

  const std::vector<double>& row(std::size_t i) {
    if (!rows_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return rows_[i];
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      std::vector<double>().swap(rows_[victim]);
    }
    auto& r = rows_[i];
    r.resize(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j) r[j] = j == i ? diag_[i] : kernel_eval(kernel_, x_[i], x_[j]);
    lru_.push_front(i);
    where_[i] = lru_.begin();
    return r;
  }

 private:
  std::span<const SparseVector> x_;
  Kernel kernel_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::vector<double> diag_;
  std::size_t capacity_ = 2;
};

class SmoSolver {
 public:
  SmoSolver(std::span<const SparseVector> x, std::span<const int> y, const TrainConfig& cfg, bool record)
      : x_(x), y_(y), cfg_(cfg), rows_(x, cfg.kernel, cfg.cache_bytes), alpha_(x.size(), 0.0),
        grad_(x.size()), record_(record) {
    for (std::size_t i = 0; i < n(); ++i) grad_[i] = -static_cast<double>(y_[i]);
  }

  SmoStats run() {
    SmoStats stats;
    bool examine_all = true;
    std::size_t changed = 0;
    bool converged = true;
    while (changed > 0 || examine_all) {
      if (stats.passes >= cfg_.max_passes) {
        converged = false;
        break;
      }
      changed = 0;
      for (std::size_t i = 0; i < n(); ++i) {
        if (examine_all || non_bound(i)) changed += examine(i) ? 1 : 0;
      }
      ++stats.passes;
      if (examine_all) {
        examine_all = false;
        // A quiet full sweep: settle the bias and confirm with one more sweep
        // unless nothing moved since the last settle.
        if (changed == 0) {
          settle_bias();
          if (steps_ != settled_at_) {
            settled_at_ = steps_;
            examine_all = true;
          }
        }
      } else if (changed == 0) {
        examine_all = true;
      }
    }
    stats.converged = converged;
    stats.steps = steps_;
    stats.alphas = alpha_;
    stats.objective_trace = std::move(trace_);
    return stats;
  }

  double bias() const { return bias_; }

 private:
  static constexpr double kStepEpsilon = 1e-12;

  std::size_t n() const { return x_.size(); }
  double c() const { return cfg_.c; }
  bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c(); }
  double error(std::size_t i) const { return grad_[i] + bias_; }

  bool examine(std::size_t i2) {
    const double y2 = y_[i2];
    const double a2 = alpha_[i2];
    const double e2 = error(i2);
    const double r2 = e2 * y2;
    if (!((r2 < -cfg_.kkt_tolerance && a2 < c()) || (r2 > cfg_.kkt_tolerance && a2 > 0.0))) return false;

    // Second choice: the non-bound multiplier with the largest |E1 - E2|.
    std::size_t best = n();
    double best_gap = -1.0;
    std::size_t non_bound_count = 0;
    for (std::size_t i = 0; i < n(); ++i) {
      if (!non_bound(i)) continue;
      ++non_bound_count;
      const double gap = std::fabs(error(i) - e2);
      if (i != i2 && gap > best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    if (non_bound_count > 1 && best < n() && take_step(best, i2)) return true;

    const std::size_t start = (i2 + 1) % n();
    for (std::size_t k = 0; k < n(); ++k) {
      const std::size_t i1 = (start + k) % n();
      if (non_bound(i1) && take_step(i1, i2)) return true;
    }
    for (std::size_t k = 0; k < n(); ++k) {
      const std::size_t i1 = (start + k) % n();
      if (take_step(i1, i2)) return true;
    }
    return false;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1];
    const double a2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = error(i1);
    const double e2 = error(i2);
    const double s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c(), c() + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c());
      hi = std::min(c(), a1 + a2);
    }
    if (!(hi > lo)) return false;

    const std::vector<double>& row1 = rows_.row(i1);
    const std::vector<double>& row2 = rows_.row(i2);
    const double k11 = rows_.diag(i1);
    const double k22 = rows_.diag(i2);
    const double k12 = row1[i2];
    const double eta = k11 + k22 - 2.0 * k12;

    double a2_new;
    if (eta > 0.0) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Flat or concave direction: take the better end of the segment.
      const double f1 = y1 * grad_[i1] - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * grad_[i2] - s * a1 * k12 - a2 * k22;
      auto objective_at = [&](double t) {
        const double t1 = a1 + s * (a2 - t);
        return t1 * f1 + t * f2 + 0.5 * t1 * t1 * k11 + 0.5 * t * t * k22 + s * t * t1 * k12;
      };
      const double obj_lo = objective_at(lo);
      const double obj_hi = objective_at(hi);
      if (obj_lo < obj_hi - kStepEpsilon) {
        a2_new = lo;
      } else if (obj_lo > obj_hi + kStepEpsilon) {
        a2_new = hi;
      } else {
        a2_new = a2;
      }
    }
    if (std::fabs(a2_new - a2) < kStepEpsilon * (a2_new + a2 + kStepEpsilon)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    const double snap = kStepEpsilon * c();
    if (a1_new < snap) a1_new = 0.0;
    if (a1_new > c() - snap) a1_new = c();

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = bias_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = bias_ - e2 - d1 * k12 - d2 * k22;
    if (a1_new > 0.0 && a1_new < c()) {
      bias_ = b1;
    } else if (a2_new > 0.0 && a2_new < c()) {
      bias_ = b2;
    } else {
      bias_ = 0.5 * (b1 + b2);
    }

    for (std::size_t k = 0; k < n(); ++k) grad_[k] += d1 * row1[k] + d2 * row2[k];
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    ++steps_;
    if (record_) trace_.push_back(objective());
    return true;
  }

  // Mean of the free-multiplier biases; with every multiplier at a bound,
  // the midpoint of the interval the bound conditions leave open.
  void settle_bias() {
    double sum = 0.0;
    std::size_t free = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n(); ++i) {
      const double b = -grad_[i];
      if (non_bound(i)) {
        sum += b;
        ++free;
      } else if ((y_[i] > 0) == (alpha_[i] <= 0.0)) {
        lo = std::max(lo, b);
      } else {
        hi = std::min(hi, b);
      }
    }
    if (free > 0) {
      bias_ = sum / static_cast<double>(free);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      bias_ = 0.5 * (lo + hi);
    } else if (std::isfinite(lo) || std::isfinite(hi)) {
      bias_ = std::isfinite(lo) ? lo : hi;
    }
  }

  double objective() const {
    double sum = 0.0;
    double quad = 0.0;
    for (std::size_t i = 0; i < n(); ++i) {
      sum += alpha_[i];
      quad += alpha_[i] * y_[i] * (grad_[i] + y_[i]);
    }
    return sum - 0.5 * quad;
  }

  std::span<const SparseVector> x_;
  std::span<const int> y_;
  const TrainConfig& cfg_;
  KernelRows rows_;
  std::vector<double> alpha_;
  std::vector<double> grad_;  // sum_j a_j y_j K_ij - y_i (the error without bias)
  double bias_ = 0.0;
  std::size_t steps_ = 0;
  std::size_t settled_at_ = std::numeric_limits<std::size_t>::max();
  bool record_ = false;
  std::vector<double> trace_;
};

}  // namespace

SvmModel::SvmModel(TrainConfig config, double bias, std::uint64_t space, std::size_t dimension,
                   std::vector<double> alphas, std::vector<int> labels, std::vector<SparseVector> vectors,
                   std::vector<std::string> doc_ids)
    : config_(config), bias_(bias), space_(space), dimension_(dimension), alphas_(std::move(alphas)),
      labels_(std::move(labels)), vectors_(std::move(vectors)), doc_ids_(std::move(doc_ids)) {
  if (alphas_.size() != labels_.size() || alphas_.size() != vectors_.size() || alphas_.size() != doc_ids_.size())
    throw InvalidArgument("SvmModel: support-vector sequences differ in length");
}

double SvmModel::decision_value(const SparseVector& x) const {
  double sum = bias_;
  for (std::size_t i = 0; i < alphas_.size(); ++i)
    sum += alphas_[i] * labels_[i] * kernel_eval(config_.kernel, vectors_[i], x);
  return sum;
}

SmoResult train_smo(std::span<const SparseVector> vectors, std::span<const int> labels, const TrainConfig& config,
                    std::span<const std::string> doc_ids, bool record_objective) {
  config.validate();
  if (vectors.size() != labels.size()) throw InvalidArgument("train_smo: vectors and labels differ in length");
  if (!doc_ids.empty() && doc_ids.size() != vectors.size())
    throw InvalidArgument("train_smo: doc_ids and vectors differ in length");
  if (vectors.size() < 2) throw TrainError("train_smo: need at least two examples");
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) {
      has_pos = true;
    } else if (y == -1) {
      has_neg = true;
    } else {
      throw InvalidArgument("train_smo: labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw TrainError("train_smo: both classes must be present");
  const std::uint64_t space = vectors.front().space;
  std::size_t dimension = 0;
  for (const auto& v : vectors) {
    if (v.space != space) throw InvalidArgument("train_smo: vectors come from different feature spaces");
    dimension = std::max(dimension, v.dim);
    if (!v.entries.empty()) dimension = std::max<std::size_t>(dimension, v.entries.back().index + std::size_t{1});
  }

  SmoSolver solver(vectors, labels, config, record_objective);
  SmoResult result;
  result.stats = solver.run();

  std::vector<double> alphas;
  std::vector<int> sv_labels;
  std::vector<SparseVector> sv_vectors;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (result.stats.alphas[i] <= config.alpha_epsilon) continue;
    alphas.push_back(result.stats.alphas[i]);
    sv_labels.push_back(labels[i]);
    sv_vectors.push_back(vectors[i]);
    ids.push_back(doc_ids.empty() ? std::to_string(i) : doc_ids[i]);
  }
  result.model = SvmModel(config, solver.bias(), space, dimension, std::move(alphas), std::move(sv_labels),
                          std::move(sv_vectors), std::move(ids));
  return result;
}

Prediction predict(const SvmModel& model, const SparseVector& x) {
  if (x.space != model.space())
    throw InvalidArgument("predict: vector feature space " + text::hex64(x.space) + " differs from model space " +
                          text::hex64(model.space()));
  Prediction p;
  p.score = model.decision_value(x);
  p.label = p.score > 0.0 ? Label::Spam : Label::Legitimate;
  return p;
}

std::vector<double> weight_vector(const SvmModel& model) {
  if (model.config().kernel.type != Kernel::Type::Linear)
    throw InvalidArgument("weight_vector: only defined for the linear kernel");
  std::vector<double> w(model.dimension(), 0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double coef = model.alphas()[i] * model.labels()[i];
    for (const auto& e : model.vectors()[i].entries) w[e.index] += coef * e.value;
  }
  return w;
}

std::vector<SupportVectorRef> support_vectors(const SvmModel& model) {
  std::vector<SupportVectorRef> out;
  out.reserve(model.size());
  for (std::size_t i = 0; i < model.size(); ++i)
    out.push_back({model.doc_ids()[i], model.alphas()[i], model.labels()[i]});
  return out;
}

double dual_objective(std::span<const SparseVector> vectors, std::span<const int> labels,
                      std::span<const double> alphas, const Kernel& kernel) {
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    linear += alphas[i];
    if (alphas[i] == 0.0) continue;
    for (std::size_t j = 0; j < vectors.size(); ++j) {
      if (alphas[j] == 0.0) continue;
      quad += alphas[i] * alphas[j] * labels[i] * labels[j] * kernel_eval(kernel, vectors[i], vectors[j]);
    }
  }
  return linear - 0.5 * quad;
}

// ---------------------------------------------------------------------------
// Text dump

namespace {

constexpr std::string_view kModelMagic = "spamfilter-svm-model v1";

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::string_view next() {
    if (pos_ >= text_.size()) throw ParseError("<model>", line_ + 1, "unexpected end of model dump");
    auto nl = text_.find('\n', pos_);
    if (nl == std::string_view::npos) nl = text_.size();
    auto line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return line;
  }

  std::string_view value(std::string_view key) {
    auto line = next();
    auto fields = split_ws(line);
    if (fields.size() != 2 || fields[0] != key)
      throw ParseError("<model>", line_, "expected '" + std::string(key) + " <value>'");
    return fields[1];
  }

  std::size_t line() const { return line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

}  // namespace

std::string SvmModel::to_text() const {
  using text::format_double;
  std::ostringstream out;
  out << kModelMagic << '\n';
  out << "kernel " << (config_.kernel.type == Kernel::Type::Linear ? "linear" : "rbf") << '\n';
  out << "gamma " << format_double(config_.kernel.gamma) << '\n';
  out << "c " << format_double(config_.c) << '\n';
  out << "kkt_tolerance " << format_double(config_.kkt_tolerance) << '\n';
  out << "alpha_epsilon " << format_double(config_.alpha_epsilon) << '\n';
  out << "max_passes " << config_.max_passes << '\n';
  out << "cache_bytes " << config_.cache_bytes << '\n';
  out << "space " << text::hex64(space_) << '\n';
  out << "dimension " << dimension_ << '\n';
  out << "bias " << format_double(bias_) << '\n';
  out << "support_vectors " << alphas_.size() << '\n';
  for (std::size_t i = 0; i < alphas_.size(); ++i) {
    out << text::escape_token(doc_ids_[i]) << ' ' << labels_[i] << ' ' << format_double(alphas_[i]) << ' '
        << vectors_[i].dim << ' ' << vectors_[i].entries.size();
    for (const auto& e : vectors_[i].entries) out << ' ' << e.index << ':' << format_double(e.value);
    out << '\n';
  }
  return out.str();
}

SvmModel SvmModel::from_text(std::string_view text) {
  LineReader in(text);
  if (in.next() != kModelMagic) throw ParseError("<model>", 1, "not a spamfilter model dump");
  try {
    TrainConfig cfg;
    const auto kernel = in.value("kernel");
    if (kernel == "linear") {
      cfg.kernel.type = Kernel::Type::Linear;
    } else if (kernel == "rbf") {
      cfg.kernel.type = Kernel::Type::Rbf;
    } else {
      throw ParseError("<model>", in.line(), "unknown kernel");
    }
    cfg.kernel.gamma = text::parse_double(in.value("gamma"));
    cfg.c = text::parse_double(in.value("c"));
    cfg.kkt_tolerance = text::parse_double(in.value("kkt_tolerance"));
    cfg.alpha_epsilon = text::parse_double(in.value("alpha_epsilon"));
    cfg.max_passes = text::parse_u64(in.value("max_passes"));
    cfg.cache_bytes = text::parse_u64(in.value("cache_bytes"));
    const auto space_hex = in.value("space");
    std::uint64_t space = 0;
    for (char ch : space_hex) {
      int v = (ch >= '0' && ch <= '9') ? ch - '0' : (ch >= 'a' && ch <= 'f') ? ch - 'a' + 10 : -1;
      if (v < 0 || space_hex.size() != 16) throw ParseError("<model>", in.line(), "bad space tag");
      space = (space << 4) | static_cast<std::uint64_t>(v);
    }
    const std::size_t dimension = text::parse_u64(in.value("dimension"));
    const double bias = text::parse_double(in.value("bias"));
    const std::size_t count = text::parse_u64(in.value("support_vectors"));

    std::vector<double> alphas;
    std::vector<int> labels;
    std::vector<SparseVector> vectors;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < count; ++i) {
      auto fields = split_ws(in.next());
      if (fields.size() < 5) throw ParseError("<model>", in.line(), "truncated support vector record");
      ids.push_back(text::unescape_token(fields[0]));
      const auto y = text::parse_i64(fields[1]);
      if (y != 1 && y != -1) throw ParseError("<model>", in.line(), "label must be 1 or -1");
      labels.push_back(static_cast<int>(y));
      alphas.push_back(text::parse_double(fields[2]));
      SparseVector v;
      v.space = space;
      v.dim = text::parse_u64(fields[3]);
      const std::size_t nnz = text::parse_u64(fields[4]);
      if (fields.size() != 5 + nnz) throw ParseError("<model>", in.line(), "entry count mismatch");
      for (std::size_t k = 0; k < nnz; ++k) {
        auto f = fields[5 + k];
        auto colon = f.find(':');
        if (colon == std::string_view::npos) throw ParseError("<model>", in.line(), "bad entry");
        v.entries.push_back({static_cast<std::uint32_t>(text::parse_u64(f.substr(0, colon))),
                             text::parse_double(f.substr(colon + 1))});
      }
      vectors.push_back(std::move(v));
    }
    return SvmModel(cfg, bias, space, dimension, std::move(alphas), std::move(labels), std::move(vectors),
                    std::move(ids));
  } catch (const InvalidArgument& e) {
    throw ParseError("<model>", in.line(), e.what());
  }
}

void SvmModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_text();
}

SvmModel SvmModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace spamfilter
