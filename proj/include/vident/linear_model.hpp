#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vident/errors.hpp"
#include "vident/hashing.hpp"
#include "vident/io.hpp"
#include "vident/rng.hpp"

// Hashed-feature multinomial logistic regression trained by SGD. Small,
// deterministic, and fast enough for desk-scale corpora; it stands in for
// the pretrained scorers behind the same interface.

namespace vident {

// Sparse feature vector; duplicate indices accumulate additively.
using FeatureVec = std::vector<std::pair<uint32_t, float>>;

class FeatureSpace {
 public:
  explicit FeatureSpace(uint32_t bits) : bits_(bits), mask_((1u << bits) - 1) {}

  uint32_t bits() const { return bits_; }
  size_t size() const { return static_cast<size_t>(mask_) + 1; }
  uint32_t index(std::string_view name) const {
    return static_cast<uint32_t>(fnv1a64(name)) & mask_;
  }

 private:
  uint32_t bits_;
  uint32_t mask_;
};

struct LinearModel {
  uint32_t bits = 18;
  size_t n_classes = 2;
  std::vector<double> weights;  // n_classes rows of (1 << bits) weights + 1 bias

  size_t row_len() const { return (size_t{1} << bits) + 1; }

  // Raw per-class scores w_c . x + b_c.
  std::vector<double> scores(const FeatureVec& x) const {
    std::vector<double> out(n_classes);
    for (size_t c = 0; c < n_classes; ++c) {
      const double* row = weights.data() + c * row_len();
      double s = row[row_len() - 1];
      for (const auto& [idx, val] : x) s += row[idx] * val;
      out[c] = s;
    }
    return out;
  }

  std::vector<double> probabilities(const FeatureVec& x) const {
    std::vector<double> s = scores(x);
    double mx = *std::max_element(s.begin(), s.end());
    double sum = 0.0;
    for (double& v : s) {
      v = std::exp(v - mx);
      sum += v;
    }
    for (double& v : s) v /= sum;
    return s;
  }
};

struct TrainOptions {
  uint32_t bits = 18;
  int epochs = 10;
  double learning_rate = 0.2;
  double decay_per_epoch = 1e-4;  // multiplicative weight decay (regularizer)
  uint64_t seed = 1;
  std::vector<double> class_weights;  // empty = all ones
};

// Plain SGD over shuffled examples; shuffling uses the library Rng so the
// result is identical across platforms and runs.
inline LinearModel train_logistic(const std::vector<FeatureVec>& xs, const std::vector<int>& ys,
                                  size_t n_classes, const TrainOptions& opt) {
  if (xs.size() != ys.size()) throw InternalError("train_logistic: size mismatch");
  if (xs.empty()) throw DataError("train_logistic: no training examples");
  for (int y : ys)
    if (y < 0 || static_cast<size_t>(y) >= n_classes)
      throw InternalError("train_logistic: label out of range");

  LinearModel model;
  model.bits = opt.bits;
  model.n_classes = n_classes;
  model.weights.assign(n_classes * model.row_len(), 0.0);

  std::vector<double> cw = opt.class_weights;
  if (cw.empty()) cw.assign(n_classes, 1.0);
  if (cw.size() != n_classes) throw InternalError("train_logistic: class weight count");

  std::vector<size_t> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  Rng rng(opt.seed);
  const size_t row = model.row_len();
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    rng.shuffle(order);
    const double lr = opt.learning_rate / (1.0 + 0.5 * epoch);
    for (size_t pos : order) {
      const FeatureVec& x = xs[pos];
      const int y = ys[pos];
      std::vector<double> p = model.probabilities(x);
      const double w = cw[static_cast<size_t>(y)];
      for (size_t c = 0; c < n_classes; ++c) {
        const double g = lr * w * (p[c] - (static_cast<int>(c) == y ? 1.0 : 0.0));
        if (g == 0.0) continue;
        double* wrow = model.weights.data() + c * row;
        for (const auto& [idx, val] : x) wrow[idx] -= g * val;
        wrow[row - 1] -= g;
      }
    }
    if (opt.decay_per_epoch > 0.0) {
      const double keep = 1.0 - opt.decay_per_epoch;
      for (double& v : model.weights) v *= keep;
    }
  }
  return model;
}

namespace detail {

inline void add_feature(FeatureVec& x, const FeatureSpace& space, const std::string& name,
                        float value = 1.0f) {
  x.emplace_back(space.index(name), value);
}

inline std::string double_text(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError(where + ": bad number '" + std::string(text) + "'");
  return v;
}

}  // namespace detail

// Text serialization: metadata lines, then one sparse line per nonzero
// weight. Doubles go through to_chars so load(save(m)) == m exactly.
inline std::string serialize_linear_model(const LinearModel& model) {
  std::string out = "#vident-linear v1\n";
  out += "bits," + std::to_string(model.bits) + '\n';
  out += "classes," + std::to_string(model.n_classes) + '\n';
  const size_t row = model.row_len();
  for (size_t c = 0; c < model.n_classes; ++c)
    for (size_t i = 0; i < row; ++i) {
      double v = model.weights[c * row + i];
      if (v == 0.0) continue;
      out += std::to_string(c) + ',' + std::to_string(i) + ',' + detail::double_text(v) + '\n';
    }
  return out;
}

inline LinearModel deserialize_linear_model(const std::string& text, const std::string& where) {
  auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "#vident-linear v1")
    throw DataError(where + ": not a linear model file");
  LinearModel model;
  bool have_bits = false, have_classes = false;
  size_t i = 1;
  for (; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.rfind("bits,", 0) == 0) {
      model.bits = static_cast<uint32_t>(std::stoul(line.substr(5)));
      have_bits = true;
    } else if (line.rfind("classes,", 0) == 0) {
      model.n_classes = std::stoul(line.substr(8));
      have_classes = true;
    } else {
      break;
    }
  }
  if (!have_bits || !have_classes) throw DataError(where + ": missing model header fields");
  model.weights.assign(model.n_classes * model.row_len(), 0.0);
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    size_t c1 = lines[i].find(',');
    size_t c2 = c1 == std::string::npos ? std::string::npos : lines[i].find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw DataError(where + ":" + std::to_string(i + 1) + ": bad weight line");
    size_t cls = std::stoul(lines[i].substr(0, c1));
    size_t idx = std::stoul(lines[i].substr(c1 + 1, c2 - c1 - 1));
    if (cls >= model.n_classes || idx >= model.row_len())
      throw DataError(where + ":" + std::to_string(i + 1) + ": weight out of range");
    model.weights[cls * model.row_len() + idx] = detail::parse_double(
        std::string_view(lines[i]).substr(c2 + 1), where + ":" + std::to_string(i + 1));
  }
  return model;
}

}  // namespace vident
