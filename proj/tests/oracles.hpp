#pragma once

// Independent reference implementations used as test oracles. Everything
// here is written as plain scalar loops against the definitions, never in
// terms of the library's own code paths, so a bug in the implementation
// cannot hide in its oracle.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "advdet/core/tensor.hpp"
#include "advdet/metrics/confusion.hpp"

namespace oracle {

// ---- label-map metrics by direct pixel counting ----------------------------

struct Tally {
  std::vector<std::vector<long long>> counts;  // [truth][pred]
  long long ignored = 0;

  explicit Tally(int k) : counts(k, std::vector<long long>(k, 0)) {}
};

inline Tally tally_maps(const std::vector<advdet::LabelMap>& preds,
                        const std::vector<advdet::LabelMap>& truths, int k) {
  Tally t(k);
  for (std::size_t m = 0; m < preds.size(); ++m) {
    for (int y = 0; y < truths[m].height(); ++y) {
      for (int x = 0; x < truths[m].width(); ++x) {
        const int tv = truths[m].labels(y, x);
        if (tv == truths[m].ignore_value) {
          ++t.ignored;
        } else {
          ++t.counts[tv][preds[m].labels(y, x)];
        }
      }
    }
  }
  return t;
}

inline std::optional<double> iou_class(const Tally& t, int c) {
  long long tp = t.counts[c][c], row = 0, col = 0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    row += t.counts[c][i];
    col += t.counts[i][c];
  }
  const long long uni = row + col - tp;
  if (uni == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(uni);
}

inline std::optional<double> mean_defined(const std::vector<std::optional<double>>& xs) {
  double s = 0;
  int n = 0;
  for (const auto& x : xs) {
    if (x) {
      s += *x;
      ++n;
    }
  }
  if (!n) return std::nullopt;
  return s / n;
}

inline std::optional<double> miou(const Tally& t) {
  std::vector<std::optional<double>> per;
  for (std::size_t c = 0; c < t.counts.size(); ++c) per.push_back(iou_class(t, (int)c));
  return mean_defined(per);
}

inline std::optional<double> dice(const Tally& t) {
  std::vector<std::optional<double>> per;
  for (std::size_t c = 0; c < t.counts.size(); ++c) {
    long long tp = t.counts[c][c], row = 0, col = 0;
    for (std::size_t i = 0; i < t.counts.size(); ++i) {
      row += t.counts[c][i];
      col += t.counts[i][c];
    }
    const long long denom = 2 * tp + (col - tp) + (row - tp);
    per.push_back(denom == 0 ? std::optional<double>{}
                             : std::optional<double>(2.0 * tp / static_cast<double>(denom)));
  }
  return mean_defined(per);
}

inline std::optional<double> pixel_acc(const Tally& t) {
  long long total = 0, diag = 0;
  for (std::size_t i = 0; i < t.counts.size(); ++i) {
    diag += t.counts[i][i];
    for (std::size_t j = 0; j < t.counts.size(); ++j) total += t.counts[i][j];
  }
  if (!total) return std::nullopt;
  return static_cast<double>(diag) / static_cast<double>(total);
}

inline std::optional<double> mean_class_acc(const Tally& t) {
  std::vector<std::optional<double>> per;
  for (std::size_t c = 0; c < t.counts.size(); ++c) {
    long long row = 0;
    for (std::size_t i = 0; i < t.counts.size(); ++i) row += t.counts[c][i];
    per.push_back(row == 0 ? std::optional<double>{}
                           : std::optional<double>(static_cast<double>(t.counts[c][c]) / row));
  }
  return mean_defined(per);
}

inline std::set<int> lost_classes(const std::vector<advdet::LabelMap>& base,
                                  const std::vector<advdet::LabelMap>& adv) {
  auto classes = [](const std::vector<advdet::LabelMap>& maps) {
    std::set<int> out;
    for (const auto& m : maps) {
      for (int y = 0; y < m.height(); ++y) {
        for (int x = 0; x < m.width(); ++x) {
          if (m.labels(y, x) != m.ignore_value) out.insert(m.labels(y, x));
        }
      }
    }
    return out;
  };
  std::set<int> b = classes(base), a = classes(adv), lost;
  for (int c : b) {
    if (!a.count(c)) lost.insert(c);
  }
  return lost;
}

// ---- probability-space statistics ------------------------------------------

inline std::vector<double> softmax(const std::vector<double>& logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  double sum = 0;
  std::vector<double> e(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(logits[i] - m);
    sum += e[i];
  }
  for (auto& v : e) v /= sum;
  return e;
}

inline int argmax_scan(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = static_cast<int>(i);
  }
  return best;
}

inline double non_max_entropy(const std::vector<double>& p) {
  const int top = argmax_scan(p);
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (static_cast<int>(i) != top && p[i] > 0) s += p[i] * std::log(p[i]);
  }
  return s;
}

inline double kernel_density(const std::vector<std::vector<double>>& refs,
                             const std::vector<double>& z, double sigma) {
  double total = 0;
  for (const auto& r : refs) {
    double sq = 0;
    for (std::size_t d = 0; d < z.size(); ++d) sq += (r[d] - z[d]) * (r[d] - z[d]);
    total += std::exp(-sq / (2.0 * sigma * sigma));
  }
  return total;
}

/// AUROC by direct pair counting: P(clean > adv) + P(tie)/2.
inline double auroc_pairs(const std::vector<double>& clean, const std::vector<double>& adv) {
  double wins = 0;
  for (double c : clean) {
    for (double a : adv) {
      if (c > a) wins += 1.0;
      else if (c == a) wins += 0.5;
    }
  }
  return wins / (static_cast<double>(clean.size()) * static_cast<double>(adv.size()));
}

// ---- tiny scalar-loop network forward --------------------------------------

/// conv3x3 pad 1 stride 1 with bias, plain quadruple loop.
inline advdet::Tensor3d conv3x3(const advdet::Tensor3d& in,
                                const std::vector<std::vector<std::vector<std::vector<double>>>>& w,
                                const std::vector<double>& b) {
  const int oc = static_cast<int>(w.size());
  advdet::Tensor3d out(oc, in.height, in.width);
  for (int o = 0; o < oc; ++o) {
    for (int y = 0; y < in.height; ++y) {
      for (int x = 0; x < in.width; ++x) {
        double acc = b[o];
        for (int c = 0; c < in.channels; ++c) {
          for (int ky = -1; ky <= 1; ++ky) {
            for (int kx = -1; kx <= 1; ++kx) {
              const int iy = y + ky, ix = x + kx;
              if (iy < 0 || iy >= in.height || ix < 0 || ix >= in.width) continue;
              acc += w[o][c][ky + 1][kx + 1] * in(c, iy, ix);
            }
          }
        }
        out(o, y, x) = acc;
      }
    }
  }
  return out;
}

inline advdet::Tensor3d relu(const advdet::Tensor3d& in) {
  advdet::Tensor3d out = in;
  for (Eigen::Index i = 0; i < out.data.size(); ++i) out.data[i] = std::max(0.0, out.data[i]);
  return out;
}

inline advdet::Tensor3d maxpool2(const advdet::Tensor3d& in) {
  advdet::Tensor3d out(in.channels, in.height / 2, in.width / 2);
  for (int c = 0; c < in.channels; ++c) {
    for (int y = 0; y < out.height; ++y) {
      for (int x = 0; x < out.width; ++x) {
        double m = in(c, 2 * y, 2 * x);
        m = std::max(m, in(c, 2 * y, 2 * x + 1));
        m = std::max(m, in(c, 2 * y + 1, 2 * x));
        m = std::max(m, in(c, 2 * y + 1, 2 * x + 1));
        out(c, y, x) = m;
      }
    }
  }
  return out;
}

inline std::vector<double> gap(const advdet::Tensor3d& in) {
  std::vector<double> z(in.channels, 0.0);
  for (int c = 0; c < in.channels; ++c) {
    double s = 0;
    for (int y = 0; y < in.height; ++y) {
      for (int x = 0; x < in.width; ++x) s += in(c, y, x);
    }
    z[c] = s / (in.height * in.width);
  }
  return z;
}

}  // namespace oracle
