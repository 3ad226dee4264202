#pragma once

// Instruction-following rate, degradation, recall rate, and the judge
// validation statistics (majority vote, Cohen's kappa, MCC).

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "parastyle/core.hpp"
#include "parastyle/error.hpp"

namespace parastyle {

/// One topic's indicator for a (style, turn); empty = unavailable.
struct TurnEntry {
  int topic_id = 0;
  std::optional<int> indicator;
};

struct TurnJudgments {
  StyleValue style = StyleValue::Neutral;
  int turn = 1;
  std::vector<TurnEntry> entries;
};

struct Rate {
  double value = 0.0;  // percent
  int numerator = 0;
  int denominator = 0;
};

/// 100 x sum(available indicators) / available count.
inline Rate if_rate_detail(const TurnJudgments& tj) {
  Rate r;
  std::vector<int> seen;
  for (const auto& e : tj.entries) {
    seen.push_back(e.topic_id);
    if (!e.indicator) continue;
    if (*e.indicator != 0 && *e.indicator != 1) throw Error(ErrorKind::InvalidArgument, "indicator must be 0 or 1");
    r.numerator += *e.indicator;
    ++r.denominator;
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw Error(ErrorKind::InvalidArgument, "duplicate topic id in turn judgments");
  if (r.denominator == 0) throw Error(ErrorKind::Undefined, "no available judgments");
  r.value = 100.0 * r.numerator / r.denominator;
  return r;
}

inline double if_rate(const TurnJudgments& tj) { return if_rate_detail(tj).value; }

struct IfSeries {
  StyleValue style = StyleValue::Neutral;
  std::vector<double> values;  // IF_1..IF_K
  std::vector<int> denominators;
};

/// D = sum_{j=2..K} max(IF_1 - IF_j, 0) / (K - 1).
inline double degradation(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::InvalidArgument, "degradation needs at least two turns");
  double sum = 0.0;
  for (std::size_t j = 1; j < values.size(); ++j) sum += std::max(values[0] - values[j], 0.0);
  return sum / static_cast<double>(values.size() - 1);
}

inline double degradation(const IfSeries& s) { return degradation(std::span<const double>(s.values)); }

enum class Grade { A, B, C, D };

struct RecallTally {
  double rate = 0.0;         // C or D counted as correct
  double strict_rate = 0.0;  // D only
  int correct = 0;
  int strict_correct = 0;
  int available = 0;
};

/// Unavailable grades are passed as std::nullopt and excluded.
inline RecallTally recall_tally(std::span<const std::optional<Grade>> grades) {
  RecallTally t;
  for (const auto& g : grades) {
    if (!g) continue;
    ++t.available;
    if (*g == Grade::C || *g == Grade::D) ++t.correct;
    if (*g == Grade::D) ++t.strict_correct;
  }
  if (t.available == 0) throw Error(ErrorKind::Undefined, "no available recall grades");
  t.rate = 100.0 * t.correct / t.available;
  t.strict_rate = 100.0 * t.strict_correct / t.available;
  return t;
}

inline double recall_rate(std::span<const std::optional<Grade>> grades) { return recall_tally(grades).rate; }

inline double recall_rate(const std::vector<Grade>& grades) {
  std::vector<std::optional<Grade>> g(grades.begin(), grades.end());
  return recall_tally(g).rate;
}

// ---------------------------------------------------------------------------
// Agreement

struct Tie {
  bool operator==(const Tie&) const = default;
};

template <class L>
using Vote = std::variant<L, Tie>;

/// Unique most frequent label, or Tie when the top count is shared.
template <class L>
Vote<L> majority_vote(std::span<const L> labels) {
  if (labels.empty()) throw Error(ErrorKind::InvalidArgument, "majority vote over no labels");
  std::map<L, int> counts;
  for (const auto& l : labels) ++counts[l];
  const L* best = nullptr;
  int best_n = 0;
  bool tied = false;
  for (const auto& [label, n] : counts) {
    if (n > best_n) {
      best = &label;
      best_n = n;
      tied = false;
    } else if (n == best_n) {
      tied = true;
    }
  }
  if (tied) return Tie{};
  return *best;
}

template <class L>
Vote<L> majority_vote(const std::vector<L>& labels) {
  return majority_vote(std::span<const L>(labels));
}

/// (p_o - p_e) / (1 - p_e) with chance agreement from the marginals.
template <class L>
double cohens_kappa(std::span<const L> a, std::span<const L> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "rater vectors differ in length");
  if (a.size() < 2) throw Error(ErrorKind::InvalidArgument, "kappa needs at least two items");
  const double n = static_cast<double>(a.size());
  std::map<L, double> ma, mb;
  double agree = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma[a[i]] += 1.0;
    mb[b[i]] += 1.0;
    if (a[i] == b[i]) agree += 1.0;
  }
  double pe = 0.0;
  for (const auto& [label, ca] : ma) {
    auto it = mb.find(label);
    if (it != mb.end()) pe += (ca / n) * (it->second / n);
  }
  const double po = agree / n;
  if (std::abs(1.0 - pe) < 1e-12) throw Error(ErrorKind::Undefined, "kappa undefined: chance agreement is 1");
  return (po - pe) / (1.0 - pe);
}

template <class L>
double cohens_kappa(const std::vector<L>& a, const std::vector<L>& b) {
  return cohens_kappa(std::span<const L>(a), std::span<const L>(b));
}

struct Confusion {
  long tp = 0, fn = 0, fp = 0, tn = 0;
};

/// Rows are truth (`a`), columns prediction (`b`); 1 is the positive class.
inline Confusion confusion(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "rater vectors differ in length");
  Confusion c;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 0 && a[i] != 1) || (b[i] != 0 && b[i] != 1))
      throw Error(ErrorKind::InvalidArgument, "MCC labels must be binary");
    if (a[i] == 1 && b[i] == 1) ++c.tp;
    else if (a[i] == 1) ++c.fn;
    else if (b[i] == 1) ++c.fp;
    else ++c.tn;
  }
  return c;
}

/// Zero denominator yields 0.
inline double mcc(const Confusion& c) {
  const double den = std::sqrt(static_cast<double>(c.tp + c.fp) * static_cast<double>(c.tp + c.fn) *
                               static_cast<double>(c.tn + c.fp) * static_cast<double>(c.tn + c.fn));
  if (den == 0.0) return 0.0;
  return (static_cast<double>(c.tp) * static_cast<double>(c.tn) - static_cast<double>(c.fp) * static_cast<double>(c.fn)) / den;
}

inline double mcc(std::span<const int> a, std::span<const int> b) { return mcc(confusion(a, b)); }
inline double mcc(const std::vector<int>& a, const std::vector<int>& b) {
  return mcc(std::span<const int>(a), std::span<const int>(b));
}

/// Expands a binary confusion matrix [[tp, fn], [fp, tn]] into two label
/// vectors (truth, prediction).
inline std::pair<std::vector<int>, std::vector<int>> vectors_from_confusion(const Confusion& c) {
  std::pair<std::vector<int>, std::vector<int>> out;
  auto push = [&](long n, int t, int p) {
    for (long i = 0; i < n; ++i) {
      out.first.push_back(t);
      out.second.push_back(p);
    }
  };
  push(c.tp, 1, 1);
  push(c.fn, 1, 0);
  push(c.fp, 0, 1);
  push(c.tn, 0, 0);
  return out;
}

}  // namespace parastyle
