#include <numeric>

#include <gtest/gtest.h>

#include "fixtures/published_tables.hpp"
#include "support.hpp"

namespace ps = parastyle;
using namespace testing_support;

namespace {

ps::TurnJudgments turn_of(std::vector<std::optional<int>> indicators) {
  ps::TurnJudgments tj;
  int topic = 1;
  for (auto i : indicators) tj.entries.push_back({topic++, i});
  return tj;
}

ps::ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ps::Error& e) {
    return e.kind();
  }
  return ps::ErrorKind::Io;
}

}  // namespace

TEST(IfRate, ExcludesUnavailableEntries) {
  const auto r = ps::if_rate_detail(turn_of({1, 0, std::nullopt, 1, 1}));
  EXPECT_DOUBLE_EQ(r.value, 75.0);
  EXPECT_EQ(r.numerator, 3);
  EXPECT_EQ(r.denominator, 4);
  std::vector<std::optional<int>> hundred(100, 0);
  for (int i = 0; i < 72; ++i) hundred[i] = 1;
  EXPECT_DOUBLE_EQ(ps::if_rate(turn_of(hundred)), 72.0);
}

TEST(IfRate, UndefinedAndInvalidInputs) {
  EXPECT_EQ(kind_of([] { ps::if_rate(turn_of({std::nullopt, std::nullopt})); }), ps::ErrorKind::Undefined);
  EXPECT_EQ(kind_of([] { ps::if_rate(turn_of({})); }), ps::ErrorKind::Undefined);
  EXPECT_EQ(kind_of([] { ps::if_rate(turn_of({2})); }), ps::ErrorKind::InvalidArgument);
  auto dup = turn_of({1, 0});
  dup.entries[1].topic_id = 1;
  EXPECT_EQ(kind_of([&] { ps::if_rate(dup); }), ps::ErrorKind::InvalidArgument);
}

TEST(IfRate, MatchesCountingOverRandomVectors) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 200);
    std::vector<std::optional<int>> v;
    int ones = 0, avail = 0;
    for (int i = 0; i < n; ++i) {
      const auto roll = rng() % 10;
      if (roll == 0) {
        v.push_back(std::nullopt);
      } else {
        const int bit = static_cast<int>(roll % 2);
        v.push_back(bit);
        ones += bit;
        ++avail;
      }
    }
    if (avail == 0) continue;
    const double r = ps::if_rate(turn_of(v));
    EXPECT_DOUBLE_EQ(r, 100.0 * ones / avail);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 100.0);
  }
}

TEST(Degradation, WorkedExamples) {
  EXPECT_NEAR(ps::degradation(std::vector<double>{72, 54, 47, 51}), 21.0 + 1.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(ps::degradation(std::vector<double>{50, 60, 70, 80}), 0.0);
  EXPECT_DOUBLE_EQ(ps::degradation(std::vector<double>{100, 60, 40, 20}), 60.0);
  EXPECT_DOUBLE_EQ(ps::degradation(std::vector<double>{80, 60}), 20.0);
  EXPECT_EQ(kind_of([] { ps::degradation(std::vector<double>{80}); }), ps::ErrorKind::InvalidArgument);
}

TEST(Degradation, PropertiesOverRandomSeries) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng() % 8;
    std::vector<double> v(k);
    for (auto& x : v) x = u(rng);
    const double d = ps::degradation(v);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, v[0] + 1e-12);
    // Raising any later turn never increases D.
    auto raised = v;
    raised[1 + rng() % (k - 1)] += 10.0;
    EXPECT_LE(ps::degradation(raised), d + 1e-12);
    // A constant shift of every turn leaves D unchanged.
    auto shifted = v;
    for (auto& x : shifted) x += 5.0;
    EXPECT_NEAR(ps::degradation(shifted), d, 1e-9);
  }
}

TEST(Degradation, ReproducesPublishedTable) {
  int checked = 0;
  for (const auto& cell : fixtures::degradation_cells()) {
    const double d = ps::degradation(std::vector<double>(cell.per_turn.begin(), cell.per_turn.end()));
    EXPECT_NEAR(d, cell.reported_d, 0.05) << cell.model << " " << ps::to_string(cell.style);
    ++checked;
  }
  EXPECT_EQ(checked, 60);
}

TEST(Recall, LenientAndStrictRates) {
  using G = ps::Grade;
  std::vector<std::optional<G>> g{G::D, G::C, G::B, G::A, std::nullopt, G::D};
  const auto t = ps::recall_tally(g);
  EXPECT_EQ(t.available, 5);
  EXPECT_DOUBLE_EQ(t.rate, 60.0);
  EXPECT_DOUBLE_EQ(t.strict_rate, 40.0);
  EXPECT_DOUBLE_EQ(ps::recall_rate(std::vector<G>{G::C, G::D, G::A, G::B}), 50.0);
  std::vector<std::optional<G>> none{std::nullopt};
  EXPECT_EQ(kind_of([&] { ps::recall_tally(none); }), ps::ErrorKind::Undefined);
}

TEST(MajorityVote, UniqueWinnerOrTie) {
  EXPECT_EQ(ps::majority_vote(std::vector<int>{1, 1, 0}), (ps::Vote<int>{1}));
  EXPECT_TRUE(std::holds_alternative<ps::Tie>(ps::majority_vote(std::vector<int>{1, 0})));
  EXPECT_TRUE(std::holds_alternative<ps::Tie>(ps::majority_vote(std::vector<std::string>{"a", "b", "b", "a", "c"})));
  EXPECT_EQ(ps::majority_vote(std::vector<std::string>{"sad", "sad", "happy", "angry"}),
            (ps::Vote<std::string>{"sad"}));
  EXPECT_THROW(ps::majority_vote(std::vector<int>{}), ps::Error);
}

TEST(Kappa, ConfusionExampleAndIdentity) {
  const auto [truth, pred] = ps::vectors_from_confusion({20, 5, 10, 15});
  EXPECT_NEAR(ps::cohens_kappa(truth, pred), 0.4, 1e-12);
  EXPECT_NEAR(ps::cohens_kappa(truth, truth), 1.0, 1e-12);
  const std::vector<int> same{1, 1, 1};
  EXPECT_EQ(kind_of([&] { ps::cohens_kappa(same, same); }), ps::ErrorKind::Undefined);
  EXPECT_EQ(kind_of([] { ps::cohens_kappa(std::vector<int>{1}, std::vector<int>{1}); }),
            ps::ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { ps::cohens_kappa(std::vector<int>{1, 0}, std::vector<int>{1}); }),
            ps::ErrorKind::InvalidArgument);
}

TEST(Kappa, SymmetricAndBoundedOverRandomRaters) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<std::string> a(n), b(n);
    const std::vector<std::string> labels{"happy", "sad", "angry", "neutral"};
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = labels[rng() % labels.size()];
      b[i] = rng() % 3 == 0 ? labels[rng() % labels.size()] : a[i];
    }
    try {
      const double k = ps::cohens_kappa(a, b);
      EXPECT_NEAR(k, ps::cohens_kappa(b, a), 1e-12);
      EXPECT_LE(k, 1.0 + 1e-12);
      EXPECT_GE(k, -1.0 - 1e-12);
    } catch (const ps::Error& e) {
      EXPECT_EQ(e.kind(), ps::ErrorKind::Undefined);
    }
  }
}

TEST(Mcc, ConfusionExampleAndDegenerateCases) {
  const auto [truth, pred] = ps::vectors_from_confusion({20, 5, 10, 15});
  EXPECT_NEAR(ps::mcc(truth, pred), 250.0 / std::sqrt(375000.0), 1e-12);
  EXPECT_NEAR(ps::mcc(truth, pred), 0.40825, 1e-5);
  EXPECT_DOUBLE_EQ(ps::mcc(std::vector<int>{1, 1, 1}, std::vector<int>{1, 0, 1}), 0.0);
  EXPECT_DOUBLE_EQ(ps::mcc(std::vector<int>{1, 0, 1, 0}, std::vector<int>{0, 1, 0, 1}), -1.0);
  EXPECT_THROW(ps::mcc(std::vector<int>{2}, std::vector<int>{1}), ps::Error);
}

TEST(Mcc, AgreesWithKappaOnPerfectRaters) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> v(4 + rng() % 30);
    for (auto& x : v) x = static_cast<int>(rng() % 2);
    v[0] = 0;
    v[1] = 1;
    EXPECT_NEAR(ps::mcc(v, v), 1.0, 1e-12);
    EXPECT_NEAR(ps::cohens_kappa(v, v), 1.0, 1e-12);
  }
}
