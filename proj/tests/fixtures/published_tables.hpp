#pragma once

// Published per-turn IF rates (turns 1..4) for six systems and ten styles,
// with the degradation value reported for each cell. Used as arithmetic
// fixtures only.

#include <array>
#include <string_view>
#include <vector>

#include "parastyle/core.hpp"

namespace fixtures {

using parastyle::StyleValue;

struct Cell {
  std::string_view model;
  StyleValue style;
  std::array<double, 4> per_turn;
  double reported_d;
};

inline const std::vector<Cell>& degradation_cells() {
  using S = StyleValue;
  static const std::vector<Cell> cells = {
      // Cascaded baseline
      {"Cascaded", S::Happiness, {85, 79, 87, 82}, 3.0},
      {"Cascaded", S::Neutral, {73, 79, 75, 74}, 0.0},
      {"Cascaded", S::Anger, {17, 14, 17, 13}, 2.3},
      {"Cascaded", S::Sadness, {62, 58, 60, 64}, 2.0},
      {"Cascaded", S::NorthAmerican, {100, 99, 100, 100}, 0.3},
      {"Cascaded", S::Indian, {100, 100, 99, 100}, 0.3},
      {"Cascaded", S::Loud, {96, 97, 98, 99}, 0.0},
      {"Cascaded", S::Quiet, {99, 99, 97, 97}, 1.3},
      {"Cascaded", S::Fast, {100, 100, 99, 99}, 0.7},
      {"Cascaded", S::Slow, {100, 100, 98, 100}, 0.7},
      // Gemini Live
      {"Gemini Live", S::Happiness, {91, 89, 89, 92}, 1.3},
      {"Gemini Live", S::Neutral, {64, 69, 75, 69}, 0.0},
      {"Gemini Live", S::Anger, {24, 12, 10, 8}, 14.0},
      {"Gemini Live", S::Sadness, {72, 54, 47, 51}, 21.3},
      {"Gemini Live", S::NorthAmerican, {100, 100, 100, 100}, 0.0},
      {"Gemini Live", S::Indian, {100, 100, 100, 100}, 0.0},
      {"Gemini Live", S::Loud, {57, 55, 60, 73}, 0.7},
      {"Gemini Live", S::Quiet, {95, 93, 88, 82}, 7.3},
      {"Gemini Live", S::Fast, {99, 97, 86, 85}, 9.7},
      {"Gemini Live", S::Slow, {99, 99, 98, 98}, 0.7},
      // GPT-4o
      {"GPT-4o", S::Happiness, {82.1, 92.6, 87.4, 85.3}, 0.0},
      {"GPT-4o", S::Neutral, {58.8, 62.9, 59.8, 56.7}, 0.7},
      {"GPT-4o", S::Anger, {30.5, 24.2, 17.9, 8.4}, 13.7},
      {"GPT-4o", S::Sadness, {78, 65, 44, 45}, 26.7},
      {"GPT-4o", S::NorthAmerican, {100, 100, 100, 100}, 0.0},
      {"GPT-4o", S::Indian, {100, 100, 98, 97}, 1.7},
      {"GPT-4o", S::Loud, {67, 68, 59, 56}, 6.3},
      {"GPT-4o", S::Quiet, {92.7, 94.8, 94.8, 95.8}, 0.0},
      {"GPT-4o", S::Fast, {89, 87, 90, 81}, 3.3},
      {"GPT-4o", S::Slow, {100, 96, 92.9, 86.9}, 8.1},
      // GPT-4o mini
      {"GPT-4o mini", S::Happiness, {89, 90, 87, 84}, 2.3},
      {"GPT-4o mini", S::Neutral, {45, 35, 40, 27}, 11.0},
      {"GPT-4o mini", S::Anger, {39, 6, 6, 1}, 34.7},
      {"GPT-4o mini", S::Sadness, {85, 32, 18, 9}, 65.3},
      {"GPT-4o mini", S::NorthAmerican, {100, 100, 100, 100}, 0.0},
      {"GPT-4o mini", S::Indian, {89, 57, 35, 26}, 49.7},
      {"GPT-4o mini", S::Loud, {77, 74, 68, 61}, 9.3},
      {"GPT-4o mini", S::Quiet, {100, 99, 99, 99}, 1.0},
      {"GPT-4o mini", S::Fast, {87, 86, 83, 80}, 4.0},
      {"GPT-4o mini", S::Slow, {99, 83.8, 80.8, 69.7}, 20.9},
      // Step-Audio 2 mini
      {"Step-Audio 2 mini", S::Happiness, {100, 99, 98, 97}, 2.0},
      {"Step-Audio 2 mini", S::Neutral, {7, 3, 3, 5}, 3.3},
      {"Step-Audio 2 mini", S::Anger, {1, 0, 0, 0}, 1.0},
      {"Step-Audio 2 mini", S::Sadness, {17, 4, 4, 1}, 14.0},
      {"Step-Audio 2 mini", S::NorthAmerican, {66, 78, 72, 71}, 0.0},
      {"Step-Audio 2 mini", S::Indian, {33, 21, 36, 30}, 5.0},
      {"Step-Audio 2 mini", S::Loud, {46, 50, 44, 49}, 0.7},
      {"Step-Audio 2 mini", S::Quiet, {56, 66, 52, 51}, 3.0},
      {"Step-Audio 2 mini", S::Fast, {89, 64, 60, 62}, 27.0},
      {"Step-Audio 2 mini", S::Slow, {81, 67, 53, 42}, 27.0},
      // Qwen2.5-Omni
      {"Qwen2.5-Omni", S::Happiness, {71, 87, 83, 77}, 0.0},
      {"Qwen2.5-Omni", S::Neutral, {41, 20, 17, 18}, 22.7},
      {"Qwen2.5-Omni", S::Anger, {5, 1, 0, 3}, 3.7},
      {"Qwen2.5-Omni", S::Sadness, {17, 4, 4, 0}, 14.3},
      {"Qwen2.5-Omni", S::NorthAmerican, {100, 99, 100, 100}, 0.3},
      {"Qwen2.5-Omni", S::Indian, {0, 0, 0, 0}, 0.0},
      {"Qwen2.5-Omni", S::Loud, {38, 36, 36, 41}, 1.3},
      {"Qwen2.5-Omni", S::Quiet, {69, 63, 64, 59}, 7.0},
      {"Qwen2.5-Omni", S::Fast, {47, 49, 24, 27}, 14.3},
      {"Qwen2.5-Omni", S::Slow, {40, 66, 71, 76}, 0.0},
  };
  return cells;
}

/// Degradation without and with the recall exchange, as published.
struct RecallDelta {
  std::string_view model;
  StyleValue style;
  double d_without;
  double d_with;
};

inline const std::vector<RecallDelta>& recall_deltas() {
  using S = StyleValue;
  static const std::vector<RecallDelta> rows = {
      {"Gemini Live", S::Sadness, 21.3, 17.3},   {"Gemini Live", S::Fast, 9.7, 6.3},
      {"GPT-4o", S::Sadness, 26.7, 14.9},        {"GPT-4o mini", S::Sadness, 65.3, 30.3},
      {"GPT-4o mini", S::Indian, 49.7, 14.9},    {"GPT-4o mini", S::Fast, 4.0, 0.0},
      {"GPT-4o mini", S::Slow, 20.9, 1.5},       {"Step-Audio 2 mini", S::Indian, 5.0, 5.3},
  };
  return rows;
}

}  // namespace fixtures
