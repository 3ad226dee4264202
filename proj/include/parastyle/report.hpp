#pragma once

// Report generation: metric tables, per-turn IF curves (SVG + data), recall
// and prompt-position ablation deltas, default-style distributions, and the
// judge validation agreement table. Output is a pure function of the
// judgment stores passed in.

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "parastyle/evaluate.hpp"
#include "parastyle/metrics.hpp"
#include "parastyle/store.hpp"

namespace parastyle {

struct RunJudgments {
  std::string run_id;
  std::string dataset_hash;
  std::vector<DialogueJudgments> dialogues;
};

/// Reads manifest.json and judgments/*.json of a run directory.
inline RunJudgments load_run_judgments(const fs::path& run_dir) {
  RunJudgments r;
  const auto manifest = run_dir / "manifest.json";
  if (fs::exists(manifest)) {
    const auto j = read_json_file(manifest);
    r.run_id = j.value("run_id", run_dir.filename().string());
    r.dataset_hash = j.value("dataset_hash", std::string());
  } else {
    r.run_id = run_dir.filename().string();
  }
  const auto dir = run_dir / "judgments";
  if (fs::exists(dir)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) r.dialogues.push_back(dialogue_judgments_from_json(read_json_file(f)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cells

struct CellKey {
  std::string section;
  std::string model;
  StyleValue style = StyleValue::Neutral;
  PromptPosition position = PromptPosition::UserMessage;
  bool recall = false;
  std::string template_id;
  int turns = 0;

  auto tie() const {
    return std::make_tuple(section, model, static_cast<int>(style), static_cast<int>(position), recall, template_id, turns);
  }
  bool operator<(const CellKey& o) const { return tie() < o.tie(); }
  bool operator==(const CellKey& o) const { return tie() == o.tie(); }

  std::string condition() const {
    std::string c(to_string(position));
    if (recall) c += "+recall";
    if (template_id != "default") c += "+" + template_id;
    return c;
  }
};

struct CellMetrics {
  CellKey key;
  std::set<std::string> run_ids;
  int dialogues = 0;
  std::vector<std::optional<Rate>> if_rates;          // turns 1..K
  std::optional<double> degradation;                  // needs every IF_j
  std::vector<std::optional<RecallTally>> recall;     // turns 2..K
  std::optional<double> coherence_mean;
  int coherence_n = 0;
  int unavailable = 0;  // style judgments present but unavailable
  std::map<std::string, std::map<std::string, int>> default_style;  // attribute -> label -> count
  std::set<std::string> judge_versions;
};

struct ReportBundle {
  std::vector<std::string> sections;  // "all", or one per run when K differs
  std::vector<CellMetrics> cells;
  std::map<std::string, std::string> dataset_hashes;  // run_id -> hash
};

inline ReportBundle build_report(const std::vector<RunJudgments>& runs) {
  std::size_t total = 0;
  std::set<int> ks;
  for (const auto& r : runs) {
    total += r.dialogues.size();
    for (const auto& d : r.dialogues) ks.insert(d.config.assistant_turns);
  }
  if (total == 0) throw Error(ErrorKind::Precondition, "no judgments found; run the judge stage first");
  const bool per_run = ks.size() > 1;

  ReportBundle bundle;
  struct Acc {
    CellMetrics m;
    std::vector<TurnJudgments> turns;
    std::vector<std::vector<std::optional<Grade>>> grades;
    double coherence_sum = 0.0;
  };
  std::map<CellKey, Acc> acc;
  std::set<std::string> sections;
  for (const auto& r : runs) {
    bundle.dataset_hashes[r.run_id] = r.dataset_hash;
    for (const auto& d : r.dialogues) {
      CellKey key{per_run ? r.run_id : std::string("all"),
                  d.model_id,
                  d.config.instruction.style,
                  d.config.prompt_position,
                  d.config.recall_enabled,
                  d.config.instruction.template_id,
                  d.config.assistant_turns};
      sections.insert(key.section);
      auto& a = acc[key];
      const int k = key.turns;
      if (a.turns.empty()) {
        a.m.key = key;
        for (int j = 1; j <= k; ++j) a.turns.push_back(TurnJudgments{key.style, j, {}});
        a.grades.resize(static_cast<std::size_t>(k));
      }
      a.m.run_ids.insert(r.run_id);
      ++a.m.dialogues;
      const int topic = d.config.opener.topic_id;
      for (int j = 1; j <= k; ++j) {
        TurnEntry e{topic, std::nullopt};
        for (const auto& jd : d.turns)
          if (jd.turn == j) {
            e.indicator = jd.indicator;
            if (!jd.indicator) ++a.m.unavailable;
            if (!jd.judge_version.empty()) a.m.judge_versions.insert(jd.judge_version);
          }
        a.turns[j - 1].entries.push_back(e);
      }
      for (const auto& rj : d.recall)
        if (rj.turn >= 2 && rj.turn <= k) a.grades[rj.turn - 1].push_back(rj.grade);
      if (d.coherence) {
        a.coherence_sum += *d.coherence;
        ++a.m.coherence_n;
      }
      for (const auto& o : d.default_style) {
        if (o.emotion) ++a.m.default_style["emotion"][*o.emotion];
        if (o.accent) ++a.m.default_style["accent"][*o.accent];
      }
    }
  }
  for (auto& [key, a] : acc) {
    bool complete = true;
    std::vector<double> values;
    for (const auto& tj : a.turns) {
      std::optional<Rate> rate;
      try {
        rate = if_rate_detail(tj);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Undefined) throw;
      }
      if (rate) values.push_back(rate->value);
      else complete = false;
      a.m.if_rates.push_back(rate);
    }
    if (complete && values.size() >= 2) a.m.degradation = degradation(values);
    for (int j = 2; j <= key.turns; ++j) {
      std::optional<RecallTally> t;
      const auto& g = a.grades[j - 1];
      if (std::any_of(g.begin(), g.end(), [](const auto& x) { return x.has_value(); })) t = recall_tally(g);
      a.m.recall.push_back(t);
    }
    if (a.m.coherence_n) a.m.coherence_mean = a.coherence_sum / a.m.coherence_n;
    bundle.cells.push_back(std::move(a.m));
  }
  std::sort(bundle.cells.begin(), bundle.cells.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  bundle.sections.assign(sections.begin(), sections.end());
  return bundle;
}

// ---------------------------------------------------------------------------
// Formatting

inline std::string fmt(double v, int decimals = 1) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v + 0.0);  // + 0.0 folds -0.0
  std::string s(buf);
  if (s == "-0.0" || s == "-0.0000" || s == "-0.000000") s.erase(0, 1);
  return s;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline int max_turns(const ReportBundle& b) {
  int k = 0;
  for (const auto& c : b.cells) k = std::max(k, c.key.turns);
  return k;
}

/// One row per cell; the header names IF_1..IF_K, D, R_2..R_K.
inline std::string metrics_csv(const ReportBundle& b) {
  const int k = max_turns(b);
  std::ostringstream out;
  out << "section,model,style,condition,K";
  for (int j = 1; j <= k; ++j) out << ",IF_" << j;
  out << ",D";
  for (int j = 2; j <= k; ++j) out << ",R_" << j;
  for (int j = 2; j <= k; ++j) out << ",R_strict_" << j;
  out << ",coherence_mean,dialogues\n";
  for (const auto& c : b.cells) {
    out << csv_field(c.key.section) << ',' << csv_field(c.key.model) << ',' << to_string(c.key.style) << ','
        << c.key.condition() << ',' << c.key.turns;
    for (int j = 1; j <= k; ++j) {
      out << ',';
      if (j <= c.key.turns && c.if_rates[j - 1]) out << fmt(c.if_rates[j - 1]->value);
    }
    out << ',' << (c.degradation ? fmt(*c.degradation) : "");
    for (int strict = 0; strict < 2; ++strict)
      for (int j = 2; j <= k; ++j) {
        out << ',';
        if (j <= c.key.turns && c.recall[j - 2]) out << fmt(strict ? c.recall[j - 2]->strict_rate : c.recall[j - 2]->rate);
      }
    out << ',' << (c.coherence_mean ? fmt(*c.coherence_mean, 2) : "") << ',' << c.dialogues << '\n';
  }
  return out.str();
}

/// Every reported number with its run ids, turn and denominator.
inline std::string provenance_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "section,run_ids,model,style,condition,metric,turn,numerator,denominator,value\n";
  for (const auto& c : b.cells) {
    std::string runs;
    for (const auto& r : c.run_ids) runs += (runs.empty() ? "" : ";") + r;
    const std::string prefix = csv_field(c.key.section) + "," + csv_field(runs) + "," + csv_field(c.key.model) + "," +
                               std::string(to_string(c.key.style)) + "," + c.key.condition() + ",";
    for (int j = 1; j <= c.key.turns; ++j)
      if (const auto& r = c.if_rates[j - 1])
        out << prefix << "IF," << j << ',' << r->numerator << ',' << r->denominator << ',' << fmt(r->value, 6) << '\n';
    if (c.degradation) out << prefix << "D,," << ",," << fmt(*c.degradation, 6) << '\n';
    for (int j = 2; j <= c.key.turns; ++j)
      if (const auto& t = c.recall[j - 2]) {
        out << prefix << "R," << j << ',' << t->correct << ',' << t->available << ',' << fmt(t->rate, 6) << '\n';
        out << prefix << "R_strict," << j << ',' << t->strict_correct << ',' << t->available << ','
            << fmt(t->strict_rate, 6) << '\n';
      }
    if (c.coherence_mean) out << prefix << "coherence,,," << c.coherence_n << ',' << fmt(*c.coherence_mean, 6) << '\n';
  }
  return out.str();
}

inline std::string if_curves_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "section,model,style,condition,turn,if_rate,denominator\n";
  for (const auto& c : b.cells)
    for (int j = 1; j <= c.key.turns; ++j)
      if (const auto& r = c.if_rates[j - 1])
        out << csv_field(c.key.section) << ',' << csv_field(c.key.model) << ',' << to_string(c.key.style) << ','
            << c.key.condition() << ',' << j << ',' << fmt(r->value, 4) << ',' << r->denominator << '\n';
  return out.str();
}

/// Line plot of IF_j against turn j for every cell of `section`.
inline std::string if_curves_svg(const ReportBundle& b, const std::string& section) {
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::vector<const CellMetrics*> cells;
  int k = 2;
  for (const auto& c : b.cells)
    if (c.key.section == section) {
      cells.push_back(&c);
      k = std::max(k, c.key.turns);
    }
  const double w = 720, h = 420, left = 60, right = 240, top = 30, bottom = 50;
  const double pw = w - left - right, ph = h - top - bottom;
  auto x_of = [&](int j) { return left + pw * (j - 1) / (k - 1); };
  auto y_of = [&](double v) { return top + ph * (1.0 - v / 100.0); };
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"18\">IF rate per assistant turn (" << section << ")</text>\n";
  for (int v = 0; v <= 100; v += 20) {
    out << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << fmt(y_of(v), 2) << "\" y2=\""
        << fmt(y_of(v), 2) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << fmt(y_of(v) + 4, 2) << "\" text-anchor=\"end\">" << v << "</text>\n";
  }
  for (int j = 1; j <= k; ++j)
    out << "<text x=\"" << fmt(x_of(j), 2) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << j << "</text>\n";
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 10 << "\" text-anchor=\"middle\">assistant turn</text>\n";
  out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
      << ")\" text-anchor=\"middle\">IF (%)</text>\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = *cells[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string points;
    for (int j = 1; j <= c.key.turns; ++j)
      if (const auto& r = c.if_rates[j - 1]) {
        points += (points.empty() ? "" : " ") + fmt(x_of(j), 2) + "," + fmt(y_of(r->value), 2);
        out << "<circle cx=\"" << fmt(x_of(j), 2) << "\" cy=\"" << fmt(y_of(r->value), 2) << "\" r=\"3\" fill=\""
            << color << "\"/>\n";
      }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
    const double ly = top + 14.0 * static_cast<double>(i) + 6;
    out << "<line x1=\"" << left + pw + 16 << "\" x2=\"" << left + pw + 36 << "\" y1=\"" << ly << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << c.key.model << " / "
        << to_string(c.key.style) << " (" << c.key.condition() << ")</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

struct AblationRow {
  std::string section, model;
  StyleValue style = StyleValue::Neutral;
  std::string fixed;  // the condition held constant
  double d_before = 0.0, d_after = 0.0;

  double improvement() const { return d_before - d_after; }
};

/// "21.3 → 17.3 (+4.0)": positive when the second condition degrades less.
inline std::string format_delta(const AblationRow& r) {
  const double imp = r.improvement();
  return fmt(r.d_before) + " → " + fmt(r.d_after) + " (" + (imp >= 0 ? "+" : "") + fmt(imp) + ")";
}

namespace detail {

template <class Match>
std::vector<AblationRow> pair_cells(const ReportBundle& b, Match&& split) {
  std::vector<AblationRow> rows;
  for (const auto& before : b.cells) {
    if (!before.degradation) continue;
    for (const auto& after : b.cells) {
      if (!after.degradation || &before == &after) continue;
      if (auto fixed = split(before.key, after.key))
        rows.push_back({before.key.section, before.key.model, before.key.style, *fixed, *before.degradation,
                        *after.degradation});
    }
  }
  return rows;
}

inline bool same_cell_except(const CellKey& a, const CellKey& b, bool ignore_recall, bool ignore_position) {
  return a.section == b.section && a.model == b.model && a.style == b.style && a.template_id == b.template_id &&
         a.turns == b.turns && (ignore_recall || a.recall == b.recall) && (ignore_position || a.position == b.position);
}

}  // namespace detail

/// Recall off (before) versus on (after), same everything else.
inline std::vector<AblationRow> recall_ablation(const ReportBundle& b) {
  return detail::pair_cells(b, [](const CellKey& off, const CellKey& on) -> std::optional<std::string> {
    if (off.recall || !on.recall || !detail::same_cell_except(off, on, true, false)) return std::nullopt;
    return std::string(to_string(off.position));
  });
}

/// User-message position (before) versus system-message position (after).
inline std::vector<AblationRow> position_ablation(const ReportBundle& b) {
  return detail::pair_cells(b, [](const CellKey& user, const CellKey& sys) -> std::optional<std::string> {
    if (user.position != PromptPosition::UserMessage || sys.position != PromptPosition::SystemMessage ||
        !detail::same_cell_except(user, sys, false, true))
      return std::nullopt;
    return std::string(user.recall ? "recall" : "no-recall");
  });
}

inline std::string ablation_csv(const std::vector<AblationRow>& rows, const char* fixed_name, const char* before,
                                const char* after) {
  std::ostringstream out;
  out << "section,model,style," << fixed_name << ",D_" << before << ",D_" << after << ",improvement,formatted\n";
  for (const auto& r : rows)
    out << csv_field(r.section) << ',' << csv_field(r.model) << ',' << to_string(r.style) << ',' << r.fixed << ','
        << fmt(r.d_before) << ',' << fmt(r.d_after) << ',' << fmt(r.improvement()) << ',' << format_delta(r) << '\n';
  return out.str();
}

inline std::string default_style_csv(const ReportBundle& b) {
  std::ostringstream out;
  out << "section,model,style,condition,attribute,label,count,percent\n";
  for (const auto& c : b.cells)
    for (const auto& [attribute, counts] : c.default_style) {
      int total = 0;
      for (const auto& [label, n] : counts) total += n;
      for (const auto& [label, n] : counts)
        out << csv_field(c.key.section) << ',' << csv_field(c.key.model) << ',' << to_string(c.key.style) << ','
            << c.key.condition() << ',' << attribute << ',' << csv_field(label) << ',' << n << ','
            << fmt(100.0 * n / total) << '\n';
    }
  return out.str();
}

inline std::string report_markdown(const ReportBundle& b) {
  std::ostringstream out;
  out << "# Style adherence report\n";
  for (const auto& section : b.sections) {
    out << "\n## Section: " << section << "\n\n";
    out << "| model | style | condition | IF per turn | IF_1 | D | R per turn | coherence |\n";
    out << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : b.cells) {
      if (c.key.section != section) continue;
      std::string series, recall;
      for (const auto& r : c.if_rates) series += (series.empty() ? "" : " / ") + (r ? fmt(r->value) : std::string("n/a"));
      if (std::any_of(c.recall.begin(), c.recall.end(), [](const auto& t) { return t.has_value(); }))
        for (const auto& t : c.recall) recall += (recall.empty() ? "" : " / ") + (t ? fmt(t->rate) : std::string("n/a"));
      out << "| " << c.key.model << " | " << to_string(c.key.style) << " | " << c.key.condition() << " | " << series
          << " | " << (c.if_rates[0] ? fmt(c.if_rates[0]->value) : "n/a") << " | "
          << (c.degradation ? fmt(*c.degradation) : "n/a") << " | " << (recall.empty() ? "-" : recall) << " | "
          << (c.coherence_mean ? fmt(*c.coherence_mean, 2) : "-") << " |\n";
    }
  }
  const auto recall_rows = recall_ablation(b);
  if (!recall_rows.empty()) {
    out << "\n## Recall process: D without → with recall\n\n| model | style | change |\n|---|---|---|\n";
    for (const auto& r : recall_rows) out << "| " << r.model << " | " << to_string(r.style) << " | " << format_delta(r) << " |\n";
  }
  const auto position_rows = position_ablation(b);
  if (!position_rows.empty()) {
    out << "\n## Prompt position: D user message → system message\n\n| model | style | change |\n|---|---|---|\n";
    for (const auto& r : position_rows)
      out << "| " << r.model << " | " << to_string(r.style) << " | " << format_delta(r) << " |\n";
  }
  out << "\n## Provenance\n\n";
  for (const auto& [run, hash] : b.dataset_hashes)
    out << "- run `" << run << "`: dataset hash `" << (hash.empty() ? "unknown" : hash) << "`\n";
  std::set<std::string> versions;
  for (const auto& c : b.cells) versions.insert(c.judge_versions.begin(), c.judge_versions.end());
  for (const auto& v : versions) out << "- judge `" << v << "`\n";
  return out.str();
}

enum class ReportFormat { Table, Plot, Both };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "table") return ReportFormat::Table;
  if (s == "plot") return ReportFormat::Plot;
  if (s == "both") return ReportFormat::Both;
  throw Error(ErrorKind::Config, "format must be table, plot or both");
}

/// Writes the bundle; returns the file names written.
inline std::vector<std::string> write_report(const ReportBundle& b, const fs::path& out_dir, ReportFormat format) {
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    write_file_atomic(out_dir / name, body);
    written.push_back(name);
  };
  if (format != ReportFormat::Plot) {
    put("metrics.csv", metrics_csv(b));
    put("provenance.csv", provenance_csv(b));
    put("recall_ablation.csv", ablation_csv(recall_ablation(b), "position", "without_recall", "with_recall"));
    put("position_ablation.csv", ablation_csv(position_ablation(b), "recall", "user", "system"));
    put("default_style.csv", default_style_csv(b));
    put("report.md", report_markdown(b));
  }
  if (format != ReportFormat::Table) {
    put("if_curves.csv", if_curves_csv(b));
    for (const auto& s : b.sections) put("if_curves_" + s + ".svg", if_curves_svg(b, s));
  }
  return written;
}

// ---------------------------------------------------------------------------
// Judge validation

struct AgreementRow {
  std::string task;
  std::string judge;
  int items = 0;     // joined items with a majority label
  int ties = 0;      // excluded
  std::optional<double> kappa;
  std::string kappa_error;
  double mcc = 0.0;
};

struct AgreementResult {
  std::vector<AgreementRow> rows;
  std::vector<std::string> unjoined;  // annotation item ids without a judgment
};

/// Item id of a judged turn, used to join human annotations.
inline std::string item_id(const std::string& dialogue_id, int turn) { return dialogue_id + "#" + std::to_string(turn); }

/// Annotations: JSONL records {item_id, human_labels: [0|1, ...], task?}.
/// Labels say whether the clip matches the instructed style.
inline AgreementResult validate_judges(const std::string& annotations_path, const std::vector<RunJudgments>& runs) {
  struct Judged {
    std::string task, judge;
    int label;
  };
  std::map<std::string, Judged> judged;
  for (const auto& r : runs)
    for (const auto& d : r.dialogues)
      for (const auto& j : d.turns)
        if (j.indicator)
          judged[item_id(d.dialogue_id, j.turn)] = {std::string(to_string(attribute_of(j.style))), j.judge_version, *j.indicator};

  std::ifstream in(annotations_path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + annotations_path);
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<int>, std::vector<int>>> groups;
  std::map<std::pair<std::string, std::string>, int> ties;
  AgreementResult result;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (text::trim(line).empty()) continue;
    std::string id;
    std::vector<int> labels;
    std::string task;
    try {
      const auto j = nlohmann::json::parse(line);
      id = j.at("item_id").get<std::string>();
      for (const auto& l : j.at("human_labels")) labels.push_back(l.is_boolean() ? (l.get<bool>() ? 1 : 0) : l.get<int>());
      task = j.value("task", std::string());
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, annotations_path + ":" + std::to_string(n) + ": " + e.what());
    }
    auto it = judged.find(id);
    if (it == judged.end()) {
      result.unjoined.push_back(id);
      continue;
    }
    const auto key = std::make_pair(task.empty() ? it->second.task : task, it->second.judge);
    const auto vote = majority_vote(labels);
    if (std::holds_alternative<Tie>(vote)) {
      ++ties[key];
      groups[key];
      continue;
    }
    groups[key].first.push_back(std::get<int>(vote));
    groups[key].second.push_back(it->second.label);
  }
  for (const auto& [key, vectors] : groups) {
    AgreementRow row;
    row.task = key.first;
    row.judge = key.second;
    row.items = static_cast<int>(vectors.first.size());
    row.ties = ties[key];
    try {
      row.kappa = cohens_kappa(vectors.first, vectors.second);
    } catch (const Error& e) {
      row.kappa_error = e.what();
    }
    if (!vectors.first.empty()) row.mcc = mcc(vectors.first, vectors.second);
    result.rows.push_back(std::move(row));
  }
  return result;
}

inline std::string agreement_csv(const AgreementResult& r) {
  std::ostringstream out;
  out << "task,judge,items,ties_excluded,kappa,mcc,note\n";
  for (const auto& row : r.rows)
    out << row.task << ',' << csv_field(row.judge) << ',' << row.items << ',' << row.ties << ','
        << (row.kappa ? fmt(*row.kappa, 3) : "undefined") << ',' << fmt(row.mcc, 3) << ',' << csv_field(row.kappa_error)
        << '\n';
  return out.str();
}

}  // namespace parastyle
