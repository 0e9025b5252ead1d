#include "storyworld/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "storyworld/error.hpp"

namespace storyworld {

namespace {

constexpr const char* kColumns[] = {"MI-t", "PM-t", "UL-t", "Planning", "Memory"};

size_t column_of(ErrorCategory c) {
  return static_cast<size_t>(std::find(std::begin(kErrorCategories), std::end(kErrorCategories), c) -
                             std::begin(kErrorCategories));
}

std::string group_name(const std::string& locale) {
  if (locale == "en") return "English";
  if (locale == "es") return "Spanish";
  return locale;
}

std::string row_label(const SessionLog& log) {
  std::string label = log.info.tester.empty() ? log.info.id : log.info.tester;
  if (!log.info.model_label.empty()) label += " (" + log.info.model_label + ")";
  return label;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

SessionLog annotate(SessionLog log, const ErrorTag& tag) {
  if (tag.turn < 1 || tag.turn > static_cast<int>(log.turns.size())) {
    throw Error("unknown-turn", "turn " + std::to_string(tag.turn) + " does not exist in a log of " +
                                    std::to_string(log.turns.size()) + " turns");
  }
  auto& annotations = log.turns[static_cast<size_t>(tag.turn - 1)].annotations;
  if (std::find(annotations.begin(), annotations.end(), tag) == annotations.end()) annotations.push_back(tag);
  return log;
}

const ErrorTableRow* ErrorTable::total(std::string_view scenario, std::string_view group) const {
  for (const auto& r : totals) {
    if (r.scenario == scenario && r.group == group) return &r;
  }
  return nullptr;
}

ErrorCounts& ErrorCounts::operator+=(const ErrorCounts& other) {
  for (size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  return *this;
}

ErrorCounts count_errors(const SessionLog& log) {
  ErrorCounts c;
  for (const auto& t : log.turns) {
    for (const auto& a : t.annotations) ++c.counts[column_of(a.category)];
  }
  return c;
}

ErrorTable error_table(const std::vector<SessionLog>& logs) {
  ErrorTable table;
  for (const auto& log : logs) {
    ErrorTableRow row{row_label(log), log.info.scenario_id, group_name(log.info.locale), count_errors(log)};
    auto it = std::find_if(table.totals.begin(), table.totals.end(), [&](const ErrorTableRow& r) {
      return r.scenario == row.scenario && r.group == row.group;
    });
    if (it == table.totals.end()) {
      table.totals.push_back({"Total (" + row.group + ")", row.scenario, row.group, {}});
      it = table.totals.end() - 1;
    }
    it->counts += row.counts;
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string format_table_text(const ErrorTable& table) {
  size_t width = 8;
  for (const auto& r : table.rows) width = std::max(width, r.label.size());
  for (const auto& r : table.totals) width = std::max(width, r.label.size());

  std::ostringstream out;
  auto pad = [&](const std::string& s, size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
  auto emit = [&](const ErrorTableRow& r) {
    out << pad(r.label, width);
    for (int n : r.counts.counts) out << "  " << pad(std::to_string(n), 8);
    out << "\n";
  };
  // One block per scenario; within it, rows grouped by language, each group followed by its total.
  std::vector<std::string> scenarios;
  for (const auto& t : table.totals) {
    if (std::find(scenarios.begin(), scenarios.end(), t.scenario) == scenarios.end()) scenarios.push_back(t.scenario);
  }
  for (size_t i = 0; i < scenarios.size(); ++i) {
    if (i > 0) out << "\n";
    out << pad(scenarios[i], width);
    for (const auto* c : kColumns) out << "  " << pad(c, 8);
    out << "\n";
    for (const auto& total : table.totals) {
      if (total.scenario != scenarios[i]) continue;
      for (const auto& r : table.rows) {
        if (r.scenario == total.scenario && r.group == total.group) emit(r);
      }
      emit(total);
    }
  }
  return out.str();
}

std::string format_table_csv(const ErrorTable& table) {
  std::ostringstream out;
  out << "scenario,group,row";
  for (const auto* c : kColumns) out << "," << c;
  out << "\n";
  auto emit = [&](const ErrorTableRow& r) {
    out << csv_field(r.scenario) << "," << csv_field(r.group) << "," << csv_field(r.label);
    for (int n : r.counts.counts) out << "," << n;
    out << "\n";
  };
  for (const auto& total : table.totals) {
    for (const auto& r : table.rows) {
      if (r.scenario == total.scenario && r.group == total.group) emit(r);
    }
    emit(total);
  }
  return out.str();
}

}  // namespace storyworld
