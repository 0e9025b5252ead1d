#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "storyworld/session.hpp"

namespace storyworld {

// Appends the tag to its turn. Identical tags are not duplicated.
// Errors: unknown-turn.
SessionLog annotate(SessionLog log, const ErrorTag& tag);

// Rows of error counts in the column order MI-t, PM-t, UL-t, Planning, Memory.
struct ErrorCounts {
  std::array<int, 5> counts{};

  bool operator==(const ErrorCounts&) const = default;
  ErrorCounts& operator+=(const ErrorCounts& other);
};

struct ErrorTableRow {
  std::string label;     // "TesterA (Gemini)" or "Total (English)"
  std::string scenario;  // scenario id of the session
  std::string group;     // language of the session: "English", "Spanish"
  ErrorCounts counts;
};

// Rows are grouped by scenario and language; each group has one total row.
struct ErrorTable {
  std::vector<ErrorTableRow> rows;    // one per log, input order
  std::vector<ErrorTableRow> totals;  // one per (scenario, language), first-appearance order

  const ErrorTableRow* total(std::string_view scenario, std::string_view group) const;
};

ErrorCounts count_errors(const SessionLog& log);
ErrorTable error_table(const std::vector<SessionLog>& logs);

std::string format_table_text(const ErrorTable& table);
std::string format_table_csv(const ErrorTable& table);

}  // namespace storyworld
