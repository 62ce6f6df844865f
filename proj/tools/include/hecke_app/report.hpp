#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hecke::app {

struct ReportItem {
  std::string name;
  std::optional<bool> passed;  // nullopt for informational values
  std::string measured;
  std::string expected;
};

struct ReportSection {
  std::string title;
  std::vector<ReportItem> items;
};

// One set of data, rendered as text or JSON.
struct ReportDocument {
  std::string title;
  std::vector<ReportSection> sections;

  ReportSection& section(const std::string& title);
  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] std::vector<std::string> failures() const;
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] std::string to_json() const;
};

void add_check(ReportSection& s, std::string name, bool passed, std::string measured = {}, std::string expected = {});
void add_value(ReportSection& s, std::string name, std::string measured);

}  // namespace hecke::app
