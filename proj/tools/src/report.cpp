#include "hecke_app/report.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

namespace hecke::app {

ReportSection& ReportDocument::section(const std::string& t) {
  for (auto& s : sections)
    if (s.title == t) return s;
  sections.push_back({t, {}});
  return sections.back();
}

bool ReportDocument::all_passed() const { return failures().empty(); }

std::vector<std::string> ReportDocument::failures() const {
  std::vector<std::string> out;
  for (const auto& s : sections)
    for (const auto& i : s.items)
      if (i.passed && !*i.passed) out.push_back(s.title + ": " + i.name);
  return out;
}

std::string ReportDocument::to_text() const {
  std::ostringstream os;
  os << title << "\n";
  for (const auto& s : sections) {
    os << "\n[" << s.title << "]\n";
    for (const auto& i : s.items) {
      os << "  " << i.name << ": ";
      if (i.passed) os << (*i.passed ? "pass" : "FAIL");
      else os << i.measured;
      if (i.passed && !i.measured.empty()) os << "  (" << i.measured;
      if (i.passed && !i.expected.empty()) os << (i.measured.empty() ? "  (" : "; ") << "expected " << i.expected;
      if (i.passed && (!i.measured.empty() || !i.expected.empty())) os << ")";
      os << "\n";
    }
  }
  const auto f = failures();
  os << "\n" << (f.empty() ? "all checks passed" : std::to_string(f.size()) + " check(s) failed") << "\n";
  return os.str();
}

std::string ReportDocument::to_json() const {
  nlohmann::json j = {{"title", title}, {"passed", all_passed()}, {"sections", nlohmann::json::array()}};
  for (const auto& s : sections) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& i : s.items) {
      nlohmann::json item = {{"name", i.name}, {"measured", i.measured}, {"expected", i.expected}};
      item["passed"] = i.passed ? nlohmann::json(*i.passed) : nlohmann::json(nullptr);
      items.push_back(item);
    }
    j["sections"].push_back({{"title", s.title}, {"items", items}});
  }
  return j.dump(2);
}

void add_check(ReportSection& s, std::string name, bool passed, std::string measured, std::string expected) {
  s.items.push_back({std::move(name), passed, std::move(measured), std::move(expected)});
}

void add_value(ReportSection& s, std::string name, std::string measured) {
  s.items.push_back({std::move(name), std::nullopt, std::move(measured), {}});
}

}  // namespace hecke::app
