#include "snowlens/core/taxonomy.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "snowlens/error.hpp"

namespace snowlens {

namespace {

constexpr std::array<ClassInfo, kNumClasses> kCanonical{{
    {0, "road", {128, 64, 128}},
    {1, "pole-sign", {220, 220, 0}},
    {2, "green", {107, 142, 35}},
    {3, "snow", {255, 255, 255}},
    {4, "sky", {70, 130, 180}},
    {5, "background", {0, 0, 0}},
}};

}  // namespace

std::string to_string(Rgb color) {
  std::ostringstream out;
  out << "(" << int(color.r) << "," << int(color.g) << "," << int(color.b) << ")";
  return out.str();
}

const ClassTaxonomy& ClassTaxonomy::canonical() {
  static const ClassTaxonomy tax = [] {
    ClassTaxonomy t;
    t.classes_ = kCanonical;
    return t;
  }();
  return tax;
}

ClassTaxonomy ClassTaxonomy::from_json(const nlohmann::json& doc) {
  if (!doc.is_array() || doc.size() != kNumClasses)
    throw FormatError("taxonomy must be a JSON list of 6 classes");
  const auto& canon = canonical();
  for (const auto& entry : doc) {
    try {
      const int index = entry.at("index").get<int>();
      check_class_index(index);
      const auto name = entry.at("name").get<std::string>();
      const auto color = entry.at("color").get<std::array<int, 3>>();
      const ClassInfo& expect = canon.at(index);
      if (name != expect.name || color[0] != expect.color.r ||
          color[1] != expect.color.g || color[2] != expect.color.b) {
        throw FormatError("taxonomy entry " + std::to_string(index) +
                          " differs from the canonical table");
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed taxonomy entry: ") + e.what());
    }
  }
  return canon;
}

ClassTaxonomy ClassTaxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open taxonomy file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("taxonomy file " + path.string() + ": " + e.what());
  }
  return from_json(doc);
}

nlohmann::json ClassTaxonomy::to_json() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& c : classes_) {
    doc.push_back({{"index", c.index},
                   {"name", std::string(c.name)},
                   {"color", {c.color.r, c.color.g, c.color.b}}});
  }
  return doc;
}

void ClassTaxonomy::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write taxonomy file " + path.string());
  out << to_json().dump(2) << "\n";
}

const ClassInfo& ClassTaxonomy::at(int index) const {
  check_class_index(index);
  return classes_[static_cast<std::size_t>(index)];
}

std::optional<int> ClassTaxonomy::index_of(Rgb color) const {
  for (const auto& c : classes_)
    if (c.color == color) return c.index;
  return std::nullopt;
}

std::optional<int> ClassTaxonomy::index_of(std::string_view name) const {
  for (const auto& c : classes_)
    if (c.name == name) return c.index;
  return std::nullopt;
}

void check_class_index(int cls) {
  if (cls < 0 || cls >= kNumClasses)
    throw ValueError("class index out of range 0..5: " + std::to_string(cls));
}

std::vector<int> parse_class_list(std::string_view text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view token =
        text.substr(start, comma == std::string_view::npos ? text.size() - start : comma - start);
    if (!token.empty()) {
      if (auto idx = ClassTaxonomy::canonical().index_of(token)) {
        out.push_back(*idx);
      } else {
        int value = -1;
        try {
          value = std::stoi(std::string(token));
        } catch (const std::exception&) {
          throw ValueError("unknown class name: " + std::string(token));
        }
        check_class_index(value);
        out.push_back(value);
      }
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace snowlens
