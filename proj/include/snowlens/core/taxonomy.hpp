#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace snowlens {

inline constexpr int kNumClasses = 6;

// Canonical class indices. The order is fixed: it defines confusion-matrix
// axes, palette slots and the on-disk mask encoding.
enum class ClassId : std::uint8_t {
  road = 0,
  pole_sign = 1,
  green = 2,
  snow = 3,
  sky = 4,
  background = 5,
};

constexpr std::uint8_t index_of(ClassId id) { return static_cast<std::uint8_t>(id); }

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  auto operator<=>(const Rgb&) const = default;
};

std::string to_string(Rgb color);

struct ClassInfo {
  int index;
  std::string_view name;
  Rgb color;
};

class ClassTaxonomy {
 public:
  static const ClassTaxonomy& canonical();

  // Parses the taxonomy file (JSON list of {index, name, color:[r,g,b]}).
  // Only the canonical six-class table is accepted.
  static ClassTaxonomy from_json(const nlohmann::json& doc);
  static ClassTaxonomy load(const std::filesystem::path& path);

  nlohmann::json to_json() const;
  void save(const std::filesystem::path& path) const;

  std::span<const ClassInfo> classes() const { return classes_; }
  const ClassInfo& at(int index) const;
  std::optional<int> index_of(Rgb color) const;
  std::optional<int> index_of(std::string_view name) const;

 private:
  ClassTaxonomy() = default;
  std::array<ClassInfo, kNumClasses> classes_{};
};

// Throws ValueError unless 0 <= cls < kNumClasses.
void check_class_index(int cls);

// Parses "snow,road" style lists (names or indices) into class indices.
std::vector<int> parse_class_list(std::string_view text);

}  // namespace snowlens
