#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace snowlens::translator {

// U maps night to day; T maps snowy day to the snow-free road surface.
enum class Role { U, T };
enum class GanMode { bce, lsgan };

std::string_view role_name(Role r);
Role parse_role(std::string_view s);

struct TranslatorConfig {
  std::string preset = "desk";
  Role role = Role::U;
  int height = 128;
  int width = 192;
  int depth = 6;            // U-Net down/up levels; each side must divide by 2^depth
  int gen_channels = 16;    // first-level generator width
  int disc_channels = 16;   // first-level discriminator width
  int disc_layers = 3;      // strided discriminator layers
  double lambda_l1 = 100.0;
  double lr = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double init_std = 0.02;
  int batch_size = 1;
  int epochs = 20;
  int max_iterations = 0;   // > 0 stops after this many optimizer steps
  int checkpoint_every = 5; // epochs between trail checkpoints
  GanMode gan_mode = GanMode::bce;
  std::uint64_t seed = 0;

  // Throws ValueError on inconsistent settings.
  void validate() const;
  nlohmann::json to_json() const;
  // Missing keys keep the values already in `base`.
  static TranslatorConfig from_json(const nlohmann::json& j, TranslatorConfig base);
  static TranslatorConfig from_json(const nlohmann::json& j);
};

// "desk": 128x192, 6 levels, 16 channels. "paper": 512x768, 8 levels, 64 channels.
TranslatorConfig translator_preset(std::string_view name, Role role = Role::U);

}  // namespace snowlens::translator
