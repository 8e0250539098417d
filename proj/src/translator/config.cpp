#include "snowlens/translator/config.hpp"

#include "snowlens/error.hpp"

namespace snowlens::translator {

std::string_view role_name(Role r) { return r == Role::U ? "U" : "T"; }

Role parse_role(std::string_view s) {
  if (s == "U" || s == "u") return Role::U;
  if (s == "T" || s == "t") return Role::T;
  throw ValueError("unknown translator role '" + std::string(s) + "' (expected U or T)");
}

void TranslatorConfig::validate() const {
  if (depth < 2) throw ValueError("translator depth must be at least 2");
  const int mult = 1 << depth;
  if (height <= 0 || width <= 0 || height % mult != 0 || width % mult != 0)
    throw ValueError("translator size " + std::to_string(height) + "x" + std::to_string(width) +
                     " must be a positive multiple of " + std::to_string(mult));
  if (gen_channels <= 0 || disc_channels <= 0 || disc_layers < 1)
    throw ValueError("translator channel counts must be positive");
  if (lambda_l1 < 0 || lr <= 0 || beta1 < 0 || beta1 >= 1 || beta2 < 0 || beta2 >= 1)
    throw ValueError("invalid translator optimizer settings");
  if (batch_size < 1 || epochs < 0 || max_iterations < 0 || checkpoint_every < 1)
    throw ValueError("invalid translator schedule settings");
}

nlohmann::json TranslatorConfig::to_json() const {
  return {{"preset", preset},
          {"role", std::string(role_name(role))},
          {"height", height},
          {"width", width},
          {"depth", depth},
          {"gen_channels", gen_channels},
          {"disc_channels", disc_channels},
          {"disc_layers", disc_layers},
          {"lambda_l1", lambda_l1},
          {"lr", lr},
          {"beta1", beta1},
          {"beta2", beta2},
          {"init_std", init_std},
          {"batch_size", batch_size},
          {"epochs", epochs},
          {"max_iterations", max_iterations},
          {"checkpoint_every", checkpoint_every},
          {"gan_mode", gan_mode == GanMode::bce ? "bce" : "lsgan"},
          {"seed", seed}};
}

TranslatorConfig TranslatorConfig::from_json(const nlohmann::json& j, TranslatorConfig c) {
  try {
    if (j.contains("preset")) c.preset = j["preset"].get<std::string>();
    if (j.contains("role")) c.role = parse_role(j["role"].get<std::string>());
    c.height = j.value("height", c.height);
    c.width = j.value("width", c.width);
    c.depth = j.value("depth", c.depth);
    c.gen_channels = j.value("gen_channels", c.gen_channels);
    c.disc_channels = j.value("disc_channels", c.disc_channels);
    c.disc_layers = j.value("disc_layers", c.disc_layers);
    c.lambda_l1 = j.value("lambda_l1", c.lambda_l1);
    c.lr = j.value("lr", c.lr);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.init_std = j.value("init_std", c.init_std);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.checkpoint_every = j.value("checkpoint_every", c.checkpoint_every);
    if (j.contains("gan_mode")) {
      const auto m = j["gan_mode"].get<std::string>();
      if (m == "bce") c.gan_mode = GanMode::bce;
      else if (m == "lsgan") c.gan_mode = GanMode::lsgan;
      else throw ValueError("unknown gan_mode '" + m + "'");
    }
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(std::string("translator config: ") + e.what());
  }
  c.validate();
  return c;
}

TranslatorConfig TranslatorConfig::from_json(const nlohmann::json& j) {
  return from_json(j, TranslatorConfig{});
}

TranslatorConfig translator_preset(std::string_view name, Role role) {
  TranslatorConfig c;
  c.role = role;
  if (name == "desk") {
    c.preset = "desk";
  } else if (name == "paper") {
    c.preset = "paper";
    c.height = 512;
    c.width = 768;
    c.depth = 8;
    c.gen_channels = 64;
    c.disc_channels = 64;
    c.epochs = 200;
    c.checkpoint_every = 10;
  } else {
    throw ValueError("unknown preset '" + std::string(name) + "' (expected desk or paper)");
  }
  return c;
}

}  // namespace snowlens::translator
