#include "snowlens/cli/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>

namespace snowlens::cli {

namespace {

using nlohmann::json;

OptionSpec text(std::string name, std::string help, json def = nullptr, bool required = false,
                std::vector<std::string> choices = {}) {
  return {std::move(name), OptKind::text, std::move(def), std::move(help), required, std::move(choices)};
}
OptionSpec integer(std::string name, std::string help, json def = nullptr) {
  return {std::move(name), OptKind::integer, std::move(def), std::move(help), false, {}};
}
OptionSpec real(std::string name, std::string help, json def = nullptr) {
  return {std::move(name), OptKind::real, std::move(def), std::move(help), false, {}};
}
OptionSpec flag(std::string name, std::string help) {
  return {std::move(name), OptKind::flag, false, std::move(help), false, {}};
}

OptionSpec config_opt() { return text("config", "JSON settings file"); }
OptionSpec seed_opt() { return integer("seed", "base random seed", 0); }
OptionSpec out_opt(bool required = true) {
  return text("out", "output directory", nullptr, required);
}
OptionSpec preset_opt() { return text("preset", "model scale preset", "desk", false, {"desk", "paper"}); }

std::vector<CommandSpec> build_specs() {
  std::vector<CommandSpec> s;
  s.push_back({"synth",
               "generate a synthetic paired-scene dataset",
               {config_opt(), seed_opt(), out_opt(), integer("n", "number of scenes", 64),
                integer("height", "frame height", 192), integer("width", "frame width", 288),
                real("night-gain", "night brightness multiplier", 0.35),
                real("noise-sigma", "night noise standard deviation (byte units)", 4.0)}});
  std::vector<OptionSpec> dataset_opts = {
      config_opt(), seed_opt(), out_opt(),
      text("root", "dataset root", nullptr, true),
      text("kind", "dataset layout", "paired", false, {"paired", "annotated"}),
      text("condition-dir", "condition subdirectory (paired)", "night"),
      text("target-dir", "target subdirectory (paired)", "day"),
      real("train-fraction", "training share of the split", 0.9)};
  auto ingest_opts = dataset_opts;
  ingest_opts.push_back(flag("unify", "write resized copies under --out and index those"));
  ingest_opts.push_back(integer("height", "unified height (paired 480, annotated 598)"));
  ingest_opts.push_back(integer("width", "unified width (paired 720, annotated 1196)"));
  s.push_back({"ingest", "validate a dataset and write its manifest", ingest_opts});
  s.push_back({"split", "seeded train/test split of a dataset", dataset_opts});
  s.push_back({"train-translate",
               "train a translator (role U: night->day, role T: snowy day->road surface)",
               {config_opt(), seed_opt(), out_opt(), preset_opt(),
                text("data", "paired dataset root", nullptr, true),
                text("role", "translator role", "U", false, {"U", "T"}),
                text("condition-dir", "condition subdirectory (default by role)"),
                text("target-dir", "target subdirectory (default by role)"),
                text("split", "split.json; only its train ids are used"),
                integer("epochs", "training epochs"),
                integer("iterations", "optimizer steps (overrides epochs when > 0)"),
                integer("batch-size", "batch size"), real("lr", "learning rate"),
                real("lambda", "L1 weight"),
                text("gan-mode", "adversarial criterion", nullptr, false, {"bce", "lsgan"}),
                integer("checkpoint-every", "epochs between trail checkpoints"),
                integer("height", "model input height"), integer("width", "model input width"),
                text("resume", "checkpoint to resume from")}});
  s.push_back({"train-segment",
               "train the six-class segmenter on an annotated dataset",
               {config_opt(), seed_opt(), out_opt(), preset_opt(),
                text("data", "annotated dataset root (images/, masks/)", nullptr, true),
                text("split", "split.json; only its train ids are used"),
                integer("epochs", "training epochs"), integer("batch-size", "batch size"),
                real("lr", "learning rate"),
                integer("checkpoint-every", "epochs between trail checkpoints"),
                flag("class-weighting", "inverse-frequency class weights"),
                text("resume", "checkpoint to resume from"),
                text("backbone-init", "segmenter checkpoint providing backbone weights")}});
  s.push_back({"translate",
               "run a translator on an image or a directory of images",
               {config_opt(), seed_opt(), out_opt(),
                text("model", "translator checkpoint", nullptr, true),
                text("input", "image file or directory", nullptr, true),
                flag("restore-size", "resample outputs back to the input size")}});
  s.push_back({"segment",
               "label an image or a directory of images",
               {config_opt(), seed_opt(), out_opt(),
                text("model", "segmenter checkpoint", nullptr, true),
                text("input", "image file or directory", nullptr, true),
                flag("overlay", "also write colour overlays under overlays/")}});
  s.push_back({"eval-seg",
               "segmentation metrics of predicted against ground-truth label masks",
               {config_opt(), seed_opt(), out_opt(),
                text("pred", "predicted label directory", nullptr, true),
                text("gt", "ground-truth label directory", nullptr, true),
                text("f1", "F1 averaging", "macro", false, {"macro", "micro"})}});
  s.push_back({"eval-dice",
               "per-image Dice between real-day and fake-day labels",
               {config_opt(), seed_opt(), out_opt(),
                text("real-labels", "labels of the real day frames", nullptr, true),
                text("fake-labels", "labels of the fake day frames", nullptr, true),
                text("roi", "region-of-interest classes", "snow")}});
  std::vector<OptionSpec> hazard_opts = {
      config_opt(), seed_opt(), out_opt(false),
      text("image", "input frame", nullptr, true),
      text("t", "road-surface translator checkpoint", nullptr, true),
      text("s", "segmenter checkpoint", nullptr, true)};
  s.push_back({"hazard", "snow-hazard index of a daytime frame", hazard_opts});
  auto night_opts = hazard_opts;
  night_opts.push_back(text("u", "night-to-day translator checkpoint", nullptr, true));
  s.push_back({"hazard-night", "snow-hazard index of a night frame via its fake day", night_opts});
  s.push_back({"report",
               "montage and Dice bar plot",
               {config_opt(), seed_opt(), out_opt(),
                text("images", "directory of equally sized images for the montage"),
                integer("rows", "montage rows", 4), integer("cols", "montage columns", 4),
                text("dice-report", "dice.json written by eval-dice")}});
  return s;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

bool parse_bool(const std::string& raw, bool& out) {
  std::string v;
  for (char c : raw) v.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return out = true, true;
  if (v == "0" || v == "false" || v == "no" || v == "off" || v.empty()) return out = false, true;
  return false;
}

json convert_string(const OptionSpec& opt, const std::string& raw, const std::string& origin) {
  auto bad = [&]() {
    return UsageError(origin + ": invalid value '" + raw + "' for --" + opt.name);
  };
  switch (opt.kind) {
    case OptKind::text:
      return raw;
    case OptKind::integer: {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(raw, &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != raw.size()) throw bad();
      return static_cast<std::int64_t>(v);
    }
    case OptKind::real: {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(raw, &used);
      } catch (const std::exception&) {
        throw bad();
      }
      if (used != raw.size()) throw bad();
      return v;
    }
    case OptKind::flag: {
      bool b = false;
      if (!parse_bool(raw, b)) throw bad();
      return b;
    }
  }
  throw bad();
}

json convert_json(const OptionSpec& opt, const json& v, const std::string& origin) {
  if (v.is_null()) return v;
  if (v.is_string()) return convert_string(opt, v.get<std::string>(), origin);
  switch (opt.kind) {
    case OptKind::text:
      if (v.is_number() || v.is_boolean()) return v.dump();
      break;
    case OptKind::integer:
      if (v.is_number_integer()) return v.get<std::int64_t>();
      if (v.is_number_float() && v.get<double>() == static_cast<double>(static_cast<std::int64_t>(v.get<double>())))
        return static_cast<std::int64_t>(v.get<double>());
      break;
    case OptKind::real:
      if (v.is_number()) return v.get<double>();
      break;
    case OptKind::flag:
      if (v.is_boolean()) return v.get<bool>();
      break;
  }
  throw UsageError(origin + ": invalid value " + v.dump() + " for --" + opt.name);
}

json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw UsageError("config file " + path + " must hold a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
}

}  // namespace

const OptionSpec* CommandSpec::find(std::string_view option) const {
  for (const auto& o : options)
    if (o.name == option) return &o;
  return nullptr;
}

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = build_specs();
  return specs;
}

const CommandSpec& command_spec(std::string_view name) {
  for (const auto& s : command_specs())
    if (s.name == name) return s;
  throw UsageError("unknown command '" + std::string(name) + "'");
}

std::optional<std::string> process_env(const std::string& name) {
  if (const char* v = std::getenv(name.c_str())) return std::string(v);
  return std::nullopt;
}

std::string env_name(std::string_view option) {
  std::string s = "SNOWLENS_";
  for (char c : option) s.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return s;
}

bool RunConfig::has(const std::string& name) const {
  auto it = values.find(name);
  return it != values.end() && !it->is_null();
}

std::string RunConfig::text(const std::string& name) const {
  if (!has(name)) throw UsageError("missing required option --" + name);
  return values.at(name).get<std::string>();
}

std::int64_t RunConfig::integer(const std::string& name) const {
  if (!has(name)) throw UsageError("missing required option --" + name);
  return values.at(name).get<std::int64_t>();
}

double RunConfig::real(const std::string& name) const {
  if (!has(name)) throw UsageError("missing required option --" + name);
  return values.at(name).get<double>();
}

bool RunConfig::flag(const std::string& name) const {
  return has(name) && values.at(name).get<bool>();
}

std::uint64_t RunConfig::seed() const {
  const auto s = integer("seed");
  if (s < 0) throw UsageError("--seed must be non-negative");
  return static_cast<std::uint64_t>(s);
}

nlohmann::json RunConfig::snapshot() const {
  json settings = values;
  settings.erase("out");
  json src = json::object();
  for (const auto& [k, v] : sources)
    if (k != "out") src[k] = v;
  return {{"command", command}, {"settings", settings}, {"sources", src}};
}

RunConfig resolve_config(const CommandSpec& spec, const std::map<std::string, std::string>& flags,
                         const EnvLookup& env) {
  for (const auto& [k, v] : flags)
    if (!spec.find(k)) throw UsageError("unknown option --" + k + " for " + spec.name);

  RunConfig rc;
  rc.command = spec.name;
  for (const auto& o : spec.options) {
    rc.values[o.name] = o.default_value;
    rc.sources[o.name] = "default";
  }

  std::optional<std::string> config_path;
  if (auto it = flags.find("config"); it != flags.end())
    config_path = it->second;
  else if (auto e = env(env_name("config")))
    config_path = *e;

  if (config_path && !config_path->empty()) {
    const json file = load_config_file(*config_path);
    auto apply = [&](const json& obj, bool strict) {
      for (const auto& [raw_key, v] : obj.items()) {
        const std::string key = normalize_key(raw_key);
        const OptionSpec* o = spec.find(key);
        if (!o) {
          if (strict) throw UsageError("config file: unknown setting '" + raw_key + "' for " + spec.name);
          continue;
        }
        if (key == "config") continue;
        if (v.is_object()) continue;
        rc.values[key] = convert_json(*o, v, "config file");
        rc.sources[key] = "file";
      }
    };
    json top = json::object();
    for (const auto& [k, v] : file.items())
      if (!v.is_object()) top[k] = v;
    apply(top, false);
    if (auto it = file.find(spec.name); it != file.end()) {
      if (!it->is_object()) throw UsageError("config file: section '" + spec.name + "' must be an object");
      apply(*it, true);
    }
    rc.values["config"] = *config_path;
    rc.sources["config"] = flags.count("config") ? "flag" : "env";
  }

  for (const auto& o : spec.options) {
    if (o.name == "config") continue;
    if (auto e = env(env_name(o.name))) {
      rc.values[o.name] = convert_string(o, *e, "environment " + env_name(o.name));
      rc.sources[o.name] = "env";
    }
  }

  for (const auto& [k, v] : flags) {
    if (k == "config") continue;
    rc.values[k] = convert_string(*spec.find(k), v, "command line");
    rc.sources[k] = "flag";
  }

  for (const auto& o : spec.options) {
    if (o.required && !rc.has(o.name)) throw UsageError("missing required option --" + o.name);
    if (!o.choices.empty() && rc.has(o.name)) {
      const auto v = rc.values[o.name].get<std::string>();
      if (std::find(o.choices.begin(), o.choices.end(), v) == o.choices.end()) {
        std::string allowed;
        for (const auto& c : o.choices) allowed += (allowed.empty() ? "" : ", ") + c;
        throw UsageError("--" + o.name + " must be one of: " + allowed);
      }
    }
  }
  return rc;
}

}  // namespace snowlens::cli
