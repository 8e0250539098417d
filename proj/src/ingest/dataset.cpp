#include "snowlens/ingest/dataset.hpp"

#include <algorithm>
#include <set>

#include "snowlens/core/label_codec.hpp"
#include "snowlens/io/image_io.hpp"

namespace snowlens::ingest {

namespace fs = std::filesystem;

namespace {

bool accepted_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

void check_pairing(const std::map<std::string, fs::path>& a, const std::map<std::string, fs::path>& b,
                   const std::string& a_name, const std::string& b_name) {
  std::vector<std::string> orphans;
  for (const auto& [id, path] : a)
    if (!b.contains(id)) orphans.push_back(a_name + "/" + id);
  for (const auto& [id, path] : b)
    if (!a.contains(id)) orphans.push_back(b_name + "/" + id);
  if (!orphans.empty()) throw FormatError("unmatched files (orphan ids): " + join_ids(orphans));
}

}  // namespace

std::map<std::string, fs::path> list_images(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("missing directory " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !accepted_extension(entry.path())) continue;
    const std::string id = entry.path().stem().string();
    if (out.contains(id)) throw FormatError("duplicate image id '" + id + "' in " + dir.string());
    out.emplace(id, entry.path());
  }
  return out;
}

std::vector<PairedSample> load_paired_dataset(const fs::path& root, const PairedLayout& layout) {
  const auto cond = list_images(root / layout.condition_dir);
  const auto target = list_images(root / layout.target_dir);
  check_pairing(cond, target, layout.condition_dir, layout.target_dir);
  std::vector<PairedSample> samples;
  samples.reserve(cond.size());
  for (const auto& [id, path] : cond) {
    PairedSample s{id, io::read_image(path), io::read_image(target.at(id))};
    if (s.condition.height() != s.target.height() || s.condition.width() != s.target.width()) {
      throw DimensionError("pair '" + id + "' has mismatched frame sizes " +
                           std::to_string(s.condition.height()) + "x" +
                           std::to_string(s.condition.width()) + " vs " +
                           std::to_string(s.target.height()) + "x" +
                           std::to_string(s.target.width()));
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<AnnotatedSample> load_annotated_dataset(const fs::path& root) {
  const auto images = list_images(root / "images");
  const auto masks = list_images(root / "masks");
  check_pairing(images, masks, "images", "masks");
  std::vector<AnnotatedSample> samples;
  samples.reserve(images.size());
  for (const auto& [id, path] : images) {
    AnnotatedSample s{id, io::read_image(path), read_label_mask(masks.at(id))};
    require_same_dims(s.image, s.label, ("annotated sample '" + id + "'").c_str());
    samples.push_back(std::move(s));
  }
  return samples;
}

std::size_t train_count(std::size_t n, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ValueError("train_fraction must lie strictly between 0 and 1");
  return static_cast<std::size_t>(std::floor(train_fraction * double(n) + 0.5));
}

std::vector<std::size_t> split_permutation(std::size_t n, const SplitSpec& spec) {
  if (n == 0) throw ValueError("cannot split an empty sample list");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

nlohmann::json build_manifest(const fs::path& root, DatasetKind kind, const SplitSpec& spec,
                              const PairedLayout& layout) {
  std::vector<std::pair<std::string, std::string>> dirs;
  if (kind == DatasetKind::paired) {
    dirs = {{"condition", layout.condition_dir}, {"target", layout.target_dir}};
    load_paired_dataset(root, layout);  // validates pairing and dimensions
  } else {
    dirs = {{"image", "images"}, {"mask", "masks"}};
    load_annotated_dataset(root);
  }
  const auto first = list_images(root / dirs[0].second);
  const auto second = list_images(root / dirs[1].second);

  std::vector<std::string> ids;
  for (const auto& [id, path] : first) ids.push_back(id);
  const auto order = split_permutation(ids.size(), spec);
  const std::size_t n_train = train_count(ids.size(), spec.train_fraction);
  std::vector<std::string> tag(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) tag[order[i]] = i < n_train ? "train" : "test";

  nlohmann::json samples = nlohmann::json::array();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& id = ids[i];
    nlohmann::json files = nlohmann::json::object();
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& [role, dir] : dirs) {
      const fs::path p = (role == dirs[0].first ? first : second).at(id);
      files[role] = fs::relative(p, root).generic_string();
      hashes[role] = io::sha256_file(p);
    }
    samples.push_back({{"id", id}, {"split", tag[i]}, {"files", files}, {"sha256", hashes}});
  }
  return {{"kind", kind == DatasetKind::paired ? "paired" : "annotated"},
          {"seed", spec.seed},
          {"split", {{"train_fraction", spec.train_fraction},
                     {"test_fraction", 1.0 - spec.train_fraction},
                     {"train_count", n_train},
                     {"test_count", ids.size() - n_train}}},
          {"samples", samples}};
}

void verify_manifest(const nlohmann::json& manifest, const fs::path& root) {
  std::set<std::string> seen;
  for (const auto& s : manifest.at("samples")) {
    const std::string id = s.at("id").get<std::string>();
    if (!seen.insert(id).second) throw FormatError("manifest lists id '" + id + "' twice");
    const std::string tag = s.at("split").get<std::string>();
    if (tag != "train" && tag != "test") throw FormatError("bad split tag for '" + id + "'");
    for (const auto& [role, rel] : s.at("files").items()) {
      const std::string expect = s.at("sha256").at(role).get<std::string>();
      if (io::sha256_file(root / rel.get<std::string>()) != expect)
        throw FormatError("content hash mismatch for " + rel.get<std::string>());
    }
  }
}

}  // namespace snowlens::ingest
