#include "snowlens/nn/checkpoint.hpp"

#include <cstring>

#include "snowlens/io/image_io.hpp"

namespace snowlens::nn {

namespace {

constexpr char kMagic[8] = {'S', 'N', 'W', 'L', 'T', 'N', 'S', 'R'};
constexpr std::uint32_t kVersion = 1;

template <class V>
void append(std::vector<std::uint8_t>& out, V v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof(V));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  template <class V>
  V read() {
    V v;
    take(&v, sizeof(V));
    return v;
  }
  void take(void* dst, std::size_t n) {
    if (pos_ + n > b_.size()) throw FormatError("tensor archive truncated");
    std::memcpy(dst, b_.data() + pos_, n);
    pos_ += n;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

void TensorArchive::put(const std::string& name, const Tensor<float>& t) { entries_[name] = t; }

const Tensor<float>& TensorArchive::get(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw FormatError("checkpoint has no tensor '" + name + "'");
  return it->second;
}

void TensorArchive::restore(const std::string& name, Tensor<float>& dst) const {
  const auto& src = get(name);
  if (!src.same_shape(dst))
    throw DimensionError("checkpoint tensor '" + name + "' has shape " + src.shape_str() +
                         ", model expects " + dst.shape_str());
  dst.data = src.data;
}

std::vector<std::string> TensorArchive::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

std::vector<std::uint8_t> TensorArchive::serialize() const {
  std::vector<std::uint8_t> out(kMagic, kMagic + sizeof(kMagic));
  append(out, kVersion);
  append(out, static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [name, t] : entries_) {
    append(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    for (int d : {t.n, t.c, t.h, t.w}) append(out, static_cast<std::int32_t>(d));
    const auto* p = reinterpret_cast<const std::uint8_t*>(t.data.data());
    out.insert(out.end(), p, p + t.data.size() * sizeof(float));
  }
  return out;
}

TensorArchive TensorArchive::parse(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[8];
  r.take(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw FormatError("not a tensor archive");
  if (r.read<std::uint32_t>() != kVersion) throw FormatError("unsupported tensor archive version");
  const auto count = r.read<std::uint32_t>();
  TensorArchive ar;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.read<std::uint32_t>();
    std::string name(len, '\0');
    r.take(name.data(), len);
    int dims[4];
    for (int& d : dims) {
      d = r.read<std::int32_t>();
      if (d < 0) throw FormatError("negative tensor dimension in archive");
    }
    Tensor<float> t(dims[0], dims[1], dims[2], dims[3]);
    r.take(t.data.data(), t.data.size() * sizeof(float));
    ar.entries_[name] = std::move(t);
  }
  if (!r.done()) throw FormatError("trailing bytes in tensor archive");
  return ar;
}

nlohmann::json CheckpointManifest::to_json() const {
  return {{"role_tag", role_tag},         {"config", config},
          {"epoch", epoch},               {"optimizer_steps", optimizer_steps},
          {"loss_curve", loss_curve},     {"seed", seed},
          {"content_hash", content_hash}};
}

CheckpointManifest CheckpointManifest::from_json(const nlohmann::json& j) {
  try {
    CheckpointManifest m;
    m.role_tag = j.at("role_tag").get<std::string>();
    m.config = j.at("config");
    m.epoch = j.at("epoch").get<int>();
    m.optimizer_steps = j.value("optimizer_steps", std::int64_t{0});
    m.loss_curve = j.value("loss_curve", nlohmann::json::array());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.content_hash = j.at("content_hash").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

std::filesystem::path checkpoint_stem(const std::filesystem::path& path) {
  auto p = path;
  if (p.extension() == ".json" || p.extension() == ".bin") p.replace_extension();
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const TensorArchive& archive,
                     CheckpointManifest& manifest) {
  const auto stem = checkpoint_stem(path);
  const auto payload = archive.serialize();
  manifest.content_hash = io::sha256_hex(payload);
  io::write_file(stem.string() + ".bin", payload);
  io::write_text(stem.string() + ".json", manifest.to_json().dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const auto stem = checkpoint_stem(path);
  const auto json_bytes = io::read_file(stem.string() + ".json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_bytes.begin(), json_bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint manifest " + stem.string() + ".json: " + e.what());
  }
  LoadedCheckpoint out;
  out.manifest = CheckpointManifest::from_json(j);
  const auto payload = io::read_file(stem.string() + ".bin");
  if (io::sha256_hex(payload) != out.manifest.content_hash)
    throw FormatError("checkpoint payload hash mismatch for " + stem.string());
  out.archive = TensorArchive::parse(payload);
  return out;
}

void archive_params(TensorArchive& ar, const std::vector<Param<float>*>& params) {
  for (const auto* p : params) ar.put(p->name, p->value);
}

void restore_params(const TensorArchive& ar, const std::vector<Param<float>*>& params) {
  for (auto* p : params) ar.restore(p->name, p->value);
}

void archive_buffers(TensorArchive& ar, const std::vector<Buffer<float>>& buffers) {
  for (const auto& b : buffers) ar.put(b.name, *b.tensor);
}

void restore_buffers(const TensorArchive& ar, const std::vector<Buffer<float>>& buffers) {
  for (const auto& b : buffers) ar.restore(b.name, *b.tensor);
}

void archive_adam(TensorArchive& ar, const std::string& prefix, Adam<float>& opt) {
  const auto& params = opt.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    ar.put(prefix + ".m/" + params[i]->name, opt.first_moments()[i]);
    ar.put(prefix + ".v/" + params[i]->name, opt.second_moments()[i]);
  }
}

void restore_adam(const TensorArchive& ar, const std::string& prefix, Adam<float>& opt) {
  const auto& params = opt.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    ar.restore(prefix + ".m/" + params[i]->name, opt.first_moments()[i]);
    ar.restore(prefix + ".v/" + params[i]->name, opt.second_moments()[i]);
  }
}

}  // namespace snowlens::nn
