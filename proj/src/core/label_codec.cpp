#include "snowlens/core/label_codec.hpp"

#include <png.h>

#include <array>
#include <string>

#include "snowlens/error.hpp"
#include "snowlens/io/image_io.hpp"

namespace snowlens {

std::vector<std::uint8_t> encode_label_mask(const LabelMap& label, const ClassTaxonomy& tax) {
  label.validate();
  std::array<std::uint8_t, kNumClasses * 3> palette{};
  for (const auto& c : tax.classes()) {
    palette[static_cast<std::size_t>(c.index) * 3 + 0] = c.color.r;
    palette[static_cast<std::size_t>(c.index) * 3 + 1] = c.color.g;
    palette[static_cast<std::size_t>(c.index) * 3 + 2] = c.color.b;
  }
  std::vector<std::uint8_t> indices(label.labels().begin(), label.labels().end());

  png_image desc{};
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(label.width());
  desc.height = static_cast<png_uint_32>(label.height());
  desc.format = PNG_FORMAT_RGB_COLORMAP;
  desc.colormap_entries = kNumClasses;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&desc, nullptr, &size, 0, indices.data(), 0, palette.data()))
    throw FormatError(std::string("mask encode failed: ") + desc.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, indices.data(), 0, palette.data()))
    throw FormatError(std::string("mask encode failed: ") + desc.message);
  out.resize(size);
  return out;
}

LabelMap decode_label_mask(std::span<const std::uint8_t> bytes, const ClassTaxonomy& tax) {
  if (!io::is_png(bytes)) throw FormatError("label mask is not a PNG file");
  const RgbImage rgb = io::decode_image(bytes);
  LabelMap out(rgb.height(), rgb.width());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const Rgb color{static_cast<std::uint8_t>(rgb.at(y, x, 0)),
                      static_cast<std::uint8_t>(rgb.at(y, x, 1)),
                      static_cast<std::uint8_t>(rgb.at(y, x, 2))};
      const auto cls = tax.index_of(color);
      if (!cls)
        throw FormatError("unknown label colour " + to_string(color) + " at pixel (x=" +
                          std::to_string(x) + ", y=" + std::to_string(y) + ")");
      out.at(y, x) = static_cast<std::uint8_t>(*cls);
    }
  }
  return out;
}

void write_label_mask(const std::filesystem::path& path, const LabelMap& label) {
  io::write_file(path, encode_label_mask(label));
}

LabelMap read_label_mask(const std::filesystem::path& path) {
  try {
    return decode_label_mask(io::read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace snowlens
