#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "snowlens/core/raster.hpp"
#include "snowlens/core/taxonomy.hpp"

namespace snowlens {

// Indexed-palette PNG, 8-bit, palette slot i = colour of class i. Lossless.
std::vector<std::uint8_t> encode_label_mask(const LabelMap& label,
                                            const ClassTaxonomy& tax = ClassTaxonomy::canonical());

// Accepts the palette PNGs written above and plain RGB PNGs whose colours all
// belong to the taxonomy. Unknown colours raise FormatError naming the RGB
// value and the pixel location; corrupt data raises FormatError.
LabelMap decode_label_mask(std::span<const std::uint8_t> bytes,
                           const ClassTaxonomy& tax = ClassTaxonomy::canonical());

void write_label_mask(const std::filesystem::path& path, const LabelMap& label);
LabelMap read_label_mask(const std::filesystem::path& path);

}  // namespace snowlens
