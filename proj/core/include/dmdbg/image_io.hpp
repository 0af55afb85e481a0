#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dmdbg/imaging.hpp"

namespace dmdbg {

/// Natural ordering: digit runs compare by numeric value, everything else
/// case-insensitively. "in9" < "in10" < "in100".
bool natural_less(std::string_view a, std::string_view b);

/// Shell-style match supporting '*' and '?'.
bool glob_match(std::string_view pattern, std::string_view name);

/// Image files in a directory, naturally sorted. With an empty pattern every
/// .png/.jpg/.jpeg/.bmp file (any case) is taken.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& directory,
                                               std::string_view pattern = {});

/// Decodes to 8-bit RGB. Alpha is dropped, 16-bit samples are scaled down.
/// Grayscale images are replicated into three channels and, when warnings is
/// non-null, a message is appended there.
Frame read_image(const std::filesystem::path& file, std::vector<std::string>* warnings = nullptr);

FrameSequence load_sequence(const std::filesystem::path& directory, std::string_view pattern = {});

void write_png(const std::filesystem::path& file, const Frame& frame);

}  // namespace dmdbg
