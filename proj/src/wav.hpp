#pragma once

#include <filesystem>

#include "sknaflow/ingest.hpp"

namespace sknaflow::detail {

Recording read_wav(const std::filesystem::path& path, double scale);

}  // namespace sknaflow::detail
