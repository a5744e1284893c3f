#ifndef RESIST_IDX_HPP
#define RESIST_IDX_HPP

#include <string>

#include "resist/objectives.hpp"

namespace resist {

// Big-endian IDX ingestion (magic 0x00000803 for images, 0x00000801 for
// labels). Images are flattened to rows*cols doubles scaled to [0, 1].
// Bad magic, truncation and image/label count mismatch raise distinct errors.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace resist

#endif
