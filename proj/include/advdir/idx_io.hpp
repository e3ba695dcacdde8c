#pragma once

#include <string>

#include "advdir/dataset.hpp"

namespace advdir {

// Read an IDX image/label file pair (the MNIST container format: big-endian
// magic 0x00000803 for u8 image tensors, 0x00000801 for u8 label vectors).
// Pixels are scaled to [0,1] by /255; digit d becomes multiclass label d+1.
// Malformed input raises FormatError naming the byte offset.
LabeledDataset read_idx(const std::string& images_path,
                        const std::string& labels_path);

}  // namespace advdir
