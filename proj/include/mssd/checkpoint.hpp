#ifndef MSSD_CHECKPOINT_HPP
#define MSSD_CHECKPOINT_HPP

#include <string>
#include <vector>

#include "mssd/model.hpp"

namespace mssd {

/// One trained model per variable, channel independent.
struct Checkpoint {
    std::vector<MssdModel> models;
    std::vector<std::string> variable_names;
};

/// Writes configuration, normalization statistics and every parameter
/// tensor to a single file. Loading restores them bit-exactly.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);

Checkpoint load_checkpoint(const std::string& path);

} // namespace mssd

#endif // MSSD_CHECKPOINT_HPP
