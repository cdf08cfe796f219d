#pragma once

#include <string_view>

namespace adtree {

/// Source text of the bundled CAV example document (`data/cav.adt`),
/// embedded at build time. The CLI resolves the pseudo-path `@cav` to it.
std::string_view cav_dataset_text();

}  // namespace adtree
