#pragma once

#include "qftm/sampling.hpp"

namespace qftm::support {
using namespace qftm::sampling;
}
