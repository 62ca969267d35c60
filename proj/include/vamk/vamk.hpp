#pragma once

#include "vamk/distance_transform.hpp"
#include "vamk/io.hpp"
#include "vamk/kinetostatics.hpp"
#include "vamk/linalg.hpp"
#include "vamk/mechanism.hpp"
#include "vamk/workspace.hpp"
