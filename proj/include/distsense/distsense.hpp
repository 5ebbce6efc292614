#pragma once

#include "distsense/bounds.hpp"
#include "distsense/config.hpp"
#include "distsense/core.hpp"
#include "distsense/estimation.hpp"
#include "distsense/fisher.hpp"
#include "distsense/gaussian.hpp"
#include "distsense/nelder_mead.hpp"
#include "distsense/nongaussian.hpp"
#include "distsense/optimizer.hpp"
#include "distsense/schemes.hpp"
