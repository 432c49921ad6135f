#ifndef MEMORYPORT_MEMORYPORT_HPP
#define MEMORYPORT_MEMORYPORT_HPP

#include "memoryport/core.hpp"
#include "memoryport/dynamics.hpp"
#include "memoryport/shaping.hpp"
#include "memoryport/channel.hpp"
#include "memoryport/gaussian.hpp"
#include "memoryport/spatial.hpp"

#endif  // MEMORYPORT_MEMORYPORT_HPP
