#ifndef GIBBSTV_GIBBSTV_HPP
#define GIBBSTV_GIBBSTV_HPP

#include "gibbstv/geometry.hpp"
#include "gibbstv/model.hpp"
#include "gibbstv/stein.hpp"
#include "gibbstv/sbdp.hpp"
#include "gibbstv/bounds.hpp"
#include "gibbstv/discretize.hpp"
#include "gibbstv/statistics.hpp"
#include "gibbstv/harness.hpp"
#include "gibbstv/io.hpp"

#endif
