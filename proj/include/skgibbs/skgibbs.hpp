#ifndef SKGIBBS_SKGIBBS_HPP
#define SKGIBBS_SKGIBBS_HPP

#include "skgibbs/cascades.hpp"
#include "skgibbs/curie_weiss.hpp"
#include "skgibbs/finite_n.hpp"
#include "skgibbs/numeric.hpp"
#include "skgibbs/one_rsb.hpp"
#include "skgibbs/parallel.hpp"
#include "skgibbs/params.hpp"
#include "skgibbs/quadrature.hpp"
#include "skgibbs/random.hpp"
#include "skgibbs/rs.hpp"

#endif  // SKGIBBS_SKGIBBS_HPP
