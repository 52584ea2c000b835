#ifndef MICROMORPHIC_MICROMORPHIC_HPP
#define MICROMORPHIC_MICROMORPHIC_HPP

#include "micromorphic/error.hpp"
#include "micromorphic/tensor.hpp"
#include "micromorphic/grid.hpp"
#include "micromorphic/constitutive.hpp"
#include "micromorphic/leapfrog.hpp"
#include "micromorphic/dynamics.hpp"
#include "micromorphic/dispersion.hpp"
#include "micromorphic/statics.hpp"
#include "micromorphic/reductions.hpp"
#include "micromorphic/identities.hpp"
#include "micromorphic/config.hpp"

#endif  // MICROMORPHIC_MICROMORPHIC_HPP
