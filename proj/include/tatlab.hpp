#pragma once

#include "tatlab/config.hpp"
#include "tatlab/csv.hpp"
#include "tatlab/decay_fit.hpp"
#include "tatlab/embedding.hpp"
#include "tatlab/errors.hpp"
#include "tatlab/fft.hpp"
#include "tatlab/geometry.hpp"
#include "tatlab/grid.hpp"
#include "tatlab/grid_io.hpp"
#include "tatlab/medium.hpp"
#include "tatlab/parallel.hpp"
#include "tatlab/raytrace.hpp"
#include "tatlab/reconstruct.hpp"
#include "tatlab/spectral_norms.hpp"
#include "tatlab/spectrum.hpp"
#include "tatlab/subspace.hpp"
#include "tatlab/svd.hpp"
#include "tatlab/wavesim.hpp"
