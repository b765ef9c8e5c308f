#pragma once

#include "boundary.hpp"
#include "error.hpp"
#include "fem.hpp"
#include "geometry.hpp"
#include "mesh.hpp"
#include "quadrature.hpp"
#include "sparse.hpp"
#include "study.hpp"
#include "vtk.hpp"
