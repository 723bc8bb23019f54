#ifndef ENTLAB_NUMERICS_HPP
#define ENTLAB_NUMERICS_HPP

#include "entlab/numerics/bessel.hpp"
#include "entlab/numerics/eigensolver.hpp"
#include "entlab/numerics/linalg.hpp"
#include "entlab/numerics/roots.hpp"

#endif // ENTLAB_NUMERICS_HPP
