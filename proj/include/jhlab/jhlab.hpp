#pragma once

#include "counterexample.hpp"
#include "error.hpp"
#include "extremal.hpp"
#include "jh_space.hpp"
#include "matrix.hpp"
#include "scalar.hpp"
#include "sigma.hpp"
#include "tensor.hpp"
#include "tree.hpp"
