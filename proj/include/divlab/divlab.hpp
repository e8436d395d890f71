#pragma once

#include "common.hpp"
#include "generators.hpp"
#include "divergence.hpp"
#include "pinsker.hpp"
#include "chi2bounds.hpp"
#include "bregman.hpp"
#include "markov.hpp"
#include "contraction.hpp"
#include "quantum.hpp"
#include "io.hpp"
