// gawq.hpp — Umbrella header.

#pragma once

#include "gawq/configs.hpp"
#include "gawq/disorder.hpp"
#include "gawq/experiments.hpp"
#include "gawq/figures.hpp"
#include "gawq/io.hpp"
#include "gawq/kernel.hpp"
#include "gawq/lindblad.hpp"
#include "gawq/model.hpp"
#include "gawq/rk45.hpp"
#include "gawq/runconfig.hpp"
#include "gawq/spectral.hpp"
#include "gawq/version.hpp"
