#pragma once

// Everything in one include.

#include "locmin/blur_toy.hpp"
#include "locmin/config.hpp"
#include "locmin/csv.hpp"
#include "locmin/discovery.hpp"
#include "locmin/embedding.hpp"
#include "locmin/experiment.hpp"
#include "locmin/model.hpp"
#include "locmin/optics.hpp"
#include "locmin/optimizer.hpp"
#include "locmin/parallel.hpp"
#include "locmin/rng.hpp"
#include "locmin/roc.hpp"
#include "locmin/sinusoid.hpp"
#include "locmin/trials.hpp"
#include "locmin/types.hpp"
#include "locmin/validation.hpp"
