#pragma once

// Umbrella header for the full simulation-and-evaluation pipeline.

#include "surveysim/agreement.hpp"
#include "surveysim/backend.hpp"
#include "surveysim/catalog.hpp"
#include "surveysim/coefficients.hpp"
#include "surveysim/collect.hpp"
#include "surveysim/countries.hpp"
#include "surveysim/design.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/experiments.hpp"
#include "surveysim/ols.hpp"
#include "surveysim/permutation.hpp"
#include "surveysim/persona.hpp"
#include "surveysim/prompt.hpp"
#include "surveysim/reference.hpp"
#include "surveysim/report.hpp"
#include "surveysim/rng.hpp"
#include "surveysim/scores.hpp"
#include "surveysim/sha256.hpp"
#include "surveysim/synthetic.hpp"
