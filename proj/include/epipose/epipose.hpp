#pragma once

// Umbrella header for the full toolkit.

#include "epipose/descriptor.hpp"
#include "epipose/eight_point.hpp"
#include "epipose/errors.hpp"
#include "epipose/essential.hpp"
#include "epipose/evaluation.hpp"
#include "epipose/fundamental.hpp"
#include "epipose/heatmap.hpp"
#include "epipose/irls.hpp"
#include "epipose/loss.hpp"
#include "epipose/metrics.hpp"
#include "epipose/pose_estimation.hpp"
#include "epipose/predictors.hpp"
#include "epipose/random.hpp"
#include "epipose/ransac.hpp"
#include "epipose/rotation.hpp"
#include "epipose/sampson.hpp"
#include "epipose/synthetic.hpp"
#include "epipose/trajectory.hpp"
#include "epipose/triangulation.hpp"
#include "epipose/types.hpp"
