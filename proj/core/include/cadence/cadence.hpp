#pragma once

#include "cadence/adam.hpp"
#include "cadence/autoencoder.hpp"
#include "cadence/dataio.hpp"
#include "cadence/detector.hpp"
#include "cadence/error.hpp"
#include "cadence/eval.hpp"
#include "cadence/fileutil.hpp"
#include "cadence/experiment.hpp"
#include "cadence/kernels.hpp"
#include "cadence/loss.hpp"
#include "cadence/model_io.hpp"
#include "cadence/rng.hpp"
#include "cadence/synthetic.hpp"
#include "cadence/train.hpp"
#include "cadence/windowing.hpp"
