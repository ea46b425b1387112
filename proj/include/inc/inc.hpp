#pragma once

#include "inc/binio.hpp"
#include "inc/buffer.hpp"
#include "inc/dataio.hpp"
#include "inc/dimest.hpp"
#include "inc/errors.hpp"
#include "inc/fft.hpp"
#include "inc/graph.hpp"
#include "inc/metrics.hpp"
#include "inc/model.hpp"
#include "inc/radam.hpp"
#include "inc/rng.hpp"
#include "inc/sketch.hpp"
#include "inc/tensor.hpp"
#include "inc/trainer.hpp"
