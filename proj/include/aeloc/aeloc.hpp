#pragma once

// Convenience header pulling in the whole library.

#include "aeloc/error.hpp"
#include "aeloc/io/text.hpp"

#include "aeloc/signal/butterworth.hpp"
#include "aeloc/signal/correlation.hpp"
#include "aeloc/signal/delay.hpp"
#include "aeloc/signal/waveform.hpp"
#include "aeloc/signal/waveform_io.hpp"

#include "aeloc/grnn/database_io.hpp"
#include "aeloc/grnn/grnn.hpp"

#include "aeloc/calibration/band_sweep.hpp"
#include "aeloc/calibration/line_fit.hpp"
#include "aeloc/calibration/report.hpp"

#include "aeloc/simulator/config.hpp"
#include "aeloc/simulator/experiment.hpp"
#include "aeloc/simulator/propagate.hpp"
#include "aeloc/simulator/source.hpp"
#include "aeloc/simulator/specimen.hpp"

#include "aeloc/pipeline/commands.hpp"
#include "aeloc/pipeline/evaluation.hpp"
#include "aeloc/pipeline/locator.hpp"
#include "aeloc/pipeline/svg.hpp"
