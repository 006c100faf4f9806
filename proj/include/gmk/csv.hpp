#pragma once

#include <iosfwd>
#include <string>

#include "gmk/estimate.hpp"
#include "gmk/forecast.hpp"
#include "gmk/simulate.hpp"

namespace gmk {

/// Parse `time,x1,...,xm` CSV; times strictly increasing and positive,
/// dimension inferred from the header.
SampleSet parse_csv(std::istream& in, const std::string& name = "<stream>");
SampleSet parse_csv_file(const std::string& path);

/// Render a double with 17 significant digits (round-trip exact).
std::string render_double(double v);

/// `time,mean_*,sd_*,lo_*,hi_*` rows for a forecast; dim gives the column
/// count (the forecast may be empty).
void write_forecast_csv(std::ostream& out, const Forecast& forecast, int dim);

/// Long-format `path_id,time,x1..xm` rows for a path batch.
void write_batch_csv(std::ostream& out, const PathBatch& batch);

} // namespace gmk
