#pragma once

#include "salescast/fitting.hpp"
#include "salescast/model.hpp"
#include "salescast/series.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace salescast {

/**
 * Adaptation settings. Shared parameters (k, m, old deltas, seasonal
 * coefficients) are pulled toward the source values by a quadratic anchor;
 * the offset m is anchored at a tenth of the strength so the level can
 * follow the target. Fresh changepoints inside the adaptation window get a
 * plain ridge penalty instead of an anchor.
 */
struct AdaptConfig {
    int n_new_changepoints = 5;
    double lambda_anchor = 10.0;
    double lambda_delta = 1.0; // L2 penalty on the new rate adjustments
    bool adapt_seasonality = true;
    bool adapt_level = true;

    void validate() const;
};

/// A transfer or adaptation event; stored in the model lineage.
using TransferRecord = LineageEntry;

TransferRecord make_transfer_record(const std::string& source_entity,
                                    const std::string& target_entity, bool adapted,
                                    std::optional<DateRange> adapt_window = std::nullopt);

/// Applies the source model to target dates unchanged. Pure: bit-identical
/// to predict(source, dates) and never mutates the source.
Forecast zero_shot_forecast(const AdditiveModel& source, std::span<const Date> target_dates);

/// Copy of the source model reassigned to the target entity, with a
/// zero-shot TransferRecord appended to the lineage.
AdditiveModel transferred_copy(const AdditiveModel& source, const std::string& target_entity);

/**
 * Anchored re-fit on a target window. The timescale is extended to cover
 * the window, source changepoints are kept (rescaled to the same calendar
 * dates), and n_new_changepoints fresh ones are placed uniformly inside the
 * window. As lambda_anchor grows with no new changepoints, the adapted
 * forecast converges to the zero-shot forecast.
 */
std::pair<AdditiveModel, FitDiagnostics> adapt(const AdditiveModel& source,
                                               const DailySeries& target_window,
                                               const AdaptConfig& cfg = {});

struct ChangepointWeight {
    Date date;
    double weight; // |delta_j|
};

/// One entry per changepoint, ordered by date.
std::vector<ChangepointWeight> changepoint_weight_profile(const AdditiveModel& model);

void write_weight_profile_csv(std::span<const ChangepointWeight> profile, std::ostream& out);

} // namespace salescast
