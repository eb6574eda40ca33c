#pragma once

#include "cbm/baselines.hpp"
#include "cbm/estimate.hpp"
#include "cbm/instances.hpp"
#include "cbm/orders.hpp"
#include "cbm/structure.hpp"

#include <string>
#include <vector>

namespace cbm {

/// `j,pi1,...,piL2,value`, one row per (j, grid point).
std::string format_value_csv(const ValueFunction& V, const BeliefGrid& grid);

/// `j,pi1,...,piL2,action`.
std::string format_policy_csv(const PolicyMap& policy, const BeliefGrid& grid);

/// Rows j = 0..L1, columns pi(L2) bins; glyphs '.' (0), '1', '2', '#' (12).
/// Each bin shows the action at the grid point nearest its centre.
std::string format_policy_heatmap(const PolicyMap& policy, const BeliefGrid& grid, int bins = 50);

/// `iter,loglik`.
std::string format_loglik_csv(const std::vector<double>& trace);

/// `run,iter,loglik` over all restarts.
std::string format_multistart_trace_csv(const MultiStartResult& result);

/// `parameter,mean,sd`.
std::string format_estimate_table_csv(const std::vector<ParameterStat>& table);

std::string structure_to_json(const StructureReport& policy, const ValueShapeReport& value,
                              const PreferenceReport* preference = nullptr);
std::string assumptions_to_json(const AssumptionReport& report);

/// `instance,V0,V1,V2,V3,gap1,gap2,gap3,xi1,xi2,upsilon2`.
std::string format_gap_csv(const std::vector<GapRecord>& records);
std::string gap_csv_header();
std::string format_gap_row(const GapRecord& r);

struct GapStats {
    double min = 0.0, mean = 0.0, max = 0.0;
    int count = 0;
};

struct GapSummaryRow {
    std::string factor; ///< factor name, or "Total"
    int choice = 0;     ///< 0 for the total row
    GapStats policy[3];
};

/// Table-3 layout: per factor and choice, then a total row. Records must carry
/// instance ids from instance_id().
std::vector<GapSummaryRow> summarize_gaps(const std::vector<GapRecord>& records);

/// `factor,choice,min1,mean1,max1,min2,mean2,max2,min3,mean3,max3`.
std::string format_gap_summary_csv(const std::vector<GapSummaryRow>& rows);

} // namespace cbm
