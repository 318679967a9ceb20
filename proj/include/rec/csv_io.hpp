// Hourly CSV ingestion: header row required, comma separator, decimal point.

#ifndef REC_CSV_IO_HPP
#define REC_CSV_IO_HPP

#include <string>
#include <string_view>
#include <vector>

namespace rec {

struct HourlySeries {
    std::vector<std::string> timestamps;
    std::vector<std::string> names;            // value columns, timestamp excluded
    std::vector<std::vector<double>> columns;  // columns[c][row]

    std::size_t rows() const { return timestamps.size(); }
    const std::vector<double>& column(std::string_view name) const;
};

inline const std::vector<std::string> energy_columns = {"pv_kwh", "load_kwh",
                                                        "member_demand_kwh"};
inline const std::vector<std::string> msd_price_columns = {"msd_sell_max_eur_kwh",
                                                           "msd_buy_min_eur_kwh"};
inline const std::vector<std::string> grid_price_columns = {"export_price_eur_kwh",
                                                            "import_price_eur_kwh"};

/// The header must be exactly `timestamp` followed by `columns`. Values must
/// be finite and non-negative. Throws InputError with the line number.
HourlySeries parse_hourly_csv(std::string_view text, const std::vector<std::string>& columns);
HourlySeries read_hourly_csv(const std::string& path, const std::vector<std::string>& columns);

std::string format_hourly_csv(const HourlySeries& series);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

}  // namespace rec

#endif
