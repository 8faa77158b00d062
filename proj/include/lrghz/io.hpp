#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrghz/analysis.hpp"
#include "lrghz/protocol.hpp"
#include "lrghz/scheduler.hpp"
#include "lrghz/simulator.hpp"

namespace lrghz {

using Json = nlohmann::ordered_json;

// Nested tree r, r1, m, t1, t2, t_total, bound, certified, child_count,
// children; every node lists one representative child.
Json to_json(const ScheduleNode& node);
Json to_json(const SchedulePlan& plan);
Json to_json(const ProtocolTrace& trace);
Json to_json(const std::vector<ScalingRow>& rows);
Json to_json(const SpeedupReport& report);
Json to_json(const std::vector<GateBoundRow>& rows);

// %.17g; non-finite values become inf, -inf or nan.
std::string format_number(double x);

// RFC 4180 field quoting: quote when the field holds a comma, quote, CR or LF.
std::string csv_field(const std::string& field);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
  std::size_t width_;
};

// One line per recursion level, base first.
void write_csv(std::ostream& out, const SchedulePlan& plan);
// Columns: step, level, depth, inverse, time, duration, fidelity, merge_deviation.
void write_csv(std::ostream& out, const ProtocolTrace& trace);
void write_csv(std::ostream& out, const std::vector<ScalingRow>& rows);
void write_csv(std::ostream& out, const std::vector<GateBoundRow>& rows);

// Amplitudes with magnitude above `threshold` as basis, real, imag.
void write_state_csv(std::ostream& out, const StateVector& state, double threshold = 1e-12);
Json state_to_json(const StateVector& state, double threshold = 1e-12);

// Flat key=value lines; blank lines and lines starting with '#' are skipped.
// Throws kIo when the file cannot be read, kInvalidArgument on a malformed line.
std::map<std::string, std::string> read_key_value_file(const std::string& path);
std::map<std::string, std::string> parse_key_value(std::istream& in);

}  // namespace lrghz
