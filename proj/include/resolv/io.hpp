#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "resolv/channel.hpp"
#include "resolv/distribution.hpp"
#include "resolv/slice_code.hpp"
#include "resolv/smooth_entropy.hpp"

namespace resolv {

// Malformed or unreadable input (maps to exit code 2 in the CLI).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

// Scalars in reports are written with 9 significant digits.
double round_sig9(double x);
// Non-finite values become the strings "inf", "-inf" and "nan".
Json number_json(double x);
double number_from_json(const Json& j);

using DistributionInput = std::variant<FiniteDistribution, GroupedDistribution>;

// {"base": K, "atoms": [{"label": ..., "p": ...}, ...]} or
// {"base": K, "iid": {"atoms": [...]}, "n": N}. Probabilities are written losslessly.
Json distribution_to_json(const FiniteDistribution& d);
Json distribution_to_json(const GroupedDistribution& d);
FiniteDistribution finite_distribution_from_json(const Json& j);
DistributionInput distribution_from_json(const Json& j,
                                         std::size_t type_class_cap = kDefaultTypeClassCap);

// {"base": K, "inputs": [...], "outputs": [...], "rows": {input: {output: w}}}.
// Outputs missing from a row are 0.
Json channel_to_json(const Channel& W);
Channel channel_from_json(const Json& j);

// Lossless: big integers as decimal strings, doubles at full precision.
Json slice_code_to_json(const SliceCode& code);
SliceCode slice_code_from_json(const Json& j);

Json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const Json& j);

Json smooth_result_to_json(std::string_view quantity, const SmoothEntropyResult& result,
                           bool include_witness);

// Header n,term,gaussian_limit; one row per point; a final row "inf,L,L".
void write_second_order_csv(std::ostream& out, const SecondOrderSeries& series);

struct SecondOrderTable {
  std::vector<std::pair<unsigned, double>> terms;
  double gaussian_limit = 0.0;
};
SecondOrderTable read_second_order_csv(std::istream& in);

Json read_json_file(const std::string& path);
DistributionInput read_distribution_file(const std::string& path,
                                         std::size_t type_class_cap = kDefaultTypeClassCap);
Channel read_channel_file(const std::string& path);

}  // namespace resolv
