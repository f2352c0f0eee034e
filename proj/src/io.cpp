#include "resolv/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace resolv {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const Json::exception& e) {
    throw InputError(std::string(what) + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string(what) + ": " + e.what());
  } catch (const std::out_of_range& e) {
    throw InputError(std::string(what) + ": " + e.what());
  }
}

std::string format_sig9(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);
  return buf;
}

Json atoms_json(const FiniteDistribution& d) {
  Json atoms = Json::array();
  for (const auto& atom : d.atoms()) atoms.push_back({{"label", atom.label}, {"p", atom.p}});
  return atoms;
}

std::vector<Atom> atoms_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("\"atoms\" must be an array");
  std::vector<Atom> atoms;
  for (const auto& a : j) atoms.push_back({a.at("label").get<std::string>(), a.at("p").get<double>()});
  return atoms;
}

int base_from_json(const Json& j) { return j.contains("base") ? j.at("base").get<int>() : 2; }

Json finite_or_null(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

}  // namespace

double round_sig9(double x) {
  if (!std::isfinite(x)) return x;
  if (x == 0.0) return 0.0;
  return std::strtod(format_sig9(x).c_str(), nullptr);
}

Json number_json(double x) {
  if (std::isfinite(x)) return round_sig9(x);
  return format_sig9(x);
}

double number_from_json(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw InputError("not a number: " + s);
}

Json distribution_to_json(const FiniteDistribution& d) {
  return {{"base", d.base()}, {"atoms", atoms_json(d)}};
}

Json distribution_to_json(const GroupedDistribution& d) {
  return {{"base", d.log_base()}, {"iid", {{"atoms", atoms_json(d.base())}}}, {"n", d.n()}};
}

FiniteDistribution finite_distribution_from_json(const Json& j) {
  return guarded("distribution", [&] {
    if (!j.is_object() || !j.contains("atoms")) {
      throw InputError("distribution needs an \"atoms\" list");
    }
    return FiniteDistribution(atoms_from_json(j.at("atoms")), base_from_json(j));
  });
}

DistributionInput distribution_from_json(const Json& j, std::size_t type_class_cap) {
  return guarded("distribution", [&]() -> DistributionInput {
    if (!j.is_object()) throw InputError("distribution must be a JSON object");
    if (!j.contains("iid")) return finite_distribution_from_json(j);
    const Json& single = j.at("iid");
    if (!single.contains("atoms")) throw InputError("\"iid\" needs an \"atoms\" list");
    const int base = base_from_json(j);
    if (single.contains("base") && single.at("base").get<int>() != base) {
      throw InputError("\"iid\" base differs from the outer base");
    }
    const auto n = j.at("n").get<long long>();
    if (n < 1 || n > std::numeric_limits<unsigned>::max()) throw InputError("n must be >= 1");
    try {
      return iid_power(FiniteDistribution(atoms_from_json(single.at("atoms")), base),
                       static_cast<unsigned>(n), type_class_cap);
    } catch (const std::length_error& e) {
      throw InputError(e.what());
    }
  });
}

Json channel_to_json(const Channel& W) {
  Json rows = Json::object();
  for (std::size_t i = 0; i < W.inputs().size(); ++i) {
    Json row = Json::object();
    for (std::size_t o = 0; o < W.outputs().size(); ++o) row[W.outputs()[o]] = W.w(i, o);
    rows[W.inputs()[i]] = std::move(row);
  }
  return {{"base", W.base()}, {"inputs", W.inputs()}, {"outputs", W.outputs()}, {"rows", rows}};
}

Channel channel_from_json(const Json& j) {
  return guarded("channel", [&] {
    const auto inputs = j.at("inputs").get<std::vector<std::string>>();
    const auto outputs = j.at("outputs").get<std::vector<std::string>>();
    const Json& rows_json = j.at("rows");
    std::vector<std::vector<double>> rows;
    for (const auto& in : inputs) {
      std::vector<double> row(outputs.size(), 0.0);
      const Json& r = rows_json.at(in);
      for (const auto& [label, w] : r.items()) {
        const auto it = std::find(outputs.begin(), outputs.end(), label);
        if (it == outputs.end()) throw InputError("row '" + in + "' names unknown output '" + label + "'");
        row[static_cast<std::size_t>(it - outputs.begin())] = w.get<double>();
      }
      rows.push_back(std::move(row));
    }
    return Channel(inputs, outputs, std::move(rows), base_from_json(j));
  });
}

Json slice_code_to_json(const SliceCode& code) {
  Json slices = Json::array();
  for (const auto& slice : code.slices) {
    Json atoms = Json::array();
    for (const auto& e : slice.atoms) {
      atoms.push_back({{"label", e.label},
                       {"p", e.p},
                       {"floor_cells", e.floor_cells.str()},
                       {"granted", e.granted},
                       {"lo", e.cells.lo.str()},
                       {"hi", e.cells.hi.str()}});
    }
    slices.push_back({{"m", slice.m}, {"mass", slice.mass}, {"atoms", std::move(atoms)}});
  }
  Json pmf = Json::array();
  for (const auto& [m, p] : code.length_pmf) pmf.push_back({{"m", m}, {"p", p}});
  return {{"target_V", distribution_to_json(code.target_V)},
          {"n", code.n},
          {"gamma", code.gamma},
          {"c_n", code.c_n},
          {"variant", std::string(to_string(code.variant))},
          {"gamma0", code.gamma0},
          {"beta", code.beta},
          {"slices", std::move(slices)},
          {"length_pmf", std::move(pmf)},
          {"lambda_atom", finite_or_null(code.lambda_atom)}};
}

SliceCode slice_code_from_json(const Json& j) {
  return guarded("slice code", [&] {
    SliceCode code{.target_V = finite_distribution_from_json(j.at("target_V"))};
    code.n = j.at("n").get<unsigned>();
    code.gamma = j.at("gamma").get<double>();
    code.c_n = j.at("c_n").get<double>();
    code.variant = measure_from_string(j.at("variant").get<std::string>());
    code.gamma0 = j.at("gamma0").get<double>();
    code.beta = j.at("beta").get<unsigned>();
    for (const auto& s : j.at("slices")) {
      Slice slice;
      slice.m = s.at("m").get<unsigned>();
      slice.mass = s.at("mass").get<double>();
      for (const auto& a : s.at("atoms")) {
        SliceEntry e;
        e.label = a.at("label").get<std::string>();
        e.p = a.at("p").get<double>();
        e.floor_cells = BigInt(a.at("floor_cells").get<std::string>());
        e.granted = a.at("granted").get<bool>();
        e.cells = {BigInt(a.at("lo").get<std::string>()), BigInt(a.at("hi").get<std::string>())};
        slice.atoms.push_back(std::move(e));
      }
      code.slices.push_back(std::move(slice));
    }
    for (const auto& p : j.at("length_pmf")) {
      code.length_pmf.emplace_back(p.at("m").get<unsigned>(), p.at("p").get<double>());
    }
    if (!j.at("lambda_atom").is_null()) code.lambda_atom = j.at("lambda_atom").get<std::string>();
    const auto issues = check_code_invariants(code);
    if (!issues.empty()) throw InputError("slice code violates invariants: " + issues.front());
    return code;
  });
}

Json report_to_json(const VerificationReport& r) {
  Json channel = nullptr;
  if (r.channel) {
    channel = {{"measure", std::string(to_string(r.channel->measure))},
               {"output_value", number_json(r.channel->output_value)},
               {"output_bound", number_json(r.channel->output_bound)},
               {"ok", r.channel->ok}};
  }
  return {{"variant", std::string(to_string(r.variant))},
          {"induced", distribution_to_json(r.induced)},
          {"expected_length", number_json(r.expected_length)},
          {"structure_ok", r.structure_ok},
          {"per_atom_dev_ok", r.per_atom_dev_ok},
          {"distance_to_V", number_json(r.distance_to_V)},
          {"distance_bound", number_json(r.distance_bound)},
          {"distance_ok", r.distance_ok},
          {"length_bound", number_json(r.length_bound)},
          {"length_ok", r.length_ok},
          {"distance_to_target", number_json(r.distance_to_target)},
          {"target_bound", number_json(r.target_bound)},
          {"target_premise", r.target_premise},
          {"target_ok", r.target_ok},
          {"divergence_V_to_target", number_json(r.divergence_V_to_target)},
          {"divergence_to_target", number_json(r.divergence_to_target)},
          {"divergence_bound", number_json(r.divergence_bound)},
          {"divergence_premise", r.divergence_premise},
          {"divergence_ok", r.divergence_ok},
          {"pointwise_ratio_ok", r.pointwise_ratio_ok},
          {"channel", std::move(channel)},
          {"pass", r.pass}};
}

VerificationReport report_from_json(const Json& j) {
  return guarded("report", [&] {
    VerificationReport r{.induced = finite_distribution_from_json(j.at("induced"))};
    r.variant = measure_from_string(j.at("variant").get<std::string>());
    r.expected_length = number_from_json(j.at("expected_length"));
    r.structure_ok = j.at("structure_ok").get<bool>();
    r.per_atom_dev_ok = j.at("per_atom_dev_ok").get<bool>();
    r.distance_to_V = number_from_json(j.at("distance_to_V"));
    r.distance_bound = number_from_json(j.at("distance_bound"));
    r.distance_ok = j.at("distance_ok").get<bool>();
    r.length_bound = number_from_json(j.at("length_bound"));
    r.length_ok = j.at("length_ok").get<bool>();
    r.distance_to_target = number_from_json(j.at("distance_to_target"));
    r.target_bound = number_from_json(j.at("target_bound"));
    r.target_premise = j.at("target_premise").get<bool>();
    r.target_ok = j.at("target_ok").get<bool>();
    r.divergence_V_to_target = number_from_json(j.at("divergence_V_to_target"));
    r.divergence_to_target = number_from_json(j.at("divergence_to_target"));
    r.divergence_bound = number_from_json(j.at("divergence_bound"));
    r.divergence_premise = j.at("divergence_premise").get<bool>();
    r.divergence_ok = j.at("divergence_ok").get<bool>();
    r.pointwise_ratio_ok = j.at("pointwise_ratio_ok").get<bool>();
    if (const Json& c = j.at("channel"); !c.is_null()) {
      r.channel = ChannelCheck{.measure = measure_from_string(c.at("measure").get<std::string>()),
                               .output_value = number_from_json(c.at("output_value")),
                               .output_bound = number_from_json(c.at("output_bound")),
                               .ok = c.at("ok").get<bool>()};
    }
    r.pass = j.at("pass").get<bool>();
    return r;
  });
}

Json smooth_result_to_json(std::string_view quantity, const SmoothEntropyResult& result,
                           bool include_witness) {
  Json j = {{"quantity", std::string(quantity)},
            {"delta", number_json(result.delta)},
            {"value", number_json(result.value)},
            {"method", std::string(to_string(result.method))},
            {"achieved_radius", number_json(result.achieved_radius)}};
  if (include_witness) {
    if (result.witness) {
      j["witness"] = distribution_to_json(*result.witness);
    } else if (!result.grouped_witness.empty()) {
      Json groups = Json::array();
      for (const auto& g : result.grouped_witness) {
        groups.push_back({{"info", g.info}, {"p", g.p}, {"count", g.count.str()}, {"mass", g.mass}});
      }
      j["witness_groups"] = std::move(groups);
    }
    if (!result.witness_set.empty()) j["witness_set"] = result.witness_set;
  }
  return j;
}

void write_second_order_csv(std::ostream& out, const SecondOrderSeries& series) {
  out << "n,term,gaussian_limit\n";
  const std::string limit = format_sig9(series.gaussian_limit);
  for (const auto& point : series.points) {
    out << point.n << ',' << format_sig9(point.term) << ',' << limit << '\n';
  }
  out << "inf," << limit << ',' << limit << '\n';
}

SecondOrderTable read_second_order_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "n,term,gaussian_limit") {
    throw InputError("second-order CSV: bad header");
  }
  SecondOrderTable table;
  bool closed = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (closed) throw InputError("second-order CSV: rows after the limit row");
    std::stringstream ss(line);
    std::string n, term, limit;
    if (!std::getline(ss, n, ',') || !std::getline(ss, term, ',') || !std::getline(ss, limit)) {
      throw InputError("second-order CSV: malformed row '" + line + "'");
    }
    try {
      table.gaussian_limit = std::stod(limit);
      if (n == "inf") {
        closed = true;
      } else {
        table.terms.emplace_back(static_cast<unsigned>(std::stoul(n)), std::stod(term));
      }
    } catch (const std::logic_error&) {
      throw InputError("second-order CSV: malformed row '" + line + "'");
    }
  }
  if (!closed) throw InputError("second-order CSV: missing limit row");
  return table;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

DistributionInput read_distribution_file(const std::string& path, std::size_t type_class_cap) {
  return distribution_from_json(read_json_file(path), type_class_cap);
}

Channel read_channel_file(const std::string& path) { return channel_from_json(read_json_file(path)); }

}  // namespace resolv
