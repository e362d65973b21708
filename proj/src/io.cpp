#include "surge/io.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace surge {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw io_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json targets_to_json(const TargetSet& targets) {
    return json{{"targets", targets.targets}, {"cutoff", targets.cutoff}};
}

TargetSet targets_from_json(const json& j) {
    TargetSet out;
    out.targets = j.at("targets").get<std::vector<double>>();
    out.cutoff = j.at("cutoff").get<double>();
    return out;
}

json series_to_json(const PowerSeries& series) { return json{{"coeffs", series.coeffs}}; }

PowerSeries series_from_json(const json& j) {
    return PowerSeries{j.at("coeffs").get<std::vector<double>>()};
}

json report_to_json(const AnalysisReport& report) {
    json j;
    if (report.range) {
        j["range"] = {{"g_min", report.range->g_min},
                      {"g_max", report.range->g_max},
                      {"score", report.range->score}};
    } else {
        j["range"] = nullptr;
    }
    j["samples"] = json::array();
    for (const auto& s : report.samples)
        j["samples"].push_back({{"g", s.g}, {"z", s.z}, {"stderr", s.stderr_}});
    j["coeffs"] = report.coeffs;
    j["borel_coeffs"] = report.borel_coeffs;
    j["singularities"] = json::array();
    for (const auto& s : report.singularities) {
        json e = {{"zeta", s.location},
                  {"detector", detector_name(s.detector)},
                  {"strength", s.strength}};
        if (s.residue) e["residue"] = *s.residue;
        j["singularities"].push_back(e);
    }
    j["targets"] = report.targets.targets;
    j["cutoff"] = report.targets.cutoff;
    j["diagnostics"] = json::array();
    for (const auto& d : report.diagnostics)
        j["diagnostics"].push_back({{"stage", d.stage}, {"message", d.message}});
    return j;
}

std::string trajectory_to_csv(const Trajectory& trajectory) {
    std::ostringstream out;
    out << "step,loss,alpha,target,grad_norm\n";
    for (const auto& p : trajectory.points) {
        out << p.step << ',' << format_double(p.loss) << ',' << format_double(p.alpha) << ','
            << (p.target ? format_double(*p.target) : "nan") << ',' << format_double(p.grad_norm)
            << '\n';
    }
    return out.str();
}

std::string dataset_to_csv(const Dataset& data) {
    std::ostringstream out;
    out << "x,y\n";
    for (size_t k = 0; k < data.size(); ++k)
        out << format_double(data.inputs[k]) << ',' << format_double(data.targets[k]) << '\n';
    return out.str();
}

Dataset dataset_from_csv(const std::string& text) {
    Dataset data;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw io_error("dataset csv: malformed line");
        data.inputs.push_back(std::stod(line.substr(0, comma)));
        data.targets.push_back(std::stod(line.substr(comma + 1)));
    }
    return data;
}

std::string params_to_blob(const std::vector<int>& layer_sizes, const std::vector<double>& params) {
    json header = {{"layer_sizes", layer_sizes}, {"count", params.size()}};
    std::string blob = header.dump();
    blob.push_back('\n');
    const size_t offset = blob.size();
    blob.resize(offset + params.size() * sizeof(double));
    std::memcpy(blob.data() + offset, params.data(), params.size() * sizeof(double));
    return blob;
}

std::pair<std::vector<int>, std::vector<double>> params_from_blob(const std::string& blob) {
    const auto nl = blob.find('\n');
    if (nl == std::string::npos) throw io_error("parameter blob: missing header");
    const json header = json::parse(blob.substr(0, nl));
    std::vector<int> sizes = header.at("layer_sizes").get<std::vector<int>>();
    const size_t count = header.at("count").get<size_t>();
    if (blob.size() != nl + 1 + count * sizeof(double))
        throw io_error("parameter blob: size mismatch");
    std::vector<double> params(count);
    std::memcpy(params.data(), blob.data() + nl + 1, count * sizeof(double));
    return {std::move(sizes), std::move(params)};
}

std::string oracle_report_to_csv(const OracleReport& report) {
    std::ostringstream out;
    out << "g,exact,truncated,truncation_order,borel_pade,rel_err_truncated,rel_err_borel_pade\n";
    for (const auto& r : report.rows) {
        out << format_double(r.g) << ',' << format_double(r.exact) << ','
            << format_double(r.truncated) << ',' << r.truncation_order << ','
            << format_double(r.borel_pade) << ',' << format_double(r.rel_err_truncated) << ','
            << format_double(r.rel_err_borel_pade) << '\n';
    }
    return out.str();
}

json oracle_report_to_json(const OracleReport& report) {
    json j;
    j["zeta1"] = report.zeta1;
    j["paper_zeta_a"] = report.paper_zeta_a;
    j["paper_zeta_b"] = report.paper_zeta_b;
    j["rows"] = json::array();
    for (const auto& r : report.rows)
        j["rows"].push_back({{"g", r.g},
                             {"exact", r.exact},
                             {"truncated", r.truncated},
                             {"truncation_order", r.truncation_order},
                             {"borel_pade", r.borel_pade},
                             {"rel_err_truncated", r.rel_err_truncated},
                             {"rel_err_borel_pade", r.rel_err_borel_pade}});
    j["coefficients"] = json::array();
    for (const auto& c : report.coefficients) {
        json e = {{"k", c.k}, {"oracle", c.oracle}};
        if (std::isfinite(c.fitted)) e["fitted"] = c.fitted;
        j["coefficients"].push_back(e);
    }
    return j;
}

std::string oracle_report_table(const OracleReport& report) {
    std::ostringstream out;
    char line[160];
    out << "    g        exact Z(g)   truncated (N)      Borel-Pade    rel.err trunc  rel.err B-P\n";
    for (const auto& r : report.rows) {
        std::snprintf(line, sizeof(line), "  %-8.4g %12.6f %12.6f (%2d) %14.6f %14.3e %12.3e\n",
                      r.g, r.exact, r.truncated, r.truncation_order, r.borel_pade,
                      r.rel_err_truncated, r.rel_err_borel_pade);
        out << line;
    }
    std::snprintf(line, sizeof(line),
                  "  dominant Borel singularity distance: %.6f (printed values: %.4f / %.4f)\n",
                  report.zeta1, report.paper_zeta_a, report.paper_zeta_b);
    out << line;
    return out.str();
}

} // namespace surge
