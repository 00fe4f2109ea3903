#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seqgini/errors.hpp"
#include "seqgini/estimators.hpp"
#include "seqgini/harness.hpp"
#include "seqgini/population.hpp"
#include "seqgini/risk.hpp"
#include "seqgini/sequential.hpp"

namespace seqgini {
namespace io {

// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, const std::string& context) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw config_error("malformed number '" + token + "' in " + context);
    }
    return value;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(current);
            current.clear();
        } else if (ch != '\r') {
            current += ch;
        }
    }
    fields.push_back(current);
    return fields;
}

// Single-column income file: header `income`, one positive decimal per row.
// Row order defines arrival order. Errors name the offending file line
// (the header is line 1).
inline Sample read_income_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open income file '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw config_error("income file '" + path + "' is empty");
    const auto header = split_csv_line(line);
    if (header.size() != 1 || header[0] != "income") {
        throw config_error("income file '" + path + "' must have the single-column header 'income'");
    }

    Sample sample;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 1) {
            throw config_error("income file '" + path + "': row at line " +
                               std::to_string(line_no) + " has " +
                               std::to_string(fields.size()) + " columns, expected 1");
        }
        double value = 0.0;
        try {
            value = parse_double(fields[0], "income file row");
        } catch (const config_error&) {
            throw config_error("income file '" + path + "': malformed value at line " +
                               std::to_string(line_no));
        }
        try {
            sample.push_back(value);
        } catch (const rejected_observation_error&) {
            throw config_error("income file '" + path + "': non-positive income at line " +
                               std::to_string(line_no));
        }
    }
    return sample;
}

// --- ReplicationSummary serialization -------------------------------------

// Ordered field list shared by the CSV and JSON forms; header names are
// part of the file-format contract.
inline std::vector<std::pair<std::string, double>> summary_fields(
    const mc::ReplicationSummary& s) {
    return {
        {"reps", static_cast<double>(s.reps)},
        {"n_bar", s.n_bar},
        {"se_n", s.se_n},
        {"max_n", static_cast<double>(s.max_n)},
        {"n_c", s.risk_report.n_c},
        {"n_ratio", s.risk_report.n_ratio},
        {"risk", s.risk_report.empirical_risk},
        {"se_risk", s.risk_report.se_empirical_risk},
        {"min_risk", s.risk_report.min_risk},
        {"ratio_regret", s.risk_report.ratio_regret},
        {"regret_difference", s.risk_report.regret_difference},
        {"sw2_bar", s.sw2_bar},
        {"se_sw2", s.se_sw2},
        {"tau_bar", s.tau_bar},
        {"se_tau", s.se_tau},
        {"v2_bar", s.v2_bar},
        {"se_v2", s.se_v2},
        {"truth_mu", s.truth.mu},
        {"truth_sigma2", s.truth.sigma2},
        {"truth_delta", s.truth.delta},
        {"truth_sigma1_2", s.truth.sigma1_2},
        {"truth_tau", s.truth.tau},
        {"truth_xi2", s.truth.xi2},
        {"truth_gini", s.truth.gini},
    };
}

inline void assign_summary_field(mc::ReplicationSummary& s, const std::string& key,
                                 double value) {
    if (key == "reps") s.reps = static_cast<std::size_t>(value);
    else if (key == "n_bar") s.n_bar = value;
    else if (key == "se_n") s.se_n = value;
    else if (key == "max_n") s.max_n = static_cast<std::size_t>(value);
    else if (key == "n_c") s.risk_report.n_c = value;
    else if (key == "n_ratio") s.risk_report.n_ratio = value;
    else if (key == "risk") s.risk_report.empirical_risk = value;
    else if (key == "se_risk") s.risk_report.se_empirical_risk = value;
    else if (key == "min_risk") s.risk_report.min_risk = value;
    else if (key == "ratio_regret") s.risk_report.ratio_regret = value;
    else if (key == "regret_difference") s.risk_report.regret_difference = value;
    else if (key == "sw2_bar") s.sw2_bar = value;
    else if (key == "se_sw2") s.se_sw2 = value;
    else if (key == "tau_bar") s.tau_bar = value;
    else if (key == "se_tau") s.se_tau = value;
    else if (key == "v2_bar") s.v2_bar = value;
    else if (key == "se_v2") s.se_v2 = value;
    else if (key == "truth_mu") s.truth.mu = value;
    else if (key == "truth_sigma2") s.truth.sigma2 = value;
    else if (key == "truth_delta") s.truth.delta = value;
    else if (key == "truth_sigma1_2") s.truth.sigma1_2 = value;
    else if (key == "truth_tau") s.truth.tau = value;
    else if (key == "truth_xi2") s.truth.xi2 = value;
    else if (key == "truth_gini") s.truth.gini = value;
    else throw config_error("unknown summary field '" + key + "'");
}

inline std::string summary_to_csv(const mc::ReplicationSummary& s) {
    const auto fields = summary_fields(s);
    std::string header;
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            header += ',';
            row += ',';
        }
        header += fields[i].first;
        row += format_double(fields[i].second);
    }
    return header + "\n" + row + "\n";
}

inline mc::ReplicationSummary summary_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string header_line;
    std::string row_line;
    if (!std::getline(in, header_line) || !std::getline(in, row_line)) {
        throw config_error("summary csv must have a header and one value row");
    }
    const auto keys = split_csv_line(header_line);
    const auto values = split_csv_line(row_line);
    if (keys.size() != values.size()) {
        throw config_error("summary csv header/value column count mismatch");
    }
    mc::ReplicationSummary s;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        assign_summary_field(s, keys[i], parse_double(values[i], "summary csv"));
    }
    return s;
}

inline nlohmann::json summary_to_json(const mc::ReplicationSummary& s) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, value] : summary_fields(s)) {
        if (key == "reps" || key == "max_n") {
            j[key] = static_cast<std::uint64_t>(value);
        } else {
            j[key] = value;
        }
    }
    return j;
}

inline mc::ReplicationSummary summary_from_json(const nlohmann::json& j) {
    mc::ReplicationSummary s;
    for (const auto& [key, value] : j.items()) {
        assign_summary_field(s, key, value.get<double>());
    }
    return s;
}

// --- population params report ----------------------------------------------

inline std::vector<std::pair<std::string, double>> params_fields(
    const PopulationParams& p) {
    return {
        {"mu", p.mu},         {"sigma2", p.sigma2}, {"delta", p.delta},
        {"sigma1_2", p.sigma1_2}, {"tau", p.tau},   {"xi2", p.xi2},
        {"gini", p.gini},
    };
}

// --- tables ------------------------------------------------------------------

struct TableStudy {
    std::string name;
    PopulationModel model;
    mc::ReplicationSummary summary;
};

inline std::string table1_csv(const std::vector<TableStudy>& studies) {
    std::string out =
        "dist,sw2_bar,se_sw2,sw2_truth,tau_bar,se_tau,tau_truth,v2_bar,se_v2,v2_truth\n";
    for (const TableStudy& st : studies) {
        const mc::ReplicationSummary& s = st.summary;
        out += st.name + ',' + format_double(s.sw2_bar) + ',' + format_double(s.se_sw2) +
               ',' + format_double(4.0 * s.truth.sigma1_2) + ',' + format_double(s.tau_bar) +
               ',' + format_double(s.se_tau) + ',' + format_double(s.truth.tau) + ',' +
               format_double(s.v2_bar) + ',' + format_double(s.se_v2) + ',' +
               format_double(s.truth.xi2) + "\n";
    }
    return out;
}

inline std::string table2_csv(const std::vector<TableStudy>& studies) {
    std::string out = "dist,n_bar,se_n,n_c,n_ratio,max_n,risk,se_risk,ratio_regret\n";
    for (const TableStudy& st : studies) {
        const mc::ReplicationSummary& s = st.summary;
        out += st.name + ',' + format_double(s.n_bar) + ',' + format_double(s.se_n) + ',' +
               format_double(s.risk_report.n_c) + ',' + format_double(s.risk_report.n_ratio) +
               ',' + std::to_string(s.max_n) + ',' +
               format_double(s.risk_report.empirical_risk) + ',' +
               format_double(s.risk_report.se_empirical_risk) + ',' +
               format_double(s.risk_report.ratio_regret) + "\n";
    }
    return out;
}

inline std::string batch_table_csv(const std::vector<TableStudy>& studies,
                                   bool regret_column) {
    std::size_t batches = 0;
    for (const TableStudy& st : studies) {
        batches = std::max(batches, st.summary.second_order.size());
    }
    std::string out = "dist";
    for (std::size_t b = 1; b <= batches; ++b) out += ",batch_" + std::to_string(b);
    out += "\n";
    for (const TableStudy& st : studies) {
        out += st.name;
        for (const mc::SecondOrderDiff& d : st.summary.second_order) {
            out += ',' + format_double(regret_column ? d.regret_diff : d.n_diff);
        }
        out += "\n";
    }
    return out;
}

inline std::string raw_replications_csv(const std::vector<TableStudy>& studies) {
    std::string out = "dist,replication,n_final,gini\n";
    for (const TableStudy& st : studies) {
        for (std::size_t i = 0; i < st.summary.replications.size(); ++i) {
            const StoppingResult& r = st.summary.replications[i];
            out += st.name + ',' + std::to_string(i) + ',' + std::to_string(r.n_final) +
                   ',' + format_double(r.gini_final) + "\n";
        }
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw config_error("failed writing output file '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace io
}  // namespace seqgini
