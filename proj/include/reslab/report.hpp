#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "reslab/base.hpp"

namespace reslab {

struct Record {
    std::string check;   // what was measured, with coordinates baked in
    std::string anchor;  // stable claim id the record verifies
    double value = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    double seconds = 0.0;  // stays 0 unless timing is requested, keeps reruns byte-identical
};

inline Record make_record(std::string check, std::string anchor, double value, double residual,
                          double tolerance, double seconds = 0.0) {
    Record r;
    r.check = std::move(check);
    r.anchor = std::move(anchor);
    r.value = value;
    r.residual = residual;
    r.tolerance = tolerance;
    r.pass = residual <= tolerance;
    r.seconds = seconds;
    return r;
}

struct Report {
    std::vector<Record> records;

    bool all_pass() const {
        for (const Record& r : records)
            if (!r.pass) return false;
        return true;
    }

    void append(const Report& other) {
        records.insert(records.end(), other.records.begin(), other.records.end());
    }
};

inline const char* csv_header() { return "check,anchor,value,residual,tolerance,pass,seconds"; }

namespace detail {

inline void guard_plain(const std::string& s) {
    for (char c : s)
        if (c == ',' || c == '"' || c == '\n' || c == '\r')
            throw io_error("record label not representable in csv: " + s);
}

}  // namespace detail

inline std::string to_csv(const Report& rep) {
    std::string out = csv_header();
    out += '\n';
    for (const Record& r : rep.records) {
        detail::guard_plain(r.check);
        detail::guard_plain(r.anchor);
        out += r.check;
        out += ',';
        out += r.anchor;
        out += ',';
        out += format17(r.value);
        out += ',';
        out += format17(r.residual);
        out += ',';
        out += format17(r.tolerance);
        out += ',';
        out += r.pass ? "true" : "false";
        out += ',';
        out += format17(r.seconds);
        out += '\n';
    }
    return out;
}

// Hand-rolled writer so float fields carry exactly 17 significant digits;
// reading back goes through a real parser instead.
inline std::string to_json(const Report& rep) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < rep.records.size(); ++i) {
        const Record& r = rep.records[i];
        detail::guard_plain(r.check);
        detail::guard_plain(r.anchor);
        out += "  {\"check\":\"" + r.check + "\",\"anchor\":\"" + r.anchor + "\",\"value\":" +
               format17(r.value) + ",\"residual\":" + format17(r.residual) + ",\"tolerance\":" +
               format17(r.tolerance) + ",\"pass\":" + (r.pass ? "true" : "false") +
               ",\"seconds\":" + format17(r.seconds) + "}";
        if (i + 1 < rep.records.size()) out += ',';
        out += '\n';
    }
    out += "]\n";
    return out;
}

inline Report parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty csv input");
    if (line == std::string(csv_header()) + "\r") line.pop_back();
    if (line != csv_header()) throw io_error("unexpected csv header: " + line);
    Report rep;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= line.size(); ++i)
            if (i == line.size() || line[i] == ',') {
                f.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        if (f.size() != 7) throw io_error("csv row with " + std::to_string(f.size()) + " fields");
        Record r;
        r.check = f[0];
        r.anchor = f[1];
        r.value = std::stod(f[2]);
        r.residual = std::stod(f[3]);
        r.tolerance = std::stod(f[4]);
        if (f[5] != "true" && f[5] != "false") throw io_error("bad pass flag: " + f[5]);
        r.pass = f[5] == "true";
        r.seconds = std::stod(f[6]);
        rep.records.push_back(std::move(r));
    }
    return rep;
}

inline Report parse_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array()) throw io_error("json report must be an array");
    Report rep;
    for (const auto& item : j) {
        Record r;
        r.check = item.at("check").get<std::string>();
        r.anchor = item.at("anchor").get<std::string>();
        r.value = item.at("value").get<double>();
        r.residual = item.at("residual").get<double>();
        r.tolerance = item.at("tolerance").get<double>();
        r.pass = item.at("pass").get<bool>();
        r.seconds = item.at("seconds").get<double>();
        rep.records.push_back(std::move(r));
    }
    return rep;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw io_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace reslab
