#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "reslab/base.hpp"

namespace reslab {

struct ExperimentConfig {
    std::string suite = "all";
    std::string op = "shift";  // shift | weighted
    std::vector<double> weights = {1.0, 4.0};
    std::vector<cx> lambda_grid;  // empty means the suite default grid
    std::size_t n = 0;            // window override, 0 means suite default
    double tol = 1e-12;
    std::uint64_t seed = 42;
    std::size_t budget = 240;
    std::string out;  // output path, default <suite>.<format> under OUTPUT_DIR
    std::string format = "csv";
    bool timings = false;

    void validate() const {
        if (op != "shift" && op != "weighted")
            throw config_error("op must be shift or weighted, got '" + op + "'");
        if (format != "csv" && format != "json")
            throw config_error("format must be csv or json, got '" + format + "'");
        if (!(tol > 0.0) || tol > 1e-2)
            throw config_error("tol must lie in (0, 1e-2], got " + format_short(tol));
        if (weights.empty()) throw config_error("weights must be nonempty");
        for (double w : weights)
            if (!(w > 0.0)) throw config_error("weights must be positive, got " + format_short(w));
        if (budget < 1) throw config_error("budget must be at least 1");
        if (n != 0 && (n < 16 || n > 4096))
            throw config_error("window override must lie in [16, 4096], got " + std::to_string(n));
        for (const cx& l : lambda_grid)
            if (std::abs(l) >= 0.9)
                throw config_error("lambda grid points must have modulus < 0.9, got " +
                                   format_cx(l));
    }

    std::string resolved_out() const {
        std::string path = out.empty() ? suite + "." + format : out;
        bool absolute = !path.empty() && path[0] == '/';
        const char* dir = std::getenv("OUTPUT_DIR");
        if (dir && *dir && !absolute) return std::string(dir) + "/" + path;
        return path;
    }
};

// Accepts 0.3, -0.25, 0.5i, -i, 0.2+0.1i, 1-0.4i. Anything else is refused
// loudly; silent misparses of a lambda grid would poison every residual.
inline cx parse_complex(const std::string& token) {
    std::string s;
    for (char c : token)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw config_error("empty complex literal");
    const char* p = s.c_str();
    double parts[2] = {0.0, 0.0};
    bool is_imag[2] = {false, false};
    int count = 0;
    while (*p) {
        if (count == 2) throw config_error("too many terms in complex literal '" + token + "'");
        double sign = 1.0;
        if (*p == '+' || *p == '-') {
            if (*p == '-') sign = -1.0;
            ++p;
        }
        double mag;
        char* end = nullptr;
        if (*p == 'i' || *p == 'I') {
            mag = 1.0;
            end = const_cast<char*>(p);
        } else {
            mag = std::strtod(p, &end);
            if (end == p) throw config_error("bad complex literal '" + token + "'");
        }
        p = end;
        if (*p == 'i' || *p == 'I') {
            is_imag[count] = true;
            ++p;
        }
        parts[count] = sign * mag;
        ++count;
    }
    if (count == 0) throw config_error("bad complex literal '" + token + "'");
    if (count == 2 && is_imag[0] == is_imag[1])
        throw config_error("complex literal '" + token + "' repeats a component");
    cx z{0.0, 0.0};
    for (int i = 0; i < count; ++i)
        z += is_imag[i] ? cx{0.0, parts[i]} : cx{parts[i], 0.0};
    return z;
}

inline std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline std::vector<double> parse_weights(const std::string& text) {
    std::vector<double> w;
    for (const std::string& tok : split_list(text, ',')) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw config_error("bad weight '" + tok + "'");
        w.push_back(v);
    }
    if (w.empty()) throw config_error("empty weight list");
    return w;
}

inline std::vector<cx> parse_lambda_grid(const std::string& text) {
    std::vector<cx> grid;
    for (const std::string& tok : split_list(text, ',')) grid.push_back(parse_complex(tok));
    if (grid.empty()) throw config_error("empty lambda grid");
    return grid;
}

// key=value lines; blank lines and # comments skipped. Unknown keys are an
// error rather than a warning so typos cannot silently fall back to defaults.
inline void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s;
        for (char c : line)
            if (c != '\r') s += c;
        std::size_t h = s.find('#');
        if (h != std::string::npos) s = s.substr(0, h);
        std::size_t a = s.find_first_not_of(" \t");
        if (a == std::string::npos) continue;
        std::size_t b = s.find_last_not_of(" \t");
        s = s.substr(a, b - a + 1);
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        std::string key = s.substr(0, eq), val = s.substr(eq + 1);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        std::size_t v0 = val.find_first_not_of(" \t");
        val = v0 == std::string::npos ? "" : val.substr(v0);
        if (key == "op")
            cfg.op = val;
        else if (key == "weights")
            cfg.weights = parse_weights(val);
        else if (key == "lambda")
            cfg.lambda_grid = parse_lambda_grid(val);
        else if (key == "n")
            cfg.n = static_cast<std::size_t>(std::stoull(val));
        else if (key == "tol")
            cfg.tol = std::stod(val);
        else if (key == "seed")
            cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        else if (key == "budget")
            cfg.budget = static_cast<std::size_t>(std::stoull(val));
        else if (key == "out")
            cfg.out = val;
        else if (key == "format")
            cfg.format = val;
        else if (key == "timings")
            cfg.timings = val == "1" || val == "true";
        else
            throw config_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                               "'");
    }
}

}  // namespace reslab
