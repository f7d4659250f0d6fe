#include "chaosmeter/rate_table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "chaosmeter/errors.hpp"

namespace chaosmeter {

namespace {

constexpr const char* kHeader = "experiment,a,b,n,k,t,quantity,value,stderr,source";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_rate_csv(const std::string& path, const std::vector<RateRow>& rows) {
    std::ofstream out(path);
    if (!out) throw InvalidConfig("write_rate_csv: cannot open " + path);
    out << kHeader << '\n';
    for (const RateRow& row : rows) {
        out << row.experiment << ',' << format_double(row.a) << ','
            << format_double(row.b) << ',' << row.n << ',' << row.k << ','
            << format_double(row.t) << ',' << row.quantity << ','
            << format_double(row.value) << ',' << format_double(row.stderr_value)
            << ',' << row.source << '\n';
    }
}

std::vector<RateRow> read_rate_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("read_rate_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kHeader)
        throw InvalidConfig("read_rate_csv: bad header in " + path);
    std::vector<RateRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 10) throw InvalidConfig("read_rate_csv: malformed row: " + line);
        RateRow row;
        row.experiment = f[0];
        row.a = std::stod(f[1]);
        row.b = std::stod(f[2]);
        row.n = std::stoi(f[3]);
        row.k = std::stoi(f[4]);
        row.t = std::stod(f[5]);
        row.quantity = f[6];
        row.value = std::stod(f[7]);
        row.stderr_value = std::stod(f[8]);
        row.source = f[9];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace chaosmeter
