#include "countshrink/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <boost/tokenizer.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include "countshrink/errors.hpp"

namespace countshrink {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_row(const std::string& line, char delim) {
    using Sep = boost::escaped_list_separator<char>;
    boost::tokenizer<Sep> tok(line, Sep('\\', delim, '"'));
    std::vector<std::string> out;
    for (const auto& t : tok) out.push_back(trim(t));
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

CountDataset parse_csv(const std::string& text, const CsvOptions& opts) {
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> names;

    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> record_rows;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = split_row(line, opts.delimiter);
        } catch (const boost::escaped_list_error& e) {
            throw DataError("row " + std::to_string(row) + ": malformed CSV (" + e.what() + ")");
        }
        if (opts.header && names.empty()) {
            names = fields;
            continue;
        }
        records.push_back(std::move(fields));
        record_rows.push_back(row);
    }
    if (!opts.header) {
        const std::size_t width = records.empty() ? 0 : records.front().size();
        for (std::size_t i = 0; i < width; ++i) names.push_back(std::to_string(i + 1));
    }

    auto find_col = [&](const std::string& want) -> std::size_t {
        const auto it = std::find(names.begin(), names.end(), want);
        if (it == names.end()) {
            std::string avail;
            for (const auto& n : names) avail += (avail.empty() ? "" : ", ") + n;
            throw DataError("column '" + want + "' not found; available columns: " + avail);
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    const std::size_t count_idx = find_col(opts.count_col);
    std::optional<std::size_t> exposure_idx, label_idx;
    if (opts.exposure_col) exposure_idx = find_col(*opts.exposure_col);
    if (opts.label_col) {
        label_idx = find_col(*opts.label_col);
    } else {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (i != count_idx && (!exposure_idx || i != *exposure_idx)) {
                label_idx = i;
                break;
            }
    }

    CountDataset d;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& f = records[r];
        const std::string where = "row " + std::to_string(record_rows[r]);
        auto field = [&](std::size_t idx) -> const std::string& {
            if (idx >= f.size()) throw DataError(where + ": expected " + std::to_string(names.size()) + " fields, found " + std::to_string(f.size()));
            return f[idx];
        };
        const std::string& cs = field(count_idx);
        std::int64_t v = 0;
        const auto res = std::from_chars(cs.data(), cs.data() + cs.size(), v);
        if (cs.empty() || res.ec != std::errc{} || res.ptr != cs.data() + cs.size())
            throw DataError(where + ": count '" + cs + "' is not an integer");
        if (v < 0) throw DataError(where + ": count " + cs + " is negative");
        d.y.push_back(v);

        if (exposure_idx) {
            const std::string& es = field(*exposure_idx);
            double e = 0.0;
            const auto er = std::from_chars(es.data(), es.data() + es.size(), e);
            if (es.empty() || er.ec != std::errc{} || er.ptr != es.data() + es.size() || !(e > 0.0))
                throw DataError(where + ": exposure '" + es + "' is not a positive number");
            if (d.exposure && *d.exposure != e)
                throw DataError(where + ": exposure differs from earlier rows; only a constant exposure is supported");
            d.exposure = e;
        }
        if (label_idx) d.labels.push_back(field(*label_idx));
    }
    if (d.y.empty()) throw DataError("no data rows");
    d.validate();
    return d;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CountDataset ingest_csv(const std::string& path, const CsvOptions& opts) {
    return parse_csv(read_file(path), opts);
}

std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), r.ptr);
}

std::string sha256_hex(const std::string& bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream ss;
    for (unsigned i = 0; i < len; ++i) ss << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return ss.str();
}

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + csv_field(columns[i]);
    out += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + csv_field(r[i]);
        out += '\n';
    }
    return out;
}

std::string RunRecord::results_digest() const {
    std::string all;
    for (const auto& t : tables) all += "#" + t.name + "\n" + t.to_csv();
    return sha256_hex(all);
}

std::string RunRecord::metadata_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    if (!input_digest.empty()) j["input_sha256"] = input_digest;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config) cfg[k] = v;
    j["config"] = cfg;
    j["results_sha256"] = results_digest();
    nlohmann::ordered_json tabs = nlohmann::ordered_json::array();
    for (const auto& t : tables) tabs.push_back({{"name", t.name}, {"rows", t.rows.size()}});
    j["tables"] = tabs;
    j["warnings"] = warnings;
    j["elapsed_seconds"] = elapsed_seconds;
    return j.dump(2) + "\n";
}

std::vector<std::string> RunRecord::write(const std::string& prefix) const {
    std::vector<std::string> paths;
    auto put = [&](const std::string& path, const std::string& body) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DataError("cannot write '" + path + "'");
        f << body;
        paths.push_back(path);
    };
    for (const auto& t : tables) put(prefix + (t.name.empty() ? "" : "." + t.name) + ".csv", t.to_csv());
    put(prefix + ".meta.json", metadata_json());
    return paths;
}

}  // namespace countshrink
