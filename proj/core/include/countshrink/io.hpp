#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "countshrink/dataset.hpp"

namespace countshrink {

struct CsvOptions {
    std::string count_col = "count";
    std::optional<std::string> exposure_col;
    std::optional<std::string> label_col;  // default: first column that is neither count nor exposure
    char delimiter = ',';
    bool header = true;  // without a header, columns are named "1", "2", ...
};

// Rows are numbered from 1 with the header as row 1. Throws DataError on
// unreadable files, missing columns (naming the available ones), malformed or
// negative counts, and non-constant exposure.
CountDataset ingest_csv(const std::string& path, const CsvOptions& opts = {});
CountDataset parse_csv(const std::string& text, const CsvOptions& opts = {});

// 17 significant digits: parsing the text returns the same double.
std::string format_double(double x);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::string& path);

struct Table {
    std::string name;  // "" for the main results table
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
};

// One results run: tables plus a metadata sidecar (config echo, digests, timing).
struct RunRecord {
    std::string command;
    std::string input_digest;  // SHA-256 of the input bytes, empty when there is no input file
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<Table> tables;
    std::vector<std::string> warnings;
    double elapsed_seconds = 0.0;

    // SHA-256 over the CSV serialisation of every table (timing excluded).
    std::string results_digest() const;
    std::string metadata_json() const;

    // Writes <prefix>.csv for the main table, <prefix>.<name>.csv for the
    // others, and <prefix>.meta.json. Returns the paths written.
    std::vector<std::string> write(const std::string& prefix) const;
};

}  // namespace countshrink
