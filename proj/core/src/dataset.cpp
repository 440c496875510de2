#include "medmediate/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "medmediate/errors.hpp"

namespace medmediate {

std::string to_string(MediatorKind kind) {
    return kind == MediatorKind::Binary ? "binary" : "continuous";
}

std::optional<MediatorKind> mediator_kind_from_string(const std::string& text) {
    if (text == "binary") return MediatorKind::Binary;
    if (text == "continuous") return MediatorKind::Continuous;
    return std::nullopt;
}

Dataset::Dataset(Schema schema, std::vector<std::vector<double>> columns,
                 std::size_t n_dropped_rows)
    : schema_(std::move(schema)), columns_(std::move(columns)), n_dropped_(n_dropped_rows) {
    const std::size_t expected =
        2 + schema_.mediators.size() + schema_.covariates.size();
    if (columns_.size() != expected)
        throw DataError("dataset column count " + std::to_string(columns_.size()) +
                        " does not match schema (expected " + std::to_string(expected) + ")");
    n_rows_ = columns_.empty() ? 0 : columns_[0].size();
    for (const auto& col : columns_)
        if (col.size() != n_rows_)
            throw DataError("dataset columns have unequal lengths");
}

std::vector<std::size_t> Dataset::canonical_row_order() const {
    std::vector<std::size_t> order(n_rows_);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
        for (const auto& col : columns_) {
            if (col[a] < col[b]) return true;
            if (col[a] > col[b]) return false;
        }
        return false;
    });
    return order;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    std::vector<std::vector<double>> cols(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        cols[c].reserve(rows.size());
        for (std::size_t r : rows) {
            if (r >= n_rows_) throw DataError("subset row index out of range");
            cols[c].push_back(columns_[c][r]);
        }
    }
    return Dataset(schema_, std::move(cols), 0);
}

Dataset Dataset::swap_mediators() const {
    if (schema_.mediators.size() != 2)
        throw DataError("swap_mediators requires exactly two mediators");
    Schema s = schema_;
    std::swap(s.mediators[0], s.mediators[1]);
    std::vector<std::vector<double>> cols = columns_;
    std::swap(cols[2], cols[3]);
    return Dataset(std::move(s), std::move(cols), n_dropped_);
}

namespace {

// RFC 4180 field splitter: handles quoted fields, embedded commas,
// doubled quotes, and CRLF line endings.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    i += 2;
                } else {
                    in_quotes = false;
                    ++i;
                }
            } else {
                cur.push_back(c);
                ++i;
            }
        } else if (c == '"') {
            if (!cur.empty())
                throw DataError("line " + std::to_string(line_no) +
                                ": quote in the middle of an unquoted field");
            in_quotes = true;
            ++i;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            ++i;
        } else {
            cur.push_back(c);
            ++i;
        }
    }
    if (in_quotes)
        throw DataError("line " + std::to_string(line_no) + ": unterminated quoted field");
    fields.push_back(std::move(cur));
    return fields;
}

bool is_missing_token(const std::string& raw) {
    std::string t;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) return true;
    std::transform(t.begin(), t.end(), t.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return t == "NA" || t == "NAN" || t == "NULL" || t == "NONE" || t == ".";
}

std::optional<double> parse_field(const std::string& raw) {
    if (is_missing_token(raw)) return std::nullopt;
    std::size_t begin = raw.find_first_not_of(" \t\r");
    std::size_t end = raw.find_last_not_of(" \t\r");
    const char* first = raw.data() + begin;
    const char* last = raw.data() + end + 1;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) return std::nullopt;
    if (!std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const RoleSpec& roles) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError(path + ": empty file");
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
    // Strip a UTF-8 BOM if present.
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0)
        header_line.erase(0, 3);
    std::vector<std::string> header = split_csv_line(header_line, 1);

    // Role columns in schema order: outcome, exposure, mediators, covariates.
    std::vector<std::string> wanted;
    wanted.push_back(roles.outcome);
    wanted.push_back(roles.exposure);
    for (const auto& [name, kind] : roles.mediators) {
        (void)kind;
        wanted.push_back(name);
    }
    for (const auto& name : roles.covariates) wanted.push_back(name);

    {
        std::set<std::string> seen;
        for (const auto& name : wanted)
            if (!seen.insert(name).second)
                throw DataError("column '" + name + "' assigned to more than one role");
    }

    std::vector<std::size_t> index(wanted.size());
    for (std::size_t j = 0; j < wanted.size(); ++j) {
        auto it = std::find(header.begin(), header.end(), wanted[j]);
        if (it == header.end())
            throw DataError(path + ": required column '" + wanted[j] + "' not found in header");
        index[j] = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::vector<double>> columns(wanted.size());
    std::size_t dropped = 0;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_csv_line(line, line_no);
        if (fields.size() != header.size())
            throw DataError(path + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        std::vector<double> row(wanted.size());
        bool missing = false;
        for (std::size_t j = 0; j < wanted.size(); ++j) {
            const std::string& raw = fields[index[j]];
            auto value = parse_field(raw);
            if (!value) {
                if (is_missing_token(raw)) {
                    missing = true;
                } else {
                    throw DataError(path + ": line " + std::to_string(line_no) +
                                    ", column '" + wanted[j] + "': cannot parse '" + raw +
                                    "' as a number");
                }
            } else {
                row[j] = *value;
            }
        }
        if (missing) {
            ++dropped;
            continue;
        }
        for (std::size_t j = 0; j < wanted.size(); ++j) columns[j].push_back(row[j]);
    }

    Schema schema{roles.outcome, roles.exposure, roles.mediators, roles.covariates};
    Dataset ds(std::move(schema), std::move(columns), dropped);
    std::vector<std::string> problems = validate(ds);
    if (!problems.empty()) {
        std::string msg = path + ": invalid dataset";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw DataError(msg);
    }
    return ds;
}

void save_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open file for writing: " + path);
    const Schema& s = ds.schema();
    out << s.outcome << ',' << s.exposure;
    for (const auto& [name, kind] : s.mediators) {
        (void)kind;
        out << ',' << name;
    }
    for (const auto& name : s.covariates) out << ',' << name;
    out << '\n';
    char buf[64];
    auto put = [&](double v, bool lead_comma) {
        if (lead_comma) out << ',';
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << buf;
    };
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        put(ds.outcome()[i], false);
        put(ds.exposure()[i], true);
        for (std::size_t k = 0; k < ds.n_mediators(); ++k) put(ds.mediator(k)[i], true);
        for (std::size_t j = 0; j < ds.n_covariates(); ++j) put(ds.covariate(j)[i], true);
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
}

namespace {

bool is_binary_column(const std::vector<double>& col) {
    for (double v : col)
        if (v != 0.0 && v != 1.0) return false;
    return true;
}

bool has_nonfinite(const std::vector<double>& col) {
    for (double v : col)
        if (!std::isfinite(v)) return true;
    return false;
}

bool varies(const std::vector<double>& col) {
    for (double v : col)
        if (v != col[0]) return true;
    return false;
}

}  // namespace

std::vector<std::string> validate(const Dataset& ds) {
    std::vector<std::string> problems;
    if (ds.n_rows() == 0) {
        problems.push_back("dataset has no rows");
        return problems;
    }
    const Schema& s = ds.schema();
    if (ds.n_mediators() < 1) problems.push_back("dataset has no mediators");

    if (!is_binary_column(ds.outcome()))
        problems.push_back("outcome '" + s.outcome + "' is not coded 0/1");
    if (!is_binary_column(ds.exposure()))
        problems.push_back("exposure '" + s.exposure + "' is not coded 0/1");
    else {
        bool has0 = false, has1 = false;
        for (double v : ds.exposure()) (v == 0.0 ? has0 : has1) = true;
        if (!has0 || !has1)
            problems.push_back("exposure '" + s.exposure + "' takes only one value");
    }
    for (std::size_t k = 0; k < ds.n_mediators(); ++k) {
        const auto& [name, kind] = s.mediators[k];
        if (kind == MediatorKind::Binary) {
            if (!is_binary_column(ds.mediator(k)))
                problems.push_back("binary mediator '" + name + "' is not coded 0/1");
        } else if (has_nonfinite(ds.mediator(k))) {
            problems.push_back("mediator '" + name + "' contains non-finite values");
        }
        if (!varies(ds.mediator(k)))
            problems.push_back("mediator '" + name + "' is constant");
    }
    for (std::size_t j = 0; j < ds.n_covariates(); ++j)
        if (has_nonfinite(ds.covariate(j)))
            problems.push_back("covariate '" + s.covariates[j] + "' contains non-finite values");
    return problems;
}

}  // namespace medmediate
