#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sosci/errors.hpp"

namespace sosci {

enum class Format { csv, json };

using Cell = std::variant<std::string, double, std::int64_t>;

/// Fixed 6-significant-digit rendering shared by CSV and JSON output.
inline std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Rectangular result table with a metadata block.
class OutputTable {
public:
    OutputTable() = default;
    explicit OutputTable(std::vector<std::string> header) : header_(std::move(header)) {}

    const std::vector<std::string>& header() const noexcept { return header_; }
    const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }
    nlohmann::ordered_json& meta() noexcept { return meta_; }
    const nlohmann::ordered_json& meta() const noexcept { return meta_; }

    void add_row(std::vector<Cell> row) {
        if (row.size() != header_.size()) throw DomainError("OutputTable: row width does not match header");
        rows_.push_back(std::move(row));
    }

    std::string to_csv() const {
        std::string out;
        append_record(out, header_);
        for (const auto& row : rows_) {
            std::vector<std::string> fields;
            fields.reserve(row.size());
            for (const auto& c : row) fields.push_back(cell_text(c));
            append_record(out, fields);
        }
        return out;
    }

    nlohmann::ordered_json to_json_value() const {
        nlohmann::ordered_json doc;
        doc["meta"] = meta_.is_null() ? nlohmann::ordered_json::object() : meta_;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : rows_) {
            nlohmann::ordered_json rec = nlohmann::ordered_json::object();
            for (std::size_t i = 0; i < row.size(); ++i) rec[header_[i]] = cell_json(row[i]);
            doc["rows"].push_back(std::move(rec));
        }
        return doc;
    }

    std::string to_json() const { return to_json_value().dump(2) + "\n"; }

    std::string render(Format f) const { return f == Format::csv ? to_csv() : to_json(); }

    /// Parse CSV produced by to_csv(); numeric-looking fields become numbers.
    static OutputTable from_csv(std::string_view text) {
        std::vector<std::vector<std::string>> records = parse_csv(text);
        if (records.empty()) throw DomainError("OutputTable::from_csv: missing header");
        OutputTable t(records.front());
        for (std::size_t r = 1; r < records.size(); ++r) {
            std::vector<Cell> row;
            for (auto& f : records[r]) row.push_back(parse_cell(f));
            t.add_row(std::move(row));
        }
        return t;
    }

    static std::string cell_text(const Cell& c) {
        if (const auto* s = std::get_if<std::string>(&c)) return *s;
        if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
        return format_number(std::get<double>(c));
    }

private:
    static nlohmann::ordered_json cell_json(const Cell& c) {
        if (const auto* s = std::get_if<std::string>(&c)) return *s;
        if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
        const double x = std::get<double>(c);
        if (!std::isfinite(x)) return nullptr;
        return std::stod(format_number(x));
    }

    static Cell parse_cell(const std::string& f) {
        if (f.empty()) return f;
        char* end = nullptr;
        const long long iv = std::strtoll(f.c_str(), &end, 10);
        if (end && *end == '\0') return static_cast<std::int64_t>(iv);
        const double dv = std::strtod(f.c_str(), &end);
        if (end && *end == '\0') return dv;
        return f;
    }

    static void append_record(std::string& out, const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out += ',';
            const std::string& f = fields[i];
            if (f.find_first_of(",\"\r\n") != std::string::npos) {
                out += '"';
                for (char ch : f) {
                    if (ch == '"') out += '"';
                    out += ch;
                }
                out += '"';
            } else {
                out += f;
            }
        }
        out += '\n';
    }

    static std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
        std::vector<std::vector<std::string>> records;
        std::vector<std::string> rec;
        std::string field;
        bool quoted = false, any = false;
        for (std::size_t i = 0; i < text.size(); ++i) {
            const char ch = text[i];
            any = true;
            if (quoted) {
                if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    field += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                rec.push_back(std::move(field));
                field.clear();
            } else if (ch == '\n' || ch == '\r') {
                if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
                rec.push_back(std::move(field));
                field.clear();
                records.push_back(std::move(rec));
                rec.clear();
                any = false;
            } else {
                field += ch;
            }
        }
        if (any) {
            rec.push_back(std::move(field));
            records.push_back(std::move(rec));
        }
        return records;
    }

    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
    nlohmann::ordered_json meta_ = nlohmann::ordered_json::object();
};

} // namespace sosci
